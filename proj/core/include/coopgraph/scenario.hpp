#pragma once

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "coopgraph/bundle.hpp"
#include "coopgraph/task_manager.hpp"

namespace coop {

enum class RunStatus { Solved, Failed };

struct RunOptions {
    enum class Mode { Replay, Interactive };
    Mode mode = Mode::Replay;
    std::optional<unsigned> seed;      // recorded in the transcript header
    std::istream* interactive_in = nullptr;   // defaults to std::cin
    std::ostream* prompt_out = nullptr;       // defaults to std::cerr
    std::size_t path_cap = AndOrGraph::kDefaultPathCap;
    std::size_t max_queries = 100000;  // guards a stuck replay
};

struct RunResult {
    RunStatus status = RunStatus::Failed;
    std::string transcript;
    std::size_t queries = 0;
};

/// Drives query -> suggest -> table -> select -> ground -> dispatch -> event
/// cycles until the cooperation is solved or failed, writing an ordered,
/// deterministic transcript. Replay mode consumes the bundle trace (or an
/// explicit one); interactive mode prompts at each dispatch point and
/// accepts `pass`, `fail`, a human decision `<action> ?v=c[,..]`,
/// `deact <process>` or `quit`.
RunResult run_scenario(const ScenarioBundle& bundle, const RunOptions& options = {},
                       const std::vector<Event>* trace_override = nullptr);

}  // namespace coop
