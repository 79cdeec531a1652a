// Command line front end: model validation, scenario replay (scripted or
// interactive), fixture generation and the scaling benchmark.
//
// Exit codes: 0 solved/ok, 1 failed cooperation, 2 validation error,
// 3 usage error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "coopgraph/bench.hpp"
#include "coopgraph/bundle.hpp"
#include "coopgraph/generators.hpp"
#include "coopgraph/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kInvalid = 2;
constexpr int kUsage = 3;

int cmd_validate(const std::string& bundle_dir) {
    auto bundle = coop::load_bundle(bundle_dir);
    auto violations = coop::validate_bundle(bundle);
    for (const auto& v : violations) {
        std::cerr << "violation: " << coop::to_string(v.code) << " " << v.detail << "\n";
    }
    if (!violations.empty()) return kInvalid;
    coop::HierGraph model = coop::build_model(bundle);
    std::cout << "ok: " << bundle.name << " (" << bundle.model.graphs.size() << " graphs, "
              << model.spawned_nodes() << " nodes and " << model.spawned_arcs()
              << " hyper-arcs spawned)\n";
    return kOk;
}

int cmd_run(const std::string& bundle_dir, const std::string& trace_path, bool interactive,
            std::optional<unsigned> seed, const std::string& transcript_path) {
    auto bundle = coop::load_bundle(bundle_dir);
    coop::RunOptions options;
    options.mode = interactive ? coop::RunOptions::Mode::Interactive
                               : coop::RunOptions::Mode::Replay;
    options.seed = seed;
    std::vector<coop::Event> trace;
    const std::vector<coop::Event>* trace_ptr = nullptr;
    if (!trace_path.empty()) {
        std::ifstream in(trace_path);
        if (!in) throw coop::ModelError("cannot open trace " + trace_path);
        trace = coop::parse_trace(in, trace_path);
        trace_ptr = &trace;
    }
    coop::RunResult result = coop::run_scenario(bundle, options, trace_ptr);
    if (transcript_path.empty()) {
        std::cout << result.transcript;
    } else {
        std::ofstream out(transcript_path);
        out << result.transcript;
    }
    return result.status == coop::RunStatus::Solved ? kOk : kFailed;
}

int cmd_gen_table(int legs, const std::string& encoding, const std::string& out_dir) {
    auto bundle = coop::generate_table_model(legs, coop::parse_encoding(encoding));
    coop::write_bundle(bundle, out_dir);
    auto [nodes, arcs] = coop::designed_size(bundle);
    std::cout << "wrote " << bundle.name << " to " << out_dir << " (" << nodes << " nodes, "
              << arcs << " hyper-arcs designed)\n";
    return kOk;
}

int cmd_gen_kitchen(const std::string& out_dir) {
    auto bundle = coop::generate_kitchen_model();
    coop::write_bundle(bundle, out_dir);
    auto [nodes, arcs] = coop::designed_size(bundle);
    coop::HierGraph model = coop::build_model(bundle);
    std::cout << "wrote " << bundle.name << " to " << out_dir << " ("
              << bundle.model.graphs.size() << " graphs, " << nodes << "/" << arcs
              << " designed, " << model.spawned_nodes() << "/" << model.spawned_arcs()
              << " spawned)\n";
    return kOk;
}

int cmd_bench(const std::vector<std::string>& encodings, const std::string& legs_range, int reps,
              unsigned seed, const std::string& out_csv, const std::string& plot_out) {
    coop::BenchmarkOptions options;
    options.encodings.clear();
    for (const std::string& e : encodings) options.encodings.push_back(coop::parse_encoding(e));
    auto dots = legs_range.find("..");
    if (dots != std::string::npos) {
        options.legs_min = std::stoi(legs_range.substr(0, dots));
        options.legs_max = std::stoi(legs_range.substr(dots + 2));
    } else {
        options.legs_min = options.legs_max = std::stoi(legs_range);
    }
    options.repetitions = reps;
    options.seed = seed;
    auto records = coop::run_benchmark(options);
    std::string csv = coop::benchmark_csv(records);
    if (out_csv.empty()) {
        std::cout << csv;
    } else {
        std::ofstream out(out_csv);
        out << csv;
        std::cout << "wrote " << records.size() << " records to " << out_csv << "\n";
    }
    if (!plot_out.empty()) {
        std::ofstream out(plot_out);
        out << coop::benchmark_plot_data(records);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical AND/OR graph engine for human-robot cooperation"};
    app.require_subcommand(1);

    std::string bundle_dir, trace_path, transcript_path, encoding = "fol", out_dir;
    std::string legs_range = "1..9", out_csv, plot_out;
    std::vector<std::string> encodings{"fol", "hierarchical"};
    int legs = 4, reps = 10;
    unsigned seed = 42;
    bool interactive = false;
    bool seed_set = false;

    auto* validate = app.add_subcommand("validate", "Validate a scenario bundle directory");
    validate->add_option("bundle", bundle_dir, "bundle directory")->required();

    auto* run = app.add_subcommand("run", "Run a cooperation scenario");
    run->add_option("bundle", bundle_dir, "bundle directory")->required();
    run->add_option("--trace", trace_path, "trace file (defaults to the bundle's trace.txt)");
    run->add_flag("--interactive", interactive, "prompt for events on stdin");
    run->add_option("--seed", seed, "seed recorded in the transcript")
        ->each([&](const std::string&) { seed_set = true; });
    run->add_option("--transcript", transcript_path, "write the transcript to a file");

    auto* gen_table = app.add_subcommand("gen-table", "Generate a table assembly model");
    gen_table->add_option("--legs", legs, "number of legs (1..9)")->required();
    gen_table->add_option("--encoding", encoding, "standard|fol|hierarchical")->required();
    gen_table->add_option("--out", out_dir, "output directory")->required();

    auto* gen_kitchen = app.add_subcommand("gen-kitchen", "Generate the kitchen-scale model");
    gen_kitchen->add_option("--out", out_dir, "output directory")->required();

    auto* bench = app.add_subcommand("bench", "Scaling benchmark over table models");
    bench->add_option("--encodings", encodings, "encodings to benchmark")->delimiter(',');
    bench->add_option("--legs", legs_range, "leg range, e.g. 1..9");
    bench->add_option("--reps", reps, "repetitions per configuration");
    bench->add_option("--seed", seed, "base seed");
    bench->add_option("--out", out_csv, "CSV output file");
    bench->add_option("--plot-out", plot_out, "plot data output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (validate->parsed()) return cmd_validate(bundle_dir);
        if (run->parsed()) {
            return cmd_run(bundle_dir, trace_path, interactive,
                           seed_set ? std::optional<unsigned>(seed) : std::nullopt,
                           transcript_path);
        }
        if (gen_table->parsed()) return cmd_gen_table(legs, encoding, out_dir);
        if (gen_kitchen->parsed()) return cmd_gen_kitchen(out_dir);
        if (bench->parsed()) {
            return cmd_bench(encodings, legs_range, reps, seed, out_csv, plot_out);
        }
    } catch (const coop::ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
