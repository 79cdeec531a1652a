#include "coopgraph/scenario.hpp"

#include <memory>
#include <sstream>

namespace coop {

namespace {

class Transcript {
public:
    void line(const std::string& s) { out_ += s + "\n"; }
    const std::string& text() const { return out_; }

private:
    std::string out_;
};

std::string grounding_text(const Substitution& s) {
    if (s.empty()) return "-";
    std::string out;
    bool first = true;
    for (const auto& [var, c] : s.bindings()) {
        if (!first) out += ',';
        out += '?' + var + '=' + c;
        first = false;
    }
    return out;
}

std::string agents_text(const std::vector<std::string>& agents) {
    std::string out;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (i) out += ',';
        out += agents[i];
    }
    return out.empty() ? "-" : out;
}

std::string event_text(const Event& ev) {
    std::string out = "T=" + format_double(ev.time) + " ";
    switch (ev.kind) {
        case Event::Kind::RobotAck: return out + "ACK " + (ev.ok ? "ok" : "fail");
        case Event::Kind::HumanAction:
            return out + "HUMAN " + ev.action + " " + grounding_text(ev.grounding);
        case Event::Kind::ProcessDeactivated: return out + "DEACT " + ev.process;
    }
    return out;
}

/// Supplies events: either a parsed trace or interactive prompts.
class EventSource {
public:
    virtual ~EventSource() = default;
    virtual std::optional<Event> next(const CooperationEngine& engine,
                                      const std::optional<NextAction>& dispatched) = 0;
};

class TraceSource : public EventSource {
public:
    explicit TraceSource(const std::vector<Event>& events) : events_(events) {}
    std::optional<Event> next(const CooperationEngine&,
                              const std::optional<NextAction>&) override {
        if (pos_ >= events_.size()) return std::nullopt;
        return events_[pos_++];
    }

private:
    const std::vector<Event>& events_;
    std::size_t pos_ = 0;
};

class InteractiveSource : public EventSource {
public:
    InteractiveSource(std::istream& in, std::ostream& prompt) : in_(in), prompt_(prompt) {}

    std::optional<Event> next(const CooperationEngine& engine,
                              const std::optional<NextAction>& dispatched) override {
        prompt_ << "suggestions:\n";
        for (const TableRow& row : engine.table().rows()) {
            prompt_ << "  " << row.graph << ":" << row.item << " cost "
                    << format_double(row.cost);
            if (auto step = row.first_undone()) prompt_ << " next " << row.steps[*step];
            prompt_ << "\n";
        }
        if (dispatched) {
            prompt_ << "dispatched: " << dispatched->action << " -> "
                    << agents_text(dispatched->agents) << "\n";
        }
        prompt_ << "enter pass | fail | <action> [?v=c,..] | deact <p> | quit: " << std::flush;
        std::string line;
        while (std::getline(in_, line)) {
            std::istringstream ss(line);
            std::string word;
            if (!(ss >> word)) continue;
            Event ev;
            ev.time = static_cast<double>(++clock_);
            if (word == "quit") return std::nullopt;
            if (word == "pass") {
                ev.kind = Event::Kind::RobotAck;
                ev.ok = true;
                return ev;
            }
            if (word == "fail") {
                ev.kind = Event::Kind::RobotAck;
                ev.ok = false;
                return ev;
            }
            if (word == "deact") {
                std::string process;
                if (!(ss >> process)) {
                    prompt_ << "deact needs a process name: " << std::flush;
                    continue;
                }
                ev.kind = Event::Kind::ProcessDeactivated;
                ev.process = process;
                return ev;
            }
            ev.kind = Event::Kind::HumanAction;
            ev.action = word;
            std::string tok;
            bool ok = true;
            while (ok && ss >> tok) {
                std::istringstream ps(tok);
                std::string piece;
                while (std::getline(ps, piece, ',')) {
                    auto eq = piece.find('=');
                    if (eq == std::string::npos || piece.empty() || piece[0] != '?') {
                        ok = false;
                        break;
                    }
                    ev.grounding.bind(piece.substr(1, eq - 1), piece.substr(eq + 1));
                }
            }
            if (!ok) {
                prompt_ << "bad binding, try again: " << std::flush;
                continue;
            }
            return ev;
        }
        return std::nullopt;
    }

private:
    std::istream& in_;
    std::ostream& prompt_;
    unsigned long clock_ = 0;
};

}  // namespace

RunResult run_scenario(const ScenarioBundle& bundle, const RunOptions& options,
                       const std::vector<Event>* trace_override) {
    if (!bundle.runnable()) {
        throw ModelError("bundle " + bundle.name +
                         " is not runnable: it needs actions.txt, world.txt and agents.txt");
    }
    HierGraph model = build_model(bundle, options.path_cap);
    CooperationEngine engine(model, *bundle.actions, *bundle.world, *bundle.agents);

    std::unique_ptr<EventSource> source;
    if (options.mode == RunOptions::Mode::Replay) {
        const std::vector<Event>* trace = trace_override ? trace_override
                                          : bundle.trace  ? &*bundle.trace
                                                          : nullptr;
        if (!trace) throw ModelError("replay mode needs a trace");
        source = std::make_unique<TraceSource>(*trace);
    } else {
        source = std::make_unique<InteractiveSource>(
            options.interactive_in ? *options.interactive_in : std::cin,
            options.prompt_out ? *options.prompt_out : std::cerr);
    }

    Transcript t;
    t.line("# coopgraph transcript");
    t.line("# bundle " + bundle.name);
    t.line("# mode " + std::string(options.mode == RunOptions::Mode::Replay ? "replay"
                                                                            : "interactive"));
    t.line("# seed " + (options.seed ? std::to_string(*options.seed) : std::string("none")));

    RunResult result;
    for (std::size_t query = 1; query <= options.max_queries; ++query) {
        PhaseStatus status = engine.query();
        result.queries = query;
        t.line("QUERY " + std::to_string(query));
        if (status == PhaseStatus::Solved) {
            t.line("RESULT solved");
            result.status = RunStatus::Solved;
            result.transcript = t.text();
            return result;
        }
        if (status == PhaseStatus::Failed) {
            t.line("RESULT failed");
            result.status = RunStatus::Failed;
            result.transcript = t.text();
            return result;
        }
        for (const TableRow& row : engine.table().rows()) {
            t.line("SUGGEST " + row.graph + ":" + row.item + " COST " + format_double(row.cost));
        }
        // States whose processes are all done become met on the next query.
        auto autos = engine.stage_met_states();
        if (!autos.empty()) {
            for (const auto& [g, n] : autos) t.line("MET " + g + ":" + n);
            continue;
        }
        auto selection = engine.select_and_ground();
        if (selection.outcome == CooperationEngine::SelectOutcome::RowInfeasible) {
            const TableRow& row = engine.row(selection.row);
            t.line("NOGROUND " + row.graph + ":" + row.item);
            continue;
        }
        std::optional<NextAction> dispatched;
        if (selection.outcome == CooperationEngine::SelectOutcome::Grounded) {
            const TableRow& row = engine.row(selection.row);
            t.line("SELECT " + row.graph + ":" + row.item + " COST " + format_double(row.cost));
            t.line("GROUND " + row.graph + ":" + row.item + " " +
                   grounding_text(row.grounding));
            dispatched = engine.dispatch_next();
            if (!dispatched) {
                // grounded row with no undone step: report and requery
                continue;
            }
            t.line("DISPATCH " + dispatched->action + " AGENT " +
                   agents_text(dispatched->agents));
        } else if (selection.outcome == CooperationEngine::SelectOutcome::Waiting) {
            const TableRow& row = engine.row(selection.row);
            t.line("WAIT " + row.graph + ":" + row.item);
        }
        auto ev = source->next(engine, dispatched);
        if (!ev) {
            if (options.mode == RunOptions::Mode::Replay) {
                throw ModelError("trace exhausted before the cooperation finished");
            }
            t.line("RESULT failed");
            result.status = RunStatus::Failed;
            result.transcript = t.text();
            return result;
        }
        t.line("EVENT " + event_text(*ev));
        for (const Directive& d : engine.handle_event(*ev)) {
            t.line("DIRECTIVE " + to_string(d.kind) +
                   (d.detail.empty() ? "" : " " + d.detail));
        }
    }
    throw ModelError("query limit exceeded; the scenario does not terminate");
}

}  // namespace coop
