#include "coopgraph/bundle.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace coop {

namespace {

void cross_check(const ScenarioBundle& b) {
    // Action references on ARC lines must resolve when a library is present.
    if (b.actions) {
        for (const GraphSpec& g : b.model.graphs) {
            for (const ArcSpec& h : g.arcs) {
                for (const std::string& a : h.actions) {
                    if (!b.actions->has(a)) {
                        throw ModelError(h.where.empty() ? g.id + "." + h.id : h.where,
                                         "hyper-arc " + h.id + " references unknown action " + a);
                    }
                }
            }
        }
    }
    // Every permitted agent must exist and have a duration model for the
    // action, so simulations are total.
    if (b.actions && b.agents) {
        for (const std::string& name : b.actions->names()) {
            const ActionSpec& spec = b.actions->get(name);
            for (const std::string& agent : spec.agents.agents) {
                if (!b.agents->has(agent)) {
                    throw ModelError("action " + name + " permits unknown agent " + agent);
                }
                const AgentModel& m = b.agents->get(agent);
                if (!m.durations.count(name)) {
                    throw ModelError("agent " + agent + " has no duration model for action " +
                                     name);
                }
            }
        }
    }
    // Process names route deactivation events, so they must be unique.
    std::map<std::string, std::string> seen;
    for (const GraphSpec& g : b.model.graphs) {
        for (const NodeSpec& n : g.nodes) {
            for (const std::string& p : n.processes) {
                auto [it, inserted] = seen.emplace(p, g.id + "." + n.id);
                if (!inserted) {
                    throw ModelError("process " + p + " declared on both " + it->second +
                                     " and " + g.id + "." + n.id);
                }
            }
        }
    }
}

ScenarioBundle assemble(const std::map<std::string, std::string>& files,
                        const std::string& name) {
    ScenarioBundle b;
    b.name = name;
    ArityTable arity;
    for (const auto& [fname, content] : files) {  // sorted by name
        if (fname.size() > 6 && fname.rfind(".graph") == fname.size() - 6) {
            std::istringstream in(content);
            parse_model_file(in, fname, b.model, &arity);
        }
    }
    auto get = [&](const char* fname) -> const std::string* {
        auto it = files.find(fname);
        return it == files.end() ? nullptr : &it->second;
    };
    if (const std::string* c = get("actions.txt")) {
        std::istringstream in(*c);
        b.actions = parse_action_library(in, "actions.txt", &arity);
    }
    if (const std::string* c = get("world.txt")) {
        std::istringstream in(*c);
        b.world = parse_world(in, "world.txt", &arity);
    }
    if (const std::string* c = get("agents.txt")) {
        std::istringstream in(*c);
        b.agents = parse_agents(in, "agents.txt");
    }
    if (const std::string* c = get("trace.txt")) {
        std::istringstream in(*c);
        b.trace = parse_trace(in, "trace.txt");
    }
    if (b.model.graphs.empty()) {
        throw ModelError("bundle " + name + " contains no *.graph files");
    }
    cross_check(b);
    return b;
}

}  // namespace

ScenarioBundle load_bundle_files(const std::map<std::string, std::string>& files,
                                 const std::string& name) {
    return assemble(files, name);
}

ScenarioBundle load_bundle(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw ModelError("bundle directory " + dir.string() + " does not exist");
    }
    std::map<std::string, std::string> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string fname = entry.path().filename().string();
        bool wanted = (fname.size() > 6 && fname.rfind(".graph") == fname.size() - 6) ||
                      fname == "actions.txt" || fname == "world.txt" || fname == "agents.txt" ||
                      fname == "trace.txt";
        if (!wanted) continue;
        std::ifstream in(entry.path());
        std::ostringstream ss;
        ss << in.rdbuf();
        files[fname] = ss.str();
    }
    return assemble(files, dir.filename().string());
}

std::vector<Violation> validate_bundle(const ScenarioBundle& bundle) {
    std::vector<Violation> out;
    for (const GraphSpec& g : bundle.model.graphs) {
        for (Violation v : validate_graph(g)) {
            v.detail = g.id + ": " + v.detail;
            out.push_back(std::move(v));
        }
    }
    return out;
}

HierGraph build_model(const ScenarioBundle& bundle, std::size_t path_cap) {
    auto violations = validate_bundle(bundle);
    if (!violations.empty()) {
        std::string msg = "bundle " + bundle.name + " is invalid:";
        for (const Violation& v : violations) {
            msg += " " + to_string(v.code) + "(" + v.detail + ")";
        }
        throw ModelError(msg);
    }
    if (bundle.model.graphs.size() == 1 && bundle.model.transitions.empty()) {
        return HierGraph::single(bundle.model.graphs[0], path_cap);
    }
    return HierGraph::offline(bundle.model, path_cap);
}

std::map<std::string, std::string> render_bundle(const ScenarioBundle& bundle) {
    std::map<std::string, std::string> files;
    for (const GraphSpec& g : bundle.model.graphs) {
        files[g.id + ".graph"] = serialize_graph(g, bundle.model.transitions);
    }
    if (bundle.actions) files["actions.txt"] = serialize_actions(*bundle.actions);
    if (bundle.world) files["world.txt"] = serialize_world(*bundle.world);
    if (bundle.agents) files["agents.txt"] = serialize_agents(*bundle.agents);
    if (bundle.trace) files["trace.txt"] = serialize_trace(*bundle.trace);
    return files;
}

void write_bundle(const ScenarioBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [fname, content] : render_bundle(bundle)) {
        std::ofstream out(dir / fname);
        if (!out) throw ModelError("cannot write " + (dir / fname).string());
        out << content;
    }
}

}  // namespace coop
