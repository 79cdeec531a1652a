#include "coopgraph/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace coop {

namespace {

std::string loc(const std::string& file, int line) {
    return file + ":" + std::to_string(line);
}

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char ch : s) {
        if (ch == '(') depth++;
        if (ch == ')') depth--;
        if (ch == ',' && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double parse_number(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ModelError(where, "expected a number, got '" + s + "'");
    }
}

/// Scans "KEY value value KEY value ..." token lists where keys come from a
/// fixed set; values between keys are joined with spaces removed so comma
/// lists may contain spaces after commas.
std::map<std::string, std::string> scan_fields(const std::vector<std::string>& tokens,
                                               std::size_t start,
                                               const std::vector<std::string>& keys,
                                               const std::string& where) {
    std::map<std::string, std::string> out;
    std::string current;
    for (std::size_t i = start; i < tokens.size(); ++i) {
        if (std::find(keys.begin(), keys.end(), tokens[i]) != keys.end()) {
            current = tokens[i];
            if (out.count(current)) throw ModelError(where, "duplicate field " + current);
            out[current] = "";
        } else if (current.empty()) {
            throw ModelError(where, "unexpected token '" + tokens[i] + "'");
        } else {
            out[current] += tokens[i];
        }
    }
    return out;
}

State parse_state(const std::string& text, const std::string& where, ArityTable* arity) {
    std::vector<Literal> lits;
    for (const std::string& piece : split_commas(text)) {
        Literal l = parse_literal(piece, where);
        if (arity) arity->check(l, where);
        lits.push_back(std::move(l));
    }
    try {
        return State(std::move(lits));
    } catch (const ModelError& e) {
        throw ModelError(where, e.what());
    }
}

Substitution parse_grounding(const std::string& text, const std::string& where) {
    Substitution out;
    if (text == "-" || text.empty()) return out;
    for (const std::string& piece : split_commas(text)) {
        auto eq = piece.find('=');
        if (eq == std::string::npos || piece.empty() || piece[0] != '?') {
            throw ModelError(where, "bad binding '" + piece + "', expected ?var=constant");
        }
        std::string var = piece.substr(1, eq - 1);
        std::string value = piece.substr(eq + 1);
        if (var.empty() || value.empty() || !out.bind(var, value)) {
            throw ModelError(where, "bad binding '" + piece + "'");
        }
    }
    return out;
}

}  // namespace

void ArityTable::check(const Literal& l, const std::string& where) {
    auto it = entries_.find(l.predicate);
    if (it == entries_.end()) {
        entries_.emplace(l.predicate, Entry{l.args.size(), where});
        return;
    }
    if (it->second.arity != l.args.size()) {
        throw ModelError(where, "predicate " + l.predicate + " used with arity " +
                                    std::to_string(l.args.size()) + " but declared with arity " +
                                    std::to_string(it->second.arity) + " at " + it->second.where);
    }
}

void parse_model_file(std::istream& in, const std::string& filename, HierSpec& out,
                      ArityTable* arity) {
    GraphSpec* current = nullptr;
    TransitionSpec* current_transition = nullptr;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = loc(filename, lineno);
        auto tokens = tokenize(strip_comment(line));
        if (tokens.empty()) continue;
        const std::string& kw = tokens[0];
        if (kw == "GRAPH") {
            if (tokens.size() != 2) throw ModelError(where, "GRAPH expects one identifier");
            out.graphs.push_back(GraphSpec{tokens[1], {}, {}});
            current = &out.graphs.back();
            current_transition = nullptr;
        } else if (kw == "NODE") {
            if (!current) throw ModelError(where, "NODE before GRAPH");
            if (tokens.size() < 2) throw ModelError(where, "NODE expects an identifier");
            auto fields = scan_fields(tokens, 2, {"WEIGHT", "STATE", "PROCESS"}, where);
            NodeSpec n;
            n.id = tokens[1];
            if (!fields.count("WEIGHT")) throw ModelError(where, "NODE is missing WEIGHT");
            if (!fields.count("STATE")) throw ModelError(where, "NODE is missing STATE");
            n.weight = parse_number(fields["WEIGHT"], where);
            n.state = parse_state(fields["STATE"], where, arity);
            if (fields.count("PROCESS")) n.processes = split_commas(fields["PROCESS"]);
            current->nodes.push_back(std::move(n));
        } else if (kw == "ARC") {
            if (!current) throw ModelError(where, "ARC before GRAPH");
            if (tokens.size() < 2) throw ModelError(where, "ARC expects an identifier");
            auto fields =
                scan_fields(tokens, 2, {"WEIGHT", "CHILDREN", "PARENT", "ACTIONS"}, where);
            ArcSpec h;
            h.id = tokens[1];
            if (!fields.count("WEIGHT")) throw ModelError(where, "ARC is missing WEIGHT");
            if (!fields.count("CHILDREN")) throw ModelError(where, "ARC is missing CHILDREN");
            if (!fields.count("PARENT")) throw ModelError(where, "ARC is missing PARENT");
            h.weight = parse_number(fields["WEIGHT"], where);
            h.children = split_commas(fields["CHILDREN"]);
            h.parent = fields["PARENT"];
            if (fields.count("ACTIONS")) h.actions = split_commas(fields["ACTIONS"]);
            h.where = where;
            current->arcs.push_back(std::move(h));
        } else if (kw == "TRANSITION") {
            if (tokens.size() != 5 || tokens[1] != "ARC" || tokens[3] != "LOWER") {
                throw ModelError(where, "expected TRANSITION ARC <graph>.<arc> LOWER <graph>");
            }
            auto dot = tokens[2].find('.');
            if (dot == std::string::npos) {
                throw ModelError(where, "expected <graph>.<arc>, got '" + tokens[2] + "'");
            }
            TransitionSpec t;
            t.upper_graph = tokens[2].substr(0, dot);
            t.upper_arc = tokens[2].substr(dot + 1);
            t.lower_graph = tokens[4];
            out.transitions.push_back(std::move(t));
            current_transition = &out.transitions.back();
        } else if (kw == "MAPLEAF" || kw == "MAPROOT") {
            if (!current_transition) throw ModelError(where, kw + " before TRANSITION");
            if (tokens.size() != 4 || tokens[2] != "->") {
                throw ModelError(where, "expected " + kw + " <upper> -> <lower>");
            }
            if (kw == "MAPLEAF") {
                auto& entry = current_transition->leaf_map[tokens[1]];
                for (const std::string& leaf : split_commas(tokens[3])) entry.push_back(leaf);
            } else {
                current_transition->upper_parent = tokens[1];
                current_transition->lower_root = tokens[3];
            }
        } else {
            throw ModelError(where, "unknown keyword '" + kw + "'");
        }
    }
}

ActionLibrary parse_action_library(std::istream& in, const std::string& filename,
                                   ArityTable* arity) {
    ActionLibrary lib;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = loc(filename, lineno);
        auto tokens = tokenize(strip_comment(line));
        if (tokens.empty()) continue;
        if (tokens[0] != "ACTION") throw ModelError(where, "expected ACTION, got " + tokens[0]);
        if (tokens.size() < 2) throw ModelError(where, "ACTION expects a name");
        auto fields = scan_fields(tokens, 2, {"PARAMS", "AGENTS", "PRE", "ADD", "DEL"}, where);
        ActionSpec spec;
        spec.name = tokens[1];
        if (fields.count("PARAMS")) {
            for (const std::string& p : split_commas(fields["PARAMS"])) {
                if (p.empty() || p[0] != '?') {
                    throw ModelError(where, "parameters must start with '?', got '" + p + "'");
                }
                spec.params.push_back(p.substr(1));
            }
        }
        if (!fields.count("AGENTS")) throw ModelError(where, "ACTION is missing AGENTS");
        const std::string& ag = fields["AGENTS"];
        auto open = ag.find('(');
        if (open == std::string::npos || ag.back() != ')') {
            throw ModelError(where, "expected any(..), only(..) or joint(..), got '" + ag + "'");
        }
        std::string mode = ag.substr(0, open);
        spec.agents.agents = split_commas(ag.substr(open + 1, ag.size() - open - 2));
        if (mode == "any") {
            spec.agents.mode = AgentSpec::Mode::Any;
        } else if (mode == "only") {
            spec.agents.mode = AgentSpec::Mode::Only;
            if (spec.agents.agents.size() != 1) {
                throw ModelError(where, "only(..) expects exactly one agent");
            }
        } else if (mode == "joint") {
            spec.agents.mode = AgentSpec::Mode::Joint;
        } else {
            throw ModelError(where, "unknown agent mode '" + mode + "'");
        }
        if (fields.count("PRE")) spec.pre = parse_state(fields["PRE"], where, arity);
        if (fields.count("ADD")) spec.eff_add = parse_state(fields["ADD"], where, arity);
        if (fields.count("DEL")) spec.eff_del = parse_state(fields["DEL"], where, arity);
        try {
            lib.add(std::move(spec));
        } catch (const ModelError& e) {
            throw ModelError(where, e.what());
        }
    }
    return lib;
}

WorldState parse_world(std::istream& in, const std::string& filename, ArityTable* arity) {
    WorldState w;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = loc(filename, lineno);
        auto tokens = tokenize(strip_comment(line));
        if (tokens.empty()) continue;
        if (tokens[0] == "OBJ") {
            if (tokens.size() < 4 || tokens[2] != "TYPE") {
                throw ModelError(where, "expected OBJ <const> TYPE <pred> [POSE x y z]");
            }
            std::optional<std::array<double, 3>> pose;
            if (tokens.size() > 4) {
                if (tokens.size() != 8 || tokens[4] != "POSE") {
                    throw ModelError(where, "expected POSE x y z");
                }
                pose = {{parse_number(tokens[5], where), parse_number(tokens[6], where),
                         parse_number(tokens[7], where)}};
            }
            if (arity) {
                Literal type_fact{tokens[3], {Term::constant(tokens[1])}, false};
                arity->check(type_fact, where);
            }
            w.add_object(tokens[1], tokens[3], pose);
        } else if (tokens[0] == "FACT") {
            if (tokens.size() != 2) throw ModelError(where, "expected FACT <literal>");
            Literal l = parse_literal(tokens[1], where);
            if (arity) arity->check(l, where);
            if (!is_grounded(l)) throw ModelError(where, "facts must be grounded");
            w.add_fact(l);
        } else {
            throw ModelError(where, "unknown keyword '" + tokens[0] + "'");
        }
    }
    return w;
}

AgentRoster parse_agents(std::istream& in, const std::string& filename) {
    AgentRoster roster;
    std::optional<AgentModel> current;
    std::string line;
    int lineno = 0;
    auto flush = [&] {
        if (current) roster.add(std::move(*current));
        current.reset();
    };
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = loc(filename, lineno);
        auto tokens = tokenize(strip_comment(line));
        if (tokens.empty()) continue;
        if (tokens[0] == "AGENT") {
            flush();
            if (tokens.size() < 4 || tokens[2] != "KIND") {
                throw ModelError(where, "expected AGENT <id> KIND <human|robot> [TIMEOUT <s>]");
            }
            AgentModel m;
            m.id = tokens[1];
            if (tokens[3] == "human") {
                m.is_human = true;
            } else if (tokens[3] == "robot") {
                m.is_human = false;
            } else {
                throw ModelError(where, "agent kind must be human or robot");
            }
            if (tokens.size() > 4) {
                if (tokens.size() != 6 || tokens[4] != "TIMEOUT") {
                    throw ModelError(where, "expected TIMEOUT <seconds>");
                }
                m.timeout_seconds = parse_number(tokens[5], where);
            }
            current = std::move(m);
        } else if (tokens[0] == "DUR") {
            if (!current) throw ModelError(where, "DUR before AGENT");
            if (tokens.size() != 3 && !(tokens.size() == 5 && tokens[3] == "PERM")) {
                throw ModelError(where, "expected DUR <action> <base-s> [PERM <s-per-m>]");
            }
            DurationModel d;
            d.base_seconds = parse_number(tokens[2], where);
            if (d.base_seconds <= 0) throw ModelError(where, "base duration must be positive");
            if (tokens.size() == 5) d.seconds_per_metre = parse_number(tokens[4], where);
            current->durations[tokens[1]] = d;
        } else if (tokens[0] == "FAILS") {
            if (!current) throw ModelError(where, "FAILS before AGENT");
            if (tokens.size() < 2) throw ModelError(where, "expected FAILS <action> [<args>]");
            FailurePattern p;
            p.action = tokens[1];
            if (tokens.size() > 2 && tokens[2] != "*") {
                for (const std::string& piece : split_commas(tokens[2])) {
                    if (piece == "*") {
                        p.args.push_back(Term::variable("_"));
                    } else if (!piece.empty() && piece[0] == '?') {
                        p.args.push_back(Term::variable(piece.substr(1)));
                    } else {
                        p.args.push_back(Term::constant(piece));
                    }
                }
            }
            current->failures.push_back(std::move(p));
        } else {
            throw ModelError(where, "unknown keyword '" + tokens[0] + "'");
        }
    }
    flush();
    return roster;
}

std::vector<Event> parse_trace(std::istream& in, const std::string& filename) {
    std::vector<Event> out;
    std::string line;
    int lineno = 0;
    double last_time = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = loc(filename, lineno);
        auto tokens = tokenize(strip_comment(line));
        if (tokens.empty()) continue;
        if (tokens.size() < 2 || tokens[0].rfind("T=", 0) != 0) {
            throw ModelError(where, "expected T=<time> <event>");
        }
        Event ev;
        ev.time = parse_number(tokens[0].substr(2), where);
        if (ev.time < last_time) throw ModelError(where, "event times must not decrease");
        last_time = ev.time;
        if (tokens[1] == "ACK") {
            if (tokens.size() != 3 || (tokens[2] != "ok" && tokens[2] != "fail")) {
                throw ModelError(where, "expected ACK ok|fail");
            }
            ev.kind = Event::Kind::RobotAck;
            ev.ok = tokens[2] == "ok";
        } else if (tokens[1] == "HUMAN") {
            if (tokens.size() != 3 && tokens.size() != 4) {
                throw ModelError(where, "expected HUMAN <action> [<grounding>]");
            }
            ev.kind = Event::Kind::HumanAction;
            ev.action = tokens[2];
            if (tokens.size() == 4) ev.grounding = parse_grounding(tokens[3], where);
        } else if (tokens[1] == "DEACT") {
            if (tokens.size() != 3) throw ModelError(where, "expected DEACT <process>");
            ev.kind = Event::Kind::ProcessDeactivated;
            ev.process = tokens[2];
        } else {
            throw ModelError(where, "unknown event '" + tokens[1] + "'");
        }
        out.push_back(std::move(ev));
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ',';
        out += items[i];
    }
    return out;
}

}  // namespace

std::string serialize_graph(const GraphSpec& g, const std::vector<TransitionSpec>& transitions) {
    std::string out = "GRAPH " + g.id + "\n";
    for (const NodeSpec& n : g.nodes) {
        out += "NODE " + n.id + " WEIGHT " + format_double(n.weight) + " STATE " +
               to_string(n.state);
        if (!n.processes.empty()) out += " PROCESS " + join(n.processes);
        out += "\n";
    }
    for (const ArcSpec& h : g.arcs) {
        out += "ARC " + h.id + " WEIGHT " + format_double(h.weight) + " CHILDREN " +
               join(h.children) + " PARENT " + h.parent;
        if (!h.actions.empty()) out += " ACTIONS " + join(h.actions);
        out += "\n";
    }
    for (const TransitionSpec& t : transitions) {
        if (t.upper_graph != g.id) continue;
        out += "TRANSITION ARC " + t.upper_graph + "." + t.upper_arc + " LOWER " + t.lower_graph +
               "\n";
        for (const auto& [upper, leaves] : t.leaf_map) {
            out += "MAPLEAF " + upper + " -> " + join(leaves) + "\n";
        }
        out += "MAPROOT " + t.upper_parent + " -> " + t.lower_root + "\n";
    }
    return out;
}

std::string serialize_actions(const ActionLibrary& lib) {
    std::string out;
    for (const std::string& name : lib.names()) {
        const ActionSpec& a = lib.get(name);
        out += "ACTION " + a.name;
        if (!a.params.empty()) {
            out += " PARAMS ";
            for (std::size_t i = 0; i < a.params.size(); ++i) {
                if (i) out += ',';
                out += '?' + a.params[i];
            }
        }
        out += " AGENTS ";
        switch (a.agents.mode) {
            case AgentSpec::Mode::Any: out += "any("; break;
            case AgentSpec::Mode::Only: out += "only("; break;
            case AgentSpec::Mode::Joint: out += "joint("; break;
        }
        out += join(a.agents.agents) + ")";
        if (!a.pre.empty()) out += " PRE " + to_string(a.pre);
        if (!a.eff_add.empty()) out += " ADD " + to_string(a.eff_add);
        if (!a.eff_del.empty()) out += " DEL " + to_string(a.eff_del);
        out += "\n";
    }
    return out;
}

std::string serialize_world(const WorldState& w) {
    std::string out;
    std::set<Literal> implied;
    for (const auto& [name, info] : w.objects()) {
        out += "OBJ " + name + " TYPE " + info.type;
        if (info.pose) {
            out += " POSE " + format_double((*info.pose)[0]) + " " +
                   format_double((*info.pose)[1]) + " " + format_double((*info.pose)[2]);
        }
        out += "\n";
        implied.insert(Literal{info.type, {Term::constant(name)}, false});
    }
    for (const Literal& l : w.facts().literals()) {
        if (implied.count(l)) continue;
        out += "FACT " + to_string(l) + "\n";
    }
    return out;
}

std::string serialize_agents(const AgentRoster& roster) {
    std::string out;
    for (const std::string& id : roster.ids()) {
        const AgentModel& m = roster.get(id);
        out += "AGENT " + m.id + " KIND " + (m.is_human ? "human" : "robot") + " TIMEOUT " +
               format_double(m.timeout_seconds) + "\n";
        for (const auto& [action, d] : m.durations) {
            out += "DUR " + action + " " + format_double(d.base_seconds);
            if (d.seconds_per_metre != 0) out += " PERM " + format_double(d.seconds_per_metre);
            out += "\n";
        }
        for (const FailurePattern& p : m.failures) {
            out += "FAILS " + p.action;
            if (!p.args.empty()) {
                out += " ";
                for (std::size_t i = 0; i < p.args.size(); ++i) {
                    if (i) out += ',';
                    out += p.args[i].is_variable() ? "*" : p.args[i].name;
                }
            }
            out += "\n";
        }
    }
    return out;
}

std::string serialize_trace(const std::vector<Event>& trace) {
    std::string out;
    for (const Event& ev : trace) {
        out += "T=" + format_double(ev.time) + " ";
        switch (ev.kind) {
            case Event::Kind::RobotAck:
                out += std::string("ACK ") + (ev.ok ? "ok" : "fail");
                break;
            case Event::Kind::HumanAction: {
                out += "HUMAN " + ev.action;
                if (!ev.grounding.empty()) {
                    out += " ";
                    bool first = true;
                    for (const auto& [var, c] : ev.grounding.bindings()) {
                        if (!first) out += ',';
                        out += '?' + var + '=' + c;
                        first = false;
                    }
                }
                break;
            }
            case Event::Kind::ProcessDeactivated:
                out += "DEACT " + ev.process;
                break;
        }
        out += "\n";
    }
    return out;
}

}  // namespace coop
