#include "coopgraph/fol.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace coop {

State::State(std::vector<Literal> lits) : literals_(std::move(lits)) {
    std::sort(literals_.begin(), literals_.end());
    literals_.erase(std::unique(literals_.begin(), literals_.end()), literals_.end());
    for (const Literal& l : literals_) {
        Literal flipped = l;
        flipped.negated = !flipped.negated;
        if (contains(flipped)) {
            throw ModelError("state contains both polarities of " + to_string(l));
        }
    }
}

bool State::contains(const Literal& l) const {
    return std::binary_search(literals_.begin(), literals_.end(), l);
}

void State::insert(const Literal& l) {
    auto it = std::lower_bound(literals_.begin(), literals_.end(), l);
    if (it != literals_.end() && *it == l) return;
    literals_.insert(it, l);
}

void State::erase(const Literal& l) {
    auto it = std::lower_bound(literals_.begin(), literals_.end(), l);
    if (it != literals_.end() && *it == l) literals_.erase(it);
}

bool Substitution::bind(const std::string& var, const std::string& constant) {
    auto [it, inserted] = bindings_.emplace(var, constant);
    return inserted || it->second == constant;
}

std::optional<std::string> Substitution::lookup(const std::string& var) const {
    auto it = bindings_.find(var);
    if (it == bindings_.end()) return std::nullopt;
    return it->second;
}

bool Substitution::consistent_with(const Substitution& other) const {
    for (const auto& [var, c] : other.bindings_) {
        auto it = bindings_.find(var);
        if (it != bindings_.end() && it->second != c) return false;
    }
    return true;
}

bool Substitution::merge(const Substitution& other) {
    if (!consistent_with(other)) return false;
    for (const auto& [var, c] : other.bindings_) bindings_.emplace(var, c);
    return true;
}

std::optional<Substitution> unify(const Literal& pattern, const Literal& ground) {
    if (pattern.predicate != ground.predicate) return std::nullopt;
    if (pattern.negated != ground.negated) return std::nullopt;
    if (pattern.args.size() != ground.args.size()) return std::nullopt;
    if (!is_grounded(ground)) return std::nullopt;
    Substitution sigma;
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
        const Term& p = pattern.args[i];
        const Term& g = ground.args[i];
        if (p.is_variable()) {
            if (!sigma.bind(p.name, g.name)) return std::nullopt;
        } else if (p.name != g.name) {
            return std::nullopt;
        }
    }
    return sigma;
}

Term apply_substitution(const Term& t, const Substitution& s) {
    if (t.is_variable()) {
        if (auto c = s.lookup(t.name)) return Term::constant(*c);
    }
    return t;
}

Literal apply_substitution(const Literal& l, const Substitution& s) {
    Literal out = l;
    for (Term& t : out.args) t = apply_substitution(t, s);
    return out;
}

State apply_substitution(const State& st, const Substitution& s) {
    std::vector<Literal> lits;
    lits.reserve(st.size());
    for (const Literal& l : st.literals()) lits.push_back(apply_substitution(l, s));
    return State(std::move(lits));
}

bool is_grounded(const Literal& l) {
    return std::none_of(l.args.begin(), l.args.end(),
                        [](const Term& t) { return t.is_variable(); });
}

bool is_grounded(const State& s) {
    return std::all_of(s.literals().begin(), s.literals().end(),
                       [](const Literal& l) { return is_grounded(l); });
}

namespace {

std::multiset<std::string> predicate_multiset(const std::vector<Literal>& lits) {
    std::multiset<std::string> out;
    for (const Literal& l : lits) out.insert(l.predicate);
    return out;
}

}  // namespace

bool semantically_equivalent(std::span<const State> a, std::span<const State> b,
                             const std::vector<LiteralCorrespondence>& mapping) {
    std::set<Literal> side_a, side_b;
    for (const State& s : a) side_a.insert(s.literals().begin(), s.literals().end());
    for (const State& s : b) side_b.insert(s.literals().begin(), s.literals().end());

    std::set<Literal> covered_a, covered_b;
    std::map<std::string, std::multiset<std::string>> renaming;
    for (const LiteralCorrespondence& c : mapping) {
        if (!side_a.count(c.upper)) {
            throw MalformedMapping("mapping references unknown literal " + to_string(c.upper));
        }
        for (const Literal& l : c.lower) {
            if (!side_b.count(l)) {
                throw MalformedMapping("mapping references unknown literal " + to_string(l));
            }
            if (l.predicate == c.upper.predicate &&
                (l.args.size() != c.upper.args.size() || l.negated != c.upper.negated)) {
                return false;
            }
            covered_b.insert(l);
        }
        if (c.lower.empty()) return false;
        auto preds = predicate_multiset(c.lower);
        auto [it, inserted] = renaming.emplace(c.upper.predicate, preds);
        if (!inserted && it->second != preds) return false;
        covered_a.insert(c.upper);
    }
    return covered_a == side_a && covered_b == side_b;
}

std::string to_string(const Term& t) {
    return t.is_variable() ? "?" + t.name : t.name;
}

std::string to_string(const Literal& l) {
    std::string out;
    if (l.negated) out += '!';
    out += l.predicate;
    if (!l.args.empty()) {
        out += '(';
        for (std::size_t i = 0; i < l.args.size(); ++i) {
            if (i) out += ',';
            out += to_string(l.args[i]);
        }
        out += ')';
    }
    return out;
}

std::string to_string(const State& s) {
    std::string out;
    for (std::size_t i = 0; i < s.literals().size(); ++i) {
        if (i) out += ',';
        out += to_string(s.literals()[i]);
    }
    return out;
}

std::string to_string(const Substitution& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& [var, c] : s.bindings()) {
        if (!first) out += ',';
        out += '?' + var + '=' + c;
        first = false;
    }
    return out + "}";
}

namespace {

bool valid_identifier(const std::string& s) {
    if (s.empty()) return false;
    for (char ch : s) {
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-')) {
            return false;
        }
    }
    return true;
}

Term parse_term(std::string text, const std::string& where) {
    bool variable = !text.empty() && text[0] == '?';
    if (variable) text.erase(0, 1);
    if (!valid_identifier(text)) {
        throw ModelError(where, "bad term '" + text + "'");
    }
    return variable ? Term::variable(std::move(text)) : Term::constant(std::move(text));
}

}  // namespace

Literal parse_literal(const std::string& text, const std::string& where) {
    Literal lit;
    std::string s = text;
    if (!s.empty() && s[0] == '!') {
        lit.negated = true;
        s.erase(0, 1);
    }
    auto open = s.find('(');
    if (open == std::string::npos) {
        if (!valid_identifier(s)) throw ModelError(where, "bad literal '" + text + "'");
        lit.predicate = s;
        return lit;
    }
    if (s.back() != ')') throw ModelError(where, "unbalanced parentheses in '" + text + "'");
    lit.predicate = s.substr(0, open);
    if (!valid_identifier(lit.predicate)) {
        throw ModelError(where, "bad predicate in '" + text + "'");
    }
    std::string inner = s.substr(open + 1, s.size() - open - 2);
    if (!inner.empty()) {
        std::stringstream ss(inner);
        std::string piece;
        while (std::getline(ss, piece, ',')) {
            while (!piece.empty() && piece.front() == ' ') piece.erase(0, 1);
            while (!piece.empty() && piece.back() == ' ') piece.pop_back();
            lit.args.push_back(parse_term(piece, where));
        }
    }
    return lit;
}

}  // namespace coop
