#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace coop {

/// Load-time and usage errors. `where` carries "file:line" when the error
/// originates from a model file.
class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
    ModelError(const std::string& where, const std::string& msg)
        : std::runtime_error(where + ": " + msg) {}
};

class MalformedMapping : public ModelError {
public:
    using ModelError::ModelError;
};

/// A term is either a constant or a variable. Variables are written with a
/// leading '?' in model files; `name` stores the identifier without it.
struct Term {
    enum class Kind { Constant, Variable };
    Kind kind = Kind::Constant;
    std::string name;

    static Term constant(std::string n) { return {Kind::Constant, std::move(n)}; }
    static Term variable(std::string n) { return {Kind::Variable, std::move(n)}; }
    bool is_variable() const { return kind == Kind::Variable; }

    friend auto operator<=>(const Term&, const Term&) = default;
};

/// A possibly negated atom: Pred(t1,...,tn). No function symbols, no
/// quantifiers; only flat literals.
struct Literal {
    std::string predicate;
    std::vector<Term> args;
    bool negated = false;

    friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// A conjunction of literals describing a cooperation state. Kept sorted and
/// deduplicated so value comparison is set comparison. A state may not
/// contain the same atom both negated and non-negated.
class State {
public:
    State() = default;
    explicit State(std::vector<Literal> lits);

    const std::vector<Literal>& literals() const { return literals_; }
    bool empty() const { return literals_.empty(); }
    std::size_t size() const { return literals_.size(); }
    bool contains(const Literal& l) const;

    void insert(const Literal& l);
    void erase(const Literal& l);

    friend bool operator==(const State&, const State&) = default;

private:
    std::vector<Literal> literals_;  // sorted, unique
};

/// Maps variable names to constants. No variable-to-variable chains.
class Substitution {
public:
    Substitution() = default;

    bool bind(const std::string& var, const std::string& constant);
    std::optional<std::string> lookup(const std::string& var) const;
    bool empty() const { return bindings_.empty(); }
    std::size_t size() const { return bindings_.size(); }
    const std::map<std::string, std::string>& bindings() const { return bindings_; }

    /// True when every binding of `other` agrees with this one.
    bool consistent_with(const Substitution& other) const;
    /// Adds all bindings of `other`; returns false on conflict.
    bool merge(const Substitution& other);

    friend bool operator==(const Substitution&, const Substitution&) = default;

private:
    std::map<std::string, std::string> bindings_;
};

/// Most general substitution sigma with sigma(pattern) == ground, when the
/// predicates, arity and negation match and `ground` carries no variables.
std::optional<Substitution> unify(const Literal& pattern, const Literal& ground);

Term apply_substitution(const Term& t, const Substitution& s);
Literal apply_substitution(const Literal& l, const Substitution& s);
State apply_substitution(const State& st, const Substitution& s);

bool is_grounded(const Literal& l);
bool is_grounded(const State& s);

/// One declared correspondence: a literal on the upper side stands for one or
/// more literals on the lower side.
struct LiteralCorrespondence {
    Literal upper;
    std::vector<Literal> lower;
};

/// Checks a declared correspondence between two conjunctions of states.
/// True iff the mapping covers every literal on both sides and each
/// correspondence is predicate/arity consistent up to a declared renaming
/// (the same upper predicate always maps to the same multiset of lower
/// predicates; where names coincide, arity and polarity must agree).
/// Throws MalformedMapping when a correspondence references a literal that
/// does not occur on its side.
bool semantically_equivalent(std::span<const State> a, std::span<const State> b,
                             const std::vector<LiteralCorrespondence>& mapping);

/// Rendering and parsing of the literal surface syntax used in model files:
/// Pred(arg1,arg2), !Pred(...) for negation, variables with a leading '?'.
std::string to_string(const Term& t);
std::string to_string(const Literal& l);
std::string to_string(const State& s);
std::string to_string(const Substitution& s);

/// Throws ModelError on malformed input; `where` is used in messages.
Literal parse_literal(const std::string& text, const std::string& where = "literal");

}  // namespace coop
