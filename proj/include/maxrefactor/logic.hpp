#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace maxref {

// A literal is a predicate symbol applied to variables. Variables are
// rule-local indices; constants and function symbols are not supported.
struct Literal {
    std::string pred;
    std::vector<int> args;

    int arity() const { return static_cast<int>(args.size()); }
    bool operator==(const Literal&) const = default;
    bool operator<(const Literal& o) const {
        if (pred != o.pred) return pred < o.pred;
        return args < o.args;
    }
};

// Definite rule `head :- body`. The body is duplicate-free (set semantics)
// but keeps insertion order for printing. Variables are numbered by first
// occurrence, head first.
struct Rule {
    Literal head;
    std::vector<Literal> body;
    int var_count = 0;

    int size() const { return static_cast<int>(body.size()) + 1; }
};

// Normalises a rule: drops duplicate body literals, renumbers variables by
// first occurrence and recomputes var_count.
Rule make_rule(Literal head, std::vector<Literal> body);

struct Program {
    std::vector<Rule> rules;
    std::map<std::string, int> predicate_table;  // every symbol -> arity

    bool empty() const { return rules.empty(); }
};

int program_size(const Program& p);

// Body predicate symbols with their arities; symbols that only occur in
// heads are excluded.
std::map<std::string, int> body_predicates(const Program& p);

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(int line, int column, const std::string& msg);
};

// Parses the rule file format: `head :- b1, ..., bn.` or `head.`, one or
// more rules, `%` comments, variables uppercase, predicates lowercase,
// zero-arity literals written bare. Duplicate body literals are dropped
// with a warning appended to `warnings` when given.
Program parse_program(std::string_view text, std::vector<std::string>* warnings = nullptr);

// Canonical printer; variables are renamed V0, V1, ... by first occurrence.
std::string to_string(const Literal& lit);
std::string to_string(const Rule& r);
std::string to_string(const Program& p);

bool rules_alpha_equal(const Rule& a, const Rule& b);

// True iff there is a bijection between the rule multisets such that paired
// rules are equal up to variable renaming and body order.
bool alpha_equal(const Program& a, const Program& b);

// Unfolding `p` upon `r`: every rule whose body contains literals with
// pred(head(r)) is replaced by the resolvent against r, resolving all such
// occurrences in one pass with r's variables renamed apart per occurrence.
// Throws std::invalid_argument if r has variables that only occur in its
// body.
Program unfold(const Program& p, const Rule& r);

// Successively unfolds upon every rule in `s` until no rule body mentions a
// head predicate of `s`. The rules in `s` must not be recursive or
// reference each other.
Program unfold_all(const Program& p, const std::vector<Rule>& s);

// An invented rule in canonical linear form: only the per-predicate body
// multiplicities matter, the variables are assigned linearly.
struct LinearAuxRule {
    std::string name;
    std::map<std::string, int> counts;  // pred -> multiplicity >= 1

    // Canonical slot ordering: (predicate lexicographically, copy index).
    std::vector<std::pair<std::string, int>> slot_order() const;
    int body_size() const;
    int head_arity(const std::map<std::string, int>& arities) const;
    Rule to_rule(const std::map<std::string, int>& arities) const;
};

// Rewrites an invented-rule body so every variable occurs once; only the
// predicate multiset survives.
LinearAuxRule linearize(const Rule& r);

}  // namespace maxref
