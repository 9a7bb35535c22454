#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "maxrefactor/logic.hpp"
#include "maxrefactor/pb.hpp"

namespace maxref {

struct EncodeOptions {
    // Lexicographic ordering between the invented-rule template vectors;
    // the K slots are interchangeable otherwise.
    bool symmetry_breaking = true;
    // Candidate-set mode: every invented rule must match one of these body
    // count patterns (or stay empty), and no pattern may be used twice.
    std::optional<std::vector<std::map<std::string, int>>> candidates;
};

// Identity of one decision variable.
struct VarTag {
    enum Family { R, Use, Cover, Used, Covered, Aux } family = Aux;
    int k = 0;      // R/Use/Cover/Used, 1-based invented-rule slot
    int pred = -1;  // R: index into preds()
    int m = 0;      // R: multiplicity, 1-based
    int rule = -1;  // Use/Cover/Covered: rule index
    int lit = -1;   // Cover/Covered: body literal index
    int t = 0;      // Use/Cover: instance index, 1-based
};

// Bijection between the decision-variable families and solver ids. Ids are
// allocated family by family (r, use, cover, used, covered) with nested
// loops in deterministic order; helper variables from clause-side encodings
// come last.
class VariableLayout : public VarAllocator {
  public:
    VariableLayout(const Program& p, int k, const EncodeOptions& opts = {});

    int K() const { return K_; }
    const std::vector<std::string>& preds() const { return preds_; }
    int pred_index(const std::string& p) const;
    int arity(int pred) const { return arities_[pred]; }
    int num_rules() const { return static_cast<int>(rules_.size()); }
    int body_size(int rule) const { return static_cast<int>(rules_[rule].size()); }
    int body_pred(int rule, int lit) const { return rules_[rule][lit]; }
    int total_body_literals() const;

    // Per-predicate multiplicity bound: the maximum number of occurrences
    // in any single input rule.
    int m_max(int pred) const { return m_max_[pred]; }
    // Per-rule instance bound: the maximum occurrence count over the
    // rule's own predicates.
    int t_max(int rule) const { return t_max_[rule]; }

    int r_var(int k, int pred, int m) const;
    int use_var(int rule, int k, int t) const;
    int cover_var(int rule, int lit, int k, int t) const;
    int used_var(int k) const;
    int covered_var(int rule, int lit) const;

    int num_vars() const { return static_cast<int>(tags_.size()); }
    const VarTag& tag(int id) const { return tags_[id - 1]; }

    int alloc_aux_var() override;

    const EncodeOptions& options() const { return opts_; }

  private:
    int add(const VarTag& tag);

    int K_;
    EncodeOptions opts_;
    std::vector<std::string> preds_;  // sorted body predicates
    std::vector<int> arities_;
    std::map<std::string, int> pred_index_;
    std::vector<std::vector<int>> rules_;  // body literal -> pred index
    std::vector<int> m_max_;
    std::vector<int> t_max_;
    std::vector<VarTag> tags_;
    // id lookup tables, all 1-based ids
    std::vector<std::vector<std::vector<int>>> r_ids_;        // [k][pred][m-1]
    std::vector<std::vector<std::vector<int>>> use_ids_;      // [rule][k][t-1]
    std::vector<std::vector<std::vector<std::vector<int>>>> cover_ids_;  // [rule][lit][k][t-1]
    std::vector<int> used_ids_;                               // [k]
    std::vector<std::vector<int>> covered_ids_;               // [rule][lit]
};

// Guarded cardinality atom: guard -> (sum of lits <= bound).
struct CardinalityAtom {
    int guard;
    std::vector<int> lits;
    int bound;
};

struct ConstraintIR {
    std::vector<std::vector<int>> hard;
    std::vector<CardinalityAtom> cards;
};

struct Objective {
    std::vector<std::pair<int, int64_t>> soft;  // unit soft literal, weight
    int64_t offset = 0;  // model cost + offset = objective value
};

ConstraintIR emit_constraints(VariableLayout& layout);
Objective emit_objective(const VariableLayout& layout);

struct WcnfFormula {
    int num_vars = 0;
    std::vector<std::vector<int>> hard;
    std::vector<std::pair<int, int64_t>> soft;
    int64_t offset = 0;

    int64_t top_weight() const;
};

// Lowers the IR (cardinality atoms included) into the final formula,
// allocating helper variables in the layout.
WcnfFormula to_wcnf(const ConstraintIR& ir, const Objective& obj, VariableLayout& layout);

struct Encoding {
    VariableLayout layout;
    WcnfFormula wcnf;
};

Encoding encode(const Program& p, int k, const EncodeOptions& opts = {});

// DIMACS serialisation; classic `p wcnf` header by default, the header-less
// 2022 format when fmt2022 is set.
std::string to_dimacs(const WcnfFormula& f, bool fmt2022 = false);

// Model utilities. Models index variables 1..num_vars with +1/-1.
bool model_satisfies_hard(const WcnfFormula& f, const std::vector<int8_t>& model);
int64_t model_cost(const WcnfFormula& f, const std::vector<int8_t>& model);

// Checks the decision-variable families of a model against the constraint
// semantics directly (independent of the clause lowering). Returns a
// description of the first violation, if any.
std::optional<std::string> check_model_semantics(const std::vector<int8_t>& model,
                                                 const VariableLayout& layout);

// Objective value of a model evaluated directly over the families.
int64_t model_objective(const std::vector<int8_t>& model, const VariableLayout& layout);

}  // namespace maxref
