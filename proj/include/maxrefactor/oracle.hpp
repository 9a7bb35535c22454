#pragma once

#include <cstdint>

#include "maxrefactor/decode.hpp"
#include "maxrefactor/logic.hpp"

namespace maxref {

enum class OracleSpace { Linear, General };

// The oracle is a test fixture: instances outside these bounds are
// rejected rather than attempted.
struct OracleConfig {
    int max_rules = 3;
    int max_body = 4;
    int max_predicates = 3;
    int k = 1;
    int max_aux_body_size = 8;
    OracleSpace space = OracleSpace::Linear;
    // Validation slack on the per-predicate multiplicity bound; larger
    // multiplicities only add duplication slots and can never help.
    int m_slack = 0;
};

struct OracleResult {
    int min_size = 0;
    Program refactored;          // witness, invented rules first
    std::vector<Rule> invented;  // witness invented rules
    uint64_t nodes_explored = 0;
    double wall_seconds = 0.0;
};

// Exhaustive minimum over refactorings with at most cfg.k invented rules
// from the configured space.
OracleResult oracle_optimum(const Program& p, const OracleConfig& cfg);

// True iff restricting the invented-rule space to linear rules does not
// change the optimum.
bool check_linear_sufficiency(const Program& p, OracleConfig cfg);

}  // namespace maxref
