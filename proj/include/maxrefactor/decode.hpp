#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maxrefactor/encoder.hpp"
#include "maxrefactor/logic.hpp"

namespace maxref {

// One use of an invented rule inside one refactored rule.
struct AuxInstance {
    int aux;                   // 1-based index into RefactoringSolution::invented
    int t;                     // 1-based instance number within the rule
    std::vector<int> covered;  // input body literal indices, ascending
};

struct RefactoringSolution {
    std::vector<LinearAuxRule> invented;  // used slots only
    Program refactored;                   // invented rules first, then refactored rules
    std::vector<std::vector<AuxInstance>> coverage;  // per input rule
    int64_t objective = 0;                // output_size - input_size
    int input_size = 0;
    int output_size = 0;
    std::vector<std::string> warnings;
};

// Reconstructs the refactored program from a model. The model must satisfy
// the hard constraints (throws std::logic_error otherwise: an encoder or
// solver bug). Covered literals fill aux slots in body order; duplication
// slots repeat the first body literal of the predicate.
RefactoringSolution decode(const std::vector<int8_t>& model, const VariableLayout& layout,
                           const Program& input);

// Checks that the refactored program unfolds back to the input and that the
// size bookkeeping is exact. On failure the diagnostic names the first
// mismatch.
bool verify(const Program& input, const RefactoringSolution& sol,
            std::string* diagnostic = nullptr);

// Shared checker over an explicit (refactored, invented) split; also used
// for oracle witnesses and solution files.
bool verify_refactoring(const Program& input, const Program& refactored,
                        const std::vector<Rule>& invented, std::string* diagnostic = nullptr);

double compression_rate(int input_size, int output_size);
double normalized_gap(int best_size, int optimal_size, int input_size);

// Solution file: `%`-comment metadata followed by the refactored program.
std::string solution_to_text(const RefactoringSolution& sol);

}  // namespace maxref
