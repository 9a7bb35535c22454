#pragma once

#include <functional>
#include <string>
#include <vector>

#include "maxrefactor/encoder.hpp"

namespace maxref {

enum class SolveStatus { Optimal, Feasible, Unsat, Unknown };

const char* to_string(SolveStatus s);

struct Incumbent {
    double seconds;
    int64_t cost;
};

struct SolveResult {
    SolveStatus status = SolveStatus::Unknown;
    std::vector<int8_t> model;  // 1-based, +1/-1; set for Optimal/Feasible
    int64_t cost = 0;
    std::vector<Incumbent> incumbents;  // strictly decreasing costs
    std::string error;
};

struct SolveOptions {
    double budget_seconds = 60.0;
    uint64_t seed = 0;
    // Independent seeded searches merged through the incumbent callback;
    // the default is a single deterministic worker.
    int workers = 1;
    std::function<void(double, int64_t)> on_incumbent;
};

// Solution-improving linear search over the builtin CDCL core: satisfy,
// bound the falsified soft weight below the incumbent, repeat until unsat.
SolveResult solve_wcnf(const WcnfFormula& f, const SolveOptions& opts = {});

struct ExternalSolverOptions {
    std::vector<std::string> command;  // argv prefix; the wcnf path is appended
    double budget_seconds = 60.0;
    bool fmt2022 = false;
    std::function<void(double, int64_t)> on_incumbent;
};

// Runs an external MaxSAT solver on the exported formula and parses the
// `s`/`o`/`v` output lines. Returned models are re-checked against the hard
// clauses before being accepted.
SolveResult solve_external(const WcnfFormula& f, const ExternalSolverOptions& opts);

}  // namespace maxref
