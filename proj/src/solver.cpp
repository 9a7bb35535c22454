#include "maxrefactor/solver.hpp"

#include <atomic>
#include <chrono>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "maxrefactor/pb.hpp"
#include "maxrefactor/sat.hpp"

namespace maxref {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Feasible: return "feasible";
        case SolveStatus::Unsat: return "unsat";
        case SolveStatus::Unknown: return "unknown";
    }
    return "unknown";
}

namespace {

struct CountingAllocator : VarAllocator {
    int next;
    explicit CountingAllocator(int first) : next(first) {}
    int alloc_aux_var() override { return next++; }
};

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Shared incumbent state for the (optional) portfolio.
struct Shared {
    std::mutex mu;
    int64_t best_cost = -1;  // -1: no model yet
    std::vector<int8_t> best_model;
    std::vector<Incumbent> incumbents;
    std::atomic<bool> proved_optimal{false};
    std::atomic<bool> hard_unsat{false};
};

void run_worker(const WcnfFormula& f, const SolveOptions& opts, uint64_t seed,
                Clock::time_point start, Clock::time_point deadline, Shared& shared) {
    sat::Solver solver;
    solver.ensure_vars(f.num_vars);
    bool ok = true;
    for (const auto& cl : f.hard)
        if (!solver.add_clause(cl)) ok = false;
    if (!ok) {
        shared.hard_unsat = true;
        return;
    }
    solver.set_seed(seed);

    CountingAllocator alloc(f.num_vars + 1);
    std::vector<std::vector<int>> adder;
    std::vector<std::pair<int, uint64_t>> terms;
    for (const auto& [lit, w] : f.soft) terms.emplace_back(-lit, static_cast<uint64_t>(w));
    std::vector<int> bits = encode_weighted_sum(terms, alloc, adder);
    for (const auto& cl : adder)
        if (!solver.add_clause(cl)) {
            shared.hard_unsat = true;  // cannot happen: the adder is functional
            return;
        }

    int64_t bounded_below = -1;  // a bound `cost <= bounded_below` is in force
    for (;;) {
        if (shared.proved_optimal || shared.hard_unsat) return;
        if (Clock::now() >= deadline) return;
        {
            std::lock_guard<std::mutex> lock(shared.mu);
            if (shared.best_cost == 0) {
                shared.proved_optimal = true;
                return;
            }
            if (shared.best_cost >= 0) {
                int64_t want = shared.best_cost - 1;
                if (bounded_below < 0 || want < bounded_below) {
                    std::vector<std::vector<int>> cmp;
                    encode_leq_const(bits, static_cast<uint64_t>(want), alloc, cmp);
                    bool consistent = true;
                    for (const auto& cl : cmp)
                        if (!solver.add_clause(cl)) consistent = false;
                    bounded_below = want;
                    if (!consistent) {
                        shared.proved_optimal = true;
                        return;
                    }
                }
            }
        }
        auto res = solver.solve_until(deadline);
        if (res == sat::Solver::Result::Unknown) return;  // deadline
        if (res == sat::Solver::Result::Unsat) {
            std::lock_guard<std::mutex> lock(shared.mu);
            if (shared.best_cost < 0) {
                shared.hard_unsat = true;
            } else if (bounded_below >= shared.best_cost - 1) {
                // Nothing below the incumbent: it is optimal.
                shared.proved_optimal = true;
            }
            // Otherwise another worker improved meanwhile; retry with the
            // tighter bound.
            if (shared.proved_optimal || shared.hard_unsat) return;
            continue;
        }
        std::vector<int8_t> model(solver.model().begin(),
                                  solver.model().begin() + f.num_vars + 1);
        int64_t cost = model_cost(f, model);
        bool improved = false;
        {
            std::lock_guard<std::mutex> lock(shared.mu);
            if (shared.best_cost < 0 || cost < shared.best_cost) {
                shared.best_cost = cost;
                shared.best_model = model;
                shared.incumbents.push_back({elapsed_s(start), cost});
                improved = true;
            }
        }
        if (improved && opts.on_incumbent) opts.on_incumbent(elapsed_s(start), cost);
    }
}

}  // namespace

SolveResult solve_wcnf(const WcnfFormula& f, const SolveOptions& opts) {
    if (opts.budget_seconds <= 0) throw std::invalid_argument("solve budget must be positive");
    if (opts.workers < 1) throw std::invalid_argument("worker count must be positive");

    auto start = Clock::now();
    auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                                std::chrono::duration<double>(opts.budget_seconds));
    Shared shared;
    if (opts.workers == 1) {
        run_worker(f, opts, opts.seed, start, deadline, shared);
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < opts.workers; ++w)
            threads.emplace_back([&, w] {
                run_worker(f, opts, opts.seed + static_cast<uint64_t>(w), start, deadline, shared);
            });
        for (auto& t : threads) t.join();
    }

    SolveResult result;
    result.incumbents = std::move(shared.incumbents);
    if (shared.hard_unsat) {
        result.status = SolveStatus::Unsat;
        result.error = "hard clauses are unsatisfiable";
        return result;
    }
    if (shared.best_cost < 0) {
        result.status = SolveStatus::Unknown;
        result.error = "no model found within the budget";
        return result;
    }
    result.model = std::move(shared.best_model);
    result.cost = shared.best_cost;
    result.status = shared.proved_optimal ? SolveStatus::Optimal : SolveStatus::Feasible;
    return result;
}

}  // namespace maxref
