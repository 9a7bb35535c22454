#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

namespace maxref::sat {

// Conflict-driven SAT solver with watched literals, VSIDS, phase saving and
// Luby restarts. Variables are 1-based; clauses use DIMACS-style signed
// literals. Clauses may be added between solve() calls.
class Solver {
  public:
    enum class Result { Sat, Unsat, Unknown };

    Solver();
    ~Solver();
    Solver(const Solver&) = delete;
    Solver& operator=(const Solver&) = delete;

    void ensure_vars(int n);
    int new_var();
    int num_vars() const { return nvars_; }

    // Returns false if the clause makes the formula unsatisfiable at the
    // root level.
    bool add_clause(const std::vector<int>& lits);

    // Solves until a deadline (steady clock); no deadline when unset.
    Result solve();
    Result solve_until(std::chrono::steady_clock::time_point deadline);

    // Valid after Result::Sat: model()[v] is +1 or -1 for v in 1..num_vars.
    const std::vector<int8_t>& model() const { return model_; }

    void set_seed(uint64_t seed);
    uint64_t conflicts() const { return conflicts_; }

  private:
    struct Clause;
    struct Watcher {
        Clause* clause;
        uint32_t blocker;
    };

    // Internal literal encoding: 2*v + sign, v 0-based.
    static uint32_t ilit(int dimacs) {
        int v = dimacs > 0 ? dimacs : -dimacs;
        return static_cast<uint32_t>(2 * (v - 1) + (dimacs < 0));
    }
    static uint32_t neg(uint32_t l) { return l ^ 1; }
    static int var_of(uint32_t l) { return static_cast<int>(l >> 1); }

    bool value_true(uint32_t l) const { return assigns_[l >> 1] == ((l & 1) ? -1 : 1); }
    bool value_false(uint32_t l) const { return assigns_[l >> 1] == ((l & 1) ? 1 : -1); }
    bool unassigned(uint32_t l) const { return assigns_[l >> 1] == 0; }

    void attach(Clause* c);
    void detach(Clause* c);
    void enqueue(uint32_t l, Clause* reason);
    Clause* propagate();
    void analyze(Clause* confl, std::vector<uint32_t>& out, int& btLevel);
    bool lit_redundant(uint32_t l, uint32_t abstractLevels);
    void cancel_until(int level);
    int pick_branch();
    void bump_var(int v);
    void bump_clause(Clause* c);
    void decay_activities();
    void reduce_db();
    void heap_insert(int v);
    int heap_pop();
    void heap_update(int v);
    bool heap_less(int a, int b) const;
    void heap_sift_up(size_t i);
    void heap_sift_down(size_t i);

    int nvars_ = 0;
    bool ok_ = true;
    std::vector<int8_t> assigns_;       // per var: 0/1/-1
    std::vector<int8_t> phase_;         // saved phase per var
    std::vector<int> level_;            // per var
    std::vector<Clause*> reason_;       // per var
    std::vector<std::vector<Watcher>> watches_;  // per literal
    std::vector<uint32_t> trail_;
    std::vector<size_t> trail_lim_;
    size_t qhead_ = 0;

    std::vector<Clause*> clauses_;
    std::vector<Clause*> learnts_;

    std::vector<double> activity_;
    double var_inc_ = 1.0;
    double cla_inc_ = 1.0;
    std::vector<int> heap_;             // binary max-heap of vars
    std::vector<int> heap_pos_;         // -1 when absent

    std::vector<uint8_t> seen_;
    std::vector<uint32_t> analyze_stack_;

    uint64_t conflicts_ = 0;
    uint64_t rng_state_ = 0x9E3779B97F4A7C15ull;
    std::vector<int8_t> model_;
};

}  // namespace maxref::sat
