#include "maxrefactor/sat.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace maxref::sat {

struct Solver::Clause {
    float activity = 0.0f;
    bool learnt = false;
    std::vector<uint32_t> lits;
};

namespace {

// Luby sequence for restart scheduling.
double luby(double y, int x) {
    int size, seq;
    for (size = 1, seq = 0; size < x + 1; seq++, size = 2 * size + 1) {
    }
    while (size - 1 != x) {
        size = (size - 1) >> 1;
        seq--;
        x = x % size;
    }
    return std::pow(y, seq);
}

}  // namespace

Solver::Solver() = default;

Solver::~Solver() {
    for (Clause* c : clauses_) delete c;
    for (Clause* c : learnts_) delete c;
}

void Solver::ensure_vars(int n) {
    while (nvars_ < n) new_var();
}

int Solver::new_var() {
    ++nvars_;
    assigns_.push_back(0);
    phase_.push_back(-1);  // default polarity: false
    level_.push_back(0);
    reason_.push_back(nullptr);
    activity_.push_back(0.0);
    watches_.emplace_back();
    watches_.emplace_back();
    seen_.push_back(0);
    heap_pos_.push_back(-1);
    heap_insert(nvars_ - 1);
    return nvars_;
}

void Solver::set_seed(uint64_t seed) {
    rng_state_ = seed * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull;
    // The seed only perturbs initial phases; the search itself is
    // deterministic given the clause set.
    for (int v = 0; v < nvars_; ++v) {
        rng_state_ ^= rng_state_ << 13;
        rng_state_ ^= rng_state_ >> 7;
        rng_state_ ^= rng_state_ << 17;
        phase_[v] = (rng_state_ & 3) == 0 ? 1 : -1;
    }
}

bool Solver::add_clause(const std::vector<int>& dimacs) {
    if (!ok_) return false;
    assert(trail_lim_.empty());
    std::vector<uint32_t> lits;
    lits.reserve(dimacs.size());
    for (int d : dimacs) {
        assert(d != 0);
        int v = d > 0 ? d : -d;
        ensure_vars(v);
        lits.push_back(ilit(d));
    }
    std::sort(lits.begin(), lits.end());
    std::vector<uint32_t> out;
    for (size_t i = 0; i < lits.size(); ++i) {
        uint32_t l = lits[i];
        if (i > 0 && l == lits[i - 1]) continue;
        if (i > 0 && l == neg(lits[i - 1])) return true;  // tautology
        if (value_true(l)) return true;                   // satisfied at root
        if (value_false(l)) continue;                     // falsified at root
        out.push_back(l);
    }
    if (out.empty()) {
        ok_ = false;
        return false;
    }
    if (out.size() == 1) {
        enqueue(out[0], nullptr);
        if (propagate() != nullptr) {
            ok_ = false;
            return false;
        }
        return true;
    }
    Clause* c = new Clause();
    c->lits = std::move(out);
    clauses_.push_back(c);
    attach(c);
    return true;
}

void Solver::attach(Clause* c) {
    watches_[neg(c->lits[0])].push_back({c, c->lits[1]});
    watches_[neg(c->lits[1])].push_back({c, c->lits[0]});
}

void Solver::detach(Clause* c) {
    for (uint32_t w : {neg(c->lits[0]), neg(c->lits[1])}) {
        auto& ws = watches_[w];
        for (size_t i = 0; i < ws.size(); ++i) {
            if (ws[i].clause == c) {
                ws[i] = ws.back();
                ws.pop_back();
                break;
            }
        }
    }
}

void Solver::enqueue(uint32_t l, Clause* reason) {
    int v = var_of(l);
    assigns_[v] = (l & 1) ? -1 : 1;
    phase_[v] = assigns_[v];
    level_[v] = static_cast<int>(trail_lim_.size());
    reason_[v] = reason;
    trail_.push_back(l);
}

Solver::Clause* Solver::propagate() {
    while (qhead_ < trail_.size()) {
        uint32_t p = trail_[qhead_++];
        auto& ws = watches_[p];
        size_t i = 0, j = 0;
        while (i < ws.size()) {
            Watcher w = ws[i];
            if (value_true(w.blocker)) {
                ws[j++] = ws[i++];
                continue;
            }
            Clause* c = w.clause;
            auto& lits = c->lits;
            // Make sure the false literal is lits[1].
            uint32_t false_lit = neg(p);
            if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
            uint32_t first = lits[0];
            if (first != w.blocker && value_true(first)) {
                ws[j++] = {c, first};
                ++i;
                continue;
            }
            bool found = false;
            for (size_t k = 2; k < lits.size(); ++k) {
                if (!value_false(lits[k])) {
                    std::swap(lits[1], lits[k]);
                    watches_[neg(lits[1])].push_back({c, first});
                    found = true;
                    break;
                }
            }
            if (found) {
                ++i;
                continue;
            }
            // Unit or conflict.
            ws[j++] = {c, first};
            ++i;
            if (value_false(first)) {
                while (i < ws.size()) ws[j++] = ws[i++];
                ws.resize(j);
                qhead_ = trail_.size();
                return c;
            }
            enqueue(first, c);
        }
        ws.resize(j);
    }
    return nullptr;
}

void Solver::analyze(Clause* confl, std::vector<uint32_t>& out, int& btLevel) {
    out.clear();
    out.push_back(0);  // placeholder for the asserting literal
    int pathC = 0;
    uint32_t p = UINT32_MAX;
    size_t index = trail_.size();
    int curLevel = static_cast<int>(trail_lim_.size());

    do {
        bump_clause(confl);
        for (uint32_t q : confl->lits) {
            if (q == p) continue;
            int v = var_of(q);
            if (!seen_[v] && level_[v] > 0) {
                seen_[v] = 1;
                bump_var(v);
                if (level_[v] >= curLevel)
                    ++pathC;
                else
                    out.push_back(q);
            }
        }
        while (!seen_[var_of(trail_[--index])]) {
        }
        p = trail_[index];
        confl = reason_[var_of(p)];
        seen_[var_of(p)] = 0;
        --pathC;
    } while (pathC > 0);
    out[0] = neg(p);

    // Conflict-clause minimisation: drop literals implied by the rest.
    uint32_t abstractLevels = 0;
    for (size_t i = 1; i < out.size(); ++i)
        abstractLevels |= 1u << (level_[var_of(out[i])] & 31);
    std::vector<uint32_t> kept;
    kept.push_back(out[0]);
    for (size_t i = 1; i < out.size(); ++i) {
        if (reason_[var_of(out[i])] == nullptr || !lit_redundant(out[i], abstractLevels))
            kept.push_back(out[i]);
    }
    out = std::move(kept);

    btLevel = 0;
    if (out.size() > 1) {
        size_t maxI = 1;
        for (size_t i = 2; i < out.size(); ++i)
            if (level_[var_of(out[i])] > level_[var_of(out[maxI])]) maxI = i;
        std::swap(out[1], out[maxI]);
        btLevel = level_[var_of(out[1])];
    }
    for (uint32_t q : out) seen_[var_of(q)] = 0;
    // seen_ flags set during lit_redundant are cleared there.
}

bool Solver::lit_redundant(uint32_t l, uint32_t abstractLevels) {
    analyze_stack_.clear();
    analyze_stack_.push_back(l);
    std::vector<int> toClear;
    while (!analyze_stack_.empty()) {
        uint32_t q = analyze_stack_.back();
        analyze_stack_.pop_back();
        Clause* c = reason_[var_of(q)];
        if (c == nullptr) {
            for (int v : toClear) seen_[v] = 0;
            return false;
        }
        for (uint32_t r : c->lits) {
            int v = var_of(r);
            if (r == q || seen_[v] || level_[v] == 0) continue;
            if (reason_[v] == nullptr || !((1u << (level_[v] & 31)) & abstractLevels)) {
                for (int u : toClear) seen_[u] = 0;
                return false;
            }
            seen_[v] = 1;
            toClear.push_back(v);
            analyze_stack_.push_back(r);
        }
    }
    for (int v : toClear) seen_[v] = 0;
    return true;
}

void Solver::cancel_until(int lvl) {
    if (static_cast<int>(trail_lim_.size()) <= lvl) return;
    for (size_t i = trail_.size(); i > trail_lim_[lvl];) {
        --i;
        int v = var_of(trail_[i]);
        assigns_[v] = 0;
        reason_[v] = nullptr;
        if (heap_pos_[v] < 0) heap_insert(v);
    }
    trail_.resize(trail_lim_[lvl]);
    trail_lim_.resize(lvl);
    qhead_ = trail_.size();
}

void Solver::bump_var(int v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
        for (double& a : activity_) a *= 1e-100;
        var_inc_ *= 1e-100;
    }
    if (heap_pos_[v] >= 0) heap_update(v);
}

void Solver::bump_clause(Clause* c) {
    if (!c->learnt) return;
    c->activity += static_cast<float>(cla_inc_);
    if (c->activity > 1e20f) {
        for (Clause* l : learnts_) l->activity *= 1e-20f;
        cla_inc_ *= 1e-20;
    }
}

void Solver::decay_activities() {
    var_inc_ /= 0.95;
    cla_inc_ /= 0.999;
}

void Solver::reduce_db() {
    std::vector<Clause*> sorted = learnts_;
    std::stable_sort(sorted.begin(), sorted.end(), [](Clause* a, Clause* b) {
        if ((a->lits.size() > 2) != (b->lits.size() > 2)) return a->lits.size() > 2;
        return a->activity < b->activity;
    });
    size_t limit = sorted.size() / 2;
    std::vector<Clause*> keep;
    for (size_t i = 0; i < sorted.size(); ++i) {
        Clause* c = sorted[i];
        bool locked = false;
        for (uint32_t l : c->lits) {
            if (reason_[var_of(l)] == c && value_true(l)) {
                locked = true;
                break;
            }
        }
        if (i < limit && !locked && c->lits.size() > 2) {
            detach(c);
            delete c;
        } else {
            keep.push_back(c);
        }
    }
    learnts_ = std::move(keep);
}

bool Solver::heap_less(int a, int b) const {
    if (activity_[a] != activity_[b]) return activity_[a] > activity_[b];
    return a < b;
}

void Solver::heap_insert(int v) {
    heap_pos_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    heap_sift_up(heap_.size() - 1);
}

void Solver::heap_sift_up(size_t i) {
    int v = heap_[i];
    while (i > 0) {
        size_t parent = (i - 1) / 2;
        if (!heap_less(v, heap_[parent])) break;
        heap_[i] = heap_[parent];
        heap_pos_[heap_[i]] = static_cast<int>(i);
        i = parent;
    }
    heap_[i] = v;
    heap_pos_[v] = static_cast<int>(i);
}

void Solver::heap_sift_down(size_t i) {
    int v = heap_[i];
    for (;;) {
        size_t child = 2 * i + 1;
        if (child >= heap_.size()) break;
        if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child])) ++child;
        if (!heap_less(heap_[child], v)) break;
        heap_[i] = heap_[child];
        heap_pos_[heap_[i]] = static_cast<int>(i);
        i = child;
    }
    heap_[i] = v;
    heap_pos_[v] = static_cast<int>(i);
}

void Solver::heap_update(int v) {
    heap_sift_up(heap_pos_[v]);
}

int Solver::heap_pop() {
    int v = heap_[0];
    heap_pos_[v] = -1;
    heap_[0] = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
        heap_pos_[heap_[0]] = 0;
        heap_sift_down(0);
    }
    return v;
}

int Solver::pick_branch() {
    while (!heap_.empty()) {
        int v = heap_pop();
        if (assigns_[v] == 0) return v;
    }
    return -1;
}

Solver::Result Solver::solve() {
    return solve_until(std::chrono::steady_clock::time_point::max());
}

Solver::Result Solver::solve_until(std::chrono::steady_clock::time_point deadline) {
    if (!ok_) return Result::Unsat;
    cancel_until(0);
    if (propagate() != nullptr) {
        ok_ = false;
        return Result::Unsat;
    }

    const bool hasDeadline = deadline != std::chrono::steady_clock::time_point::max();
    int restarts = 0;
    uint64_t confl_since_restart = 0;
    double restart_limit = 100.0 * luby(2.0, restarts);
    uint64_t max_learnts = std::max<uint64_t>(4000, clauses_.size() / 3);
    std::vector<uint32_t> learnt;

    for (;;) {
        Clause* confl = propagate();
        if (confl != nullptr) {
            ++conflicts_;
            ++confl_since_restart;
            if (trail_lim_.empty()) {
                ok_ = false;
                return Result::Unsat;
            }
            int btLevel;
            analyze(confl, learnt, btLevel);
            cancel_until(btLevel);
            if (learnt.size() == 1) {
                enqueue(learnt[0], nullptr);
            } else {
                Clause* c = new Clause();
                c->learnt = true;
                c->lits = learnt;
                learnts_.push_back(c);
                attach(c);
                bump_clause(c);
                enqueue(learnt[0], c);
            }
            decay_activities();
            if ((conflicts_ & 1023) == 0 && hasDeadline &&
                std::chrono::steady_clock::now() >= deadline) {
                cancel_until(0);
                return Result::Unknown;
            }
        } else {
            if (confl_since_restart >= restart_limit) {
                ++restarts;
                confl_since_restart = 0;
                restart_limit = 100.0 * luby(2.0, restarts);
                cancel_until(0);
                continue;
            }
            if (learnts_.size() >= max_learnts + trail_.size()) {
                reduce_db();
                max_learnts = max_learnts * 11 / 10;
            }
            int v = pick_branch();
            if (v < 0) {
                model_.assign(nvars_ + 1, 0);
                for (int u = 0; u < nvars_; ++u) model_[u + 1] = assigns_[u];
                cancel_until(0);
                return Result::Sat;
            }
            trail_lim_.push_back(trail_.size());
            enqueue(phase_[v] > 0 ? static_cast<uint32_t>(2 * v) : static_cast<uint32_t>(2 * v + 1),
                    nullptr);
        }
    }
}

}  // namespace maxref::sat
