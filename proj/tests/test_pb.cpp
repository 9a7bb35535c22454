#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "maxrefactor/pb.hpp"
#include "maxrefactor/sat.hpp"

using namespace maxref;

namespace {

struct Counter : VarAllocator {
    int next;
    explicit Counter(int first) : next(first) {}
    int alloc_aux_var() override { return next++; }
};

// Counts assignments over vars 1..n (projected) for which the clause set is
// extensible to a full satisfying assignment.
int count_projected_models(const std::vector<std::vector<int>>& clauses, int n, int total_vars) {
    int count = 0;
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        sat::Solver s;
        s.ensure_vars(total_vars);
        bool ok = true;
        for (const auto& cl : clauses)
            if (!s.add_clause(cl)) ok = false;
        for (int v = 1; v <= n && ok; ++v)
            if (!s.add_clause({(mask >> (v - 1)) & 1 ? v : -v})) ok = false;
        if (ok && s.solve() == sat::Solver::Result::Sat) ++count;
    }
    return count;
}

}  // namespace

TEST_CASE("cardinality: bound not exceedable emits nothing") {
    Counter alloc(10);
    std::vector<std::vector<int>> out;
    lower_pb_card(1, {2}, 1, alloc, out);
    CHECK(out.empty());
    lower_pb_card(1, {2, 3, 4}, 3, alloc, out);
    CHECK(out.empty());
}

TEST_CASE("cardinality: pairwise at-most-one") {
    Counter alloc(10);
    std::vector<std::vector<int>> out;
    lower_pb_card(1, {2, 3}, 1, alloc, out);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == std::vector<int>{-1, -2, -3});
}

TEST_CASE("cardinality: guarded bound-2 over 6 literals matches brute force") {
    // guard = var 1, xs = vars 2..7
    Counter alloc(8);
    std::vector<std::vector<int>> out;
    std::vector<int> xs{2, 3, 4, 5, 6, 7};
    lower_pb_card(1, xs, 2, alloc, out);
    int want = 0;
    for (uint32_t mask = 0; mask < (1u << 7); ++mask) {
        bool guard = mask & 1;
        int sum = 0;
        for (int i = 1; i < 7; ++i) sum += (mask >> i) & 1;
        if (!guard || sum <= 2) ++want;
    }
    CHECK(count_projected_models(out, 7, alloc.next - 1) == want);
}

TEST_CASE("cardinality: random guarded bounds match brute force") {
    std::mt19937_64 rng(17);
    for (int iter = 0; iter < 25; ++iter) {
        int n = 2 + static_cast<int>(rng() % 5);
        int bound = static_cast<int>(rng() % (n + 1));
        std::vector<int> xs;
        for (int i = 0; i < n; ++i) xs.push_back(2 + i);
        Counter alloc(2 + n);
        std::vector<std::vector<int>> out;
        lower_pb_card(1, xs, bound, alloc, out);
        int want = 0;
        for (uint32_t mask = 0; mask < (1u << (n + 1)); ++mask) {
            bool guard = mask & 1;
            int sum = 0;
            for (int i = 1; i <= n; ++i) sum += (mask >> i) & 1;
            if (!guard || sum <= bound) ++want;
        }
        CHECK(count_projected_models(out, n + 1, alloc.next - 1) == want);
    }
}

TEST_CASE("weighted sum adder computes the exact binary value") {
    std::mt19937_64 rng(23);
    for (int iter = 0; iter < 20; ++iter) {
        int n = 1 + static_cast<int>(rng() % 6);
        std::vector<std::pair<int, uint64_t>> terms;
        for (int i = 0; i < n; ++i) terms.emplace_back(i + 1, 1 + rng() % 7);
        Counter alloc(n + 1);
        std::vector<std::vector<int>> out;
        std::vector<int> bits = encode_weighted_sum(terms, alloc, out);
        for (uint32_t mask = 0; mask < (1u << n); ++mask) {
            sat::Solver s;
            s.ensure_vars(alloc.next - 1);
            for (const auto& cl : out) s.add_clause(cl);
            uint64_t want = 0;
            for (int i = 0; i < n; ++i) {
                bool on = (mask >> i) & 1;
                s.add_clause({on ? i + 1 : -(i + 1)});
                if (on) want += terms[i].second;
            }
            REQUIRE(s.solve() == sat::Solver::Result::Sat);
            uint64_t got = 0;
            for (size_t b = 0; b < bits.size(); ++b)
                if (bits[b] != 0 && s.model()[bits[b]] > 0) got |= 1ull << b;
            CHECK(got == want);
        }
    }
}

TEST_CASE("adder plus comparator enforces the bound exactly") {
    std::mt19937_64 rng(31);
    for (int iter = 0; iter < 20; ++iter) {
        int n = 1 + static_cast<int>(rng() % 6);
        std::vector<std::pair<int, uint64_t>> terms;
        uint64_t total = 0;
        for (int i = 0; i < n; ++i) {
            terms.emplace_back(i + 1, 1 + rng() % 5);
            total += terms[i].second;
        }
        uint64_t bound = rng() % (total + 1);
        Counter alloc(n + 1);
        std::vector<std::vector<int>> out;
        std::vector<int> bits = encode_weighted_sum(terms, alloc, out);
        encode_leq_const(bits, bound, alloc, out);
        for (uint32_t mask = 0; mask < (1u << n); ++mask) {
            sat::Solver s;
            s.ensure_vars(alloc.next - 1);
            bool ok = true;
            for (const auto& cl : out)
                if (!s.add_clause(cl)) ok = false;
            uint64_t value = 0;
            for (int i = 0; i < n; ++i) {
                bool on = (mask >> i) & 1;
                if (ok && !s.add_clause({on ? i + 1 : -(i + 1)})) ok = false;
                if (on) value += terms[i].second;
            }
            bool sat = ok && s.solve() == sat::Solver::Result::Sat;
            CHECK(sat == (value <= bound));
        }
    }
}
