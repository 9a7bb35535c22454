#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "maxrefactor/sat.hpp"

using maxref::sat::Solver;

namespace {

using Cnf = std::vector<std::vector<int>>;

bool brute_force_sat(const Cnf& cnf, int nvars) {
    for (uint32_t mask = 0; mask < (1u << nvars); ++mask) {
        bool ok = true;
        for (const auto& cl : cnf) {
            bool sat = false;
            for (int l : cl) {
                int v = std::abs(l) - 1;
                bool val = (mask >> v) & 1;
                if ((l > 0) == val) {
                    sat = true;
                    break;
                }
            }
            if (!sat) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    }
    return false;
}

bool model_satisfies(const Cnf& cnf, const std::vector<int8_t>& model) {
    for (const auto& cl : cnf) {
        bool sat = false;
        for (int l : cl) {
            int v = std::abs(l);
            if ((l > 0) == (model[v] > 0)) {
                sat = true;
                break;
            }
        }
        if (!sat) return false;
    }
    return true;
}

Cnf random_cnf(std::mt19937_64& rng, int nvars, int nclauses, int width) {
    Cnf cnf;
    for (int i = 0; i < nclauses; ++i) {
        std::vector<int> cl;
        int w = 1 + static_cast<int>(rng() % width);
        for (int j = 0; j < w; ++j) {
            int v = 1 + static_cast<int>(rng() % nvars);
            cl.push_back(rng() % 2 ? v : -v);
        }
        cnf.push_back(cl);
    }
    return cnf;
}

}  // namespace

TEST_CASE("agrees with brute force on random small formulas") {
    std::mt19937_64 rng(42);
    int sat_count = 0, unsat_count = 0;
    for (int iter = 0; iter < 300; ++iter) {
        int nvars = 3 + static_cast<int>(rng() % 10);
        int nclauses = 2 + static_cast<int>(rng() % (4 * nvars));
        Cnf cnf = random_cnf(rng, nvars, nclauses, 3);
        Solver s;
        s.ensure_vars(nvars);
        bool root_ok = true;
        for (const auto& cl : cnf)
            if (!s.add_clause(cl)) root_ok = false;
        bool expect = brute_force_sat(cnf, nvars);
        if (!root_ok) {
            CHECK_FALSE(expect);
            ++unsat_count;
            continue;
        }
        auto res = s.solve();
        if (expect) {
            REQUIRE(res == Solver::Result::Sat);
            CHECK(model_satisfies(cnf, s.model()));
            ++sat_count;
        } else {
            CHECK(res == Solver::Result::Unsat);
            ++unsat_count;
        }
    }
    // The corpus exercises both outcomes.
    CHECK(sat_count > 50);
    CHECK(unsat_count > 50);
}

TEST_CASE("pigeonhole 4 into 3 is unsat") {
    // var(p, h) for p in 0..3, h in 0..2
    auto v = [](int p, int h) { return 3 * p + h + 1; };
    Solver s;
    for (int p = 0; p < 4; ++p) s.add_clause({v(p, 0), v(p, 1), v(p, 2)});
    for (int h = 0; h < 3; ++h)
        for (int p1 = 0; p1 < 4; ++p1)
            for (int p2 = p1 + 1; p2 < 4; ++p2) s.add_clause({-v(p1, h), -v(p2, h)});
    CHECK(s.solve() == Solver::Result::Unsat);
}

TEST_CASE("incremental clause addition") {
    Solver s;
    s.add_clause({1, 2});
    REQUIRE(s.solve() == Solver::Result::Sat);
    s.add_clause({-1});
    REQUIRE(s.solve() == Solver::Result::Sat);
    CHECK(s.model()[2] > 0);
    s.add_clause({-2});
    CHECK(s.solve() == Solver::Result::Unsat);
    // Stays unsat.
    CHECK(s.solve() == Solver::Result::Unsat);
}

TEST_CASE("unit and contradiction handling at the root") {
    Solver s;
    CHECK(s.add_clause({1}));
    CHECK_FALSE(s.add_clause({-1}));
    CHECK(s.solve() == Solver::Result::Unsat);
}

TEST_CASE("deterministic given a seed") {
    std::mt19937_64 rng(9);
    Cnf cnf = random_cnf(rng, 30, 90, 3);
    auto run = [&](uint64_t seed) {
        Solver s;
        s.ensure_vars(30);
        for (const auto& cl : cnf) s.add_clause(cl);
        s.set_seed(seed);
        auto r = s.solve();
        std::vector<int8_t> m = r == Solver::Result::Sat ? s.model() : std::vector<int8_t>{};
        return std::pair(r, m);
    };
    auto a = run(5), b = run(5);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
}
