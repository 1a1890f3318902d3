#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "credal/simplex.hpp"
#include "support/lp_oracle.hpp"

using namespace credal;



TEST_CASE("min x1 on the segment x1+x2=1") {
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {1.0, 0.0};
    lp.rows = {{{1.0, 1.0}, '=', 1.0}};
    auto sol = simplex_solve(lp);
    REQUIRE(sol.status == LPStatus::optimal);
    CHECK(sol.value == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(sol.point[1] == doctest::Approx(1.0));
}

TEST_CASE("infeasible: x1 <= -1") {
    LinearProgram lp;
    lp.num_vars = 1;
    lp.objective = {1.0};
    lp.rows = {{{1.0}, '<', -1.0}};
    CHECK(simplex_solve(lp).status == LPStatus::infeasible);
}

TEST_CASE("unbounded: min -x1 with x1 - x2 <= 0") {
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {-1.0, 0.0};
    lp.rows = {{{1.0, -1.0}, '<', 0.0}};
    CHECK(simplex_solve(lp).status == LPStatus::unbounded);
}

TEST_CASE("degenerate and redundant rows are handled") {
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {-1.0, -2.0};
    lp.rows = {
        {{1.0, 1.0}, '=', 1.0},
        {{2.0, 2.0}, '=', 2.0}, // redundant copy
        {{1.0, 0.0}, '<', 0.5},
    };
    auto sol = simplex_solve(lp);
    REQUIRE(sol.status == LPStatus::optimal);
    CHECK(sol.value == doctest::Approx(-2.0));
}

TEST_CASE("random bounded LPs match exhaustive basic-solution enumeration") {
    std::mt19937_64 rng(20240817);
    std::uniform_int_distribution<int> nd(1, 6), md(1, 3);
    std::uniform_real_distribution<double> coef(-2.0, 2.0), rhs(0.2, 2.5);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        LinearProgram lp;
        lp.num_vars = nd(rng);
        lp.objective.resize(lp.num_vars);
        for (double& v : lp.objective) v = coef(rng);
        int m = md(rng);
        for (int i = 0; i < m; ++i) {
            LPRow r;
            r.coeffs.resize(lp.num_vars);
            for (double& v : r.coeffs) v = coef(rng);
            r.sense = (rng() % 3 == 0) ? '=' : '<';
            r.rhs = rhs(rng) * ((rng() % 4 == 0) ? -1.0 : 1.0);
            lp.rows.push_back(std::move(r));
        }
        // box row keeps everything bounded so the oracle is exact
        LPRow box;
        box.coeffs.assign(lp.num_vars, 1.0);
        box.sense = '<';
        box.rhs = 5.0;
        lp.rows.push_back(box);

        auto oracle = lp_oracle::bfs_enumerate(lp);
        auto sol = simplex_solve(lp);
        if (!oracle.feasible) {
            CHECK(sol.status == LPStatus::infeasible);
        } else {
            REQUIRE(sol.status == LPStatus::optimal);
            CHECK(std::abs(sol.value - oracle.value) < 1e-8);
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("dump_lp emits one constraint per line") {
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {1.0, 0.0};
    lp.rows = {{{1.0, 1.0}, '=', 1.0}, {{1.0, 0.0}, '<', 0.5}};
    auto text = dump_lp(lp);
    CHECK(text.find("min 1 0\n") == 0);
    CHECK(text.find("1 1 = 1") != std::string::npos);
    CHECK(text.find("1 0 <= 0.5") != std::string::npos);
}
