// test_lp.cpp - unit tests for the LP model and simplex solver.
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <vector>

#include "lp_oracle.hpp"
#include "mrc/lp.hpp"
#include "mrc/rng.hpp"

using namespace mrc;

TEST_CASE("lp_single_variable_vertex") {
    // minimize -x s.t. x <= 1, x >= 0  ->  x = 1, objective -1.
    LinearProgram lp(1);
    lp.objective = {-1.0};
    lp.add_le({1.0}, 1.0);
    LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(std::abs(s.primal[0] - 1.0) < 1e-9);
    CHECK(std::abs(s.objective_value + 1.0) < 1e-9);
}

TEST_CASE("lp_contradictory_bounds_infeasible") {
    // minimize x s.t. x <= -1, x >= 0.
    LinearProgram lp(1);
    lp.objective = {1.0};
    lp.add_le({1.0}, -1.0);
    CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("lp_two_variable_vertex_matches_enumeration") {
    // minimize -x-y s.t. x+2y <= 4, 3x+y <= 6. Enumerating all 2-constraint
    // intersections, the best feasible vertex is (8/5, 6/5) with value -14/5.
    LinearProgram lp(2);
    lp.objective = {-1.0, -1.0};
    lp.add_le({1.0, 2.0}, 4.0);
    lp.add_le({3.0, 1.0}, 6.0);

    lp_oracle::Reference ref = lp_oracle::solve(lp);
    REQUIRE(ref.status == LpStatus::Optimal);
    CHECK(std::abs(ref.objective - (-2.8)) < 1e-12);

    LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(std::abs(s.objective_value - (-2.8)) < 1e-9);
    CHECK(std::abs(s.primal[0] - 1.6) < 1e-9);
    CHECK(std::abs(s.primal[1] - 1.2) < 1e-9);
}

TEST_CASE("lp_unbounded_without_constraints") {
    LinearProgram lp(1);
    lp.objective = {-1.0};
    CHECK(solve_lp(lp).status == LpStatus::Unbounded);
}

TEST_CASE("lp_equality_rows") {
    // minimize x+y s.t. x+y = 2, x-y <= 0.
    LinearProgram lp(2);
    lp.objective = {1.0, 1.0};
    lp.add_eq({1.0, 1.0}, 2.0);
    lp.add_le({1.0, -1.0}, 0.0);
    LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(std::abs(s.objective_value - 2.0) < 1e-9);
}

TEST_CASE("lp_redundant_rows_are_dropped") {
    // Duplicated and linearly dependent equalities leave phase 1 with basic
    // artificials that cannot pivot out; those rows must be dropped, not
    // reported infeasible.
    LinearProgram lp(2);
    lp.objective = {1.0, 0.0};
    lp.add_eq({1.0, 1.0}, 1.0);
    lp.add_eq({1.0, 1.0}, 1.0);
    lp.add_eq({2.0, 2.0}, 2.0);
    LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(std::abs(s.objective_value) < 1e-9);  // x = 0, y = 1
    CHECK(std::abs(s.primal[1] - 1.0) < 1e-9);
    REQUIRE(s.duals.size() == 3);

    // Contradictory near-duplicates stay infeasible.
    LinearProgram bad(2);
    bad.add_eq({1.0, 1.0}, 1.0);
    bad.add_eq({1.0, 1.0}, 2.0);
    CHECK(solve_lp(bad).status == LpStatus::Infeasible);
}

TEST_CASE("lp_degenerate_vertices_terminate") {
    // Many redundant active constraints at the optimum force degenerate
    // pivots; the stall guard must hand over to Bland's rule and finish.
    const std::size_t n = 6;
    LinearProgram lp(n);
    for (std::size_t j = 0; j < n; ++j) lp.objective[j] = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(n, 1.0);
        row[i] = 2.0;
        lp.add_le(std::move(row), 0.0);  // rhs 0: the origin is the only vertex
    }
    std::vector<double> all(n, 1.0);
    lp.add_le(std::move(all), 0.0);
    LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(std::abs(s.objective_value) < 1e-9);
}

TEST_CASE("standard_form_free_variable_split") {
    // One nonnegative, one free variable. The free one wants to go negative.
    LinearProgram lp(2);
    lp.objective = {1.0, 1.0};
    lp.var_bounds[1] = VarBound::Free;
    lp.add_ge({1.0, 0.0}, 0.0);
    lp.add_ge({0.0, 1.0}, -3.0);  // stored negated: -y <= 3

    StandardForm sf = to_standard_form(lp);
    REQUIRE(sf.lp.num_vars == 3);
    for (VarBound b : sf.lp.var_bounds) CHECK(b == VarBound::NonNegative);

    // Round-trip of a feasible point preserves the objective exactly.
    std::vector<double> z = {2.0, 0.0, 3.0};  // x=2, y = 0 - 3
    std::vector<double> x = sf.recover(z);
    CHECK(x[0] == 2.0);
    CHECK(x[1] == -3.0);
    double orig_obj = lp.objective[0] * x[0] + lp.objective[1] * x[1];
    double std_obj = 0.0;
    for (std::size_t j = 0; j < 3; ++j) std_obj += sf.lp.objective[j] * z[j];
    CHECK(orig_obj == std_obj);

    LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(std::abs(s.objective_value - (-3.0)) < 1e-9);
    CHECK(std::abs(s.primal[1] - (-3.0)) < 1e-9);
}

TEST_CASE("standard_form_ge_is_negated_le") {
    LinearProgram lp(1);
    lp.add_ge({2.0}, 5.0);
    REQUIRE(lp.constraints.size() == 1);
    CHECK(lp.constraints[0].rel == Relation::LessEq);
    CHECK(lp.constraints[0].coeffs[0] == -2.0);
    CHECK(lp.constraints[0].rhs == -5.0);
}

namespace {

// Random LP with small integer-ish coefficients; nonnegative variables only
// so the enumeration oracle applies.
LinearProgram random_lp(mrc::rng::Stream& rs, std::size_t max_vars, std::size_t max_rows) {
    std::size_t n = 1 + rs.next_below(max_vars);
    std::size_t m = 1 + rs.next_below(max_rows);
    LinearProgram lp(n);
    for (std::size_t j = 0; j < n; ++j)
        lp.objective[j] = static_cast<double>(static_cast<long>(rs.next_below(11)) - 5);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> row(n);
        for (std::size_t j = 0; j < n; ++j)
            row[j] = static_cast<double>(static_cast<long>(rs.next_below(11)) - 5);
        double rhs = static_cast<double>(static_cast<long>(rs.next_below(21)) - 6);
        if (rs.next_below(6) == 0)
            lp.add_eq(std::move(row), rhs);
        else
            lp.add_le(std::move(row), rhs);
    }
    return lp;
}

}  // namespace

TEST_CASE("lp_random_problems_match_vertex_enumeration") {
    // 1000 random LPs with <= 4 variables and <= 6 constraints: status must
    // match the oracle, objectives within 1e-7, and the returned point must
    // be (near) one of the feasible vertices.
    mrc::rng::Stream rs(20240001ull);
    int optimal_count = 0;
    for (int t = 0; t < 1000; ++t) {
        LinearProgram lp = random_lp(rs, 4, 6);
        lp_oracle::Reference ref = lp_oracle::solve(lp);
        LpSolution s = solve_lp(lp);
        REQUIRE_MESSAGE(s.status == ref.status, "case ", t);
        if (s.status != LpStatus::Optimal) continue;
        ++optimal_count;
        CHECK_MESSAGE(std::abs(s.objective_value - ref.objective) < 1e-7, "case ", t,
                      " got ", s.objective_value, " want ", ref.objective);
        double nearest = 1e300;
        for (const auto& v : ref.vertices) {
            double d = 0.0;
            for (std::size_t j = 0; j < lp.num_vars; ++j)
                d = std::max(d, std::abs(v[j] - s.primal[j]));
            nearest = std::min(nearest, d);
        }
        CHECK_MESSAGE(nearest < 1e-6, "case ", t, " solution is not a vertex");
    }
    CHECK(optimal_count > 200);  // the generator must exercise the Optimal path
}

TEST_CASE("lp_mixed_free_vars_agree_with_standard_form_oracle") {
    // Random 3-var LPs with free variables: solving the original must agree
    // with the enumeration oracle applied to the (all-nonnegative) standard form.
    mrc::rng::Stream rs(77002ull);
    for (int t = 0; t < 300; ++t) {
        LinearProgram lp = random_lp(rs, 3, 4);
        for (std::size_t j = 0; j < lp.num_vars; ++j)
            if (rs.next_below(2) == 0) lp.var_bounds[j] = VarBound::Free;
        StandardForm sf = to_standard_form(lp);
        lp_oracle::Reference ref = lp_oracle::solve(sf.lp);
        LpSolution s = solve_lp(lp);
        REQUIRE_MESSAGE(s.status == ref.status, "case ", t);
        if (s.status == LpStatus::Optimal)
            CHECK_MESSAGE(std::abs(s.objective_value - ref.objective) < 1e-9 * (1.0 + std::abs(ref.objective)),
                          "case ", t);
    }
}

TEST_CASE("lp_weak_duality_and_multipliers") {
    // The reported multipliers must be dual feasible, reproduce the optimal
    // value, and any feasible primal point must dominate the dual value.
    mrc::rng::Stream rs(421788ull);
    int checked = 0;
    for (int t = 0; t < 300; ++t) {
        LinearProgram lp = random_lp(rs, 4, 5);
        LpSolution s = solve_lp(lp);
        if (s.status != LpStatus::Optimal) continue;
        ++checked;
        REQUIRE(s.duals.size() == lp.constraints.size());

        double dual_value = 0.0;
        for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
            dual_value += s.duals[i] * lp.constraints[i].rhs;
            if (lp.constraints[i].rel == Relation::LessEq)
                CHECK(s.duals[i] <= 1e-9);  // minimization convention
        }
        CHECK(std::abs(dual_value - s.objective_value) < 1e-6 * (1.0 + std::abs(dual_value)));

        // Dual feasibility: (A^T y)_j <= c_j for nonnegative variables.
        for (std::size_t j = 0; j < lp.num_vars; ++j) {
            double aty = 0.0;
            for (std::size_t i = 0; i < lp.constraints.size(); ++i)
                aty += lp.constraints[i].coeffs[j] * s.duals[i];
            CHECK(aty <= lp.objective[j] + 1e-6);
        }

        // Weak duality against every enumerated feasible vertex.
        lp_oracle::Reference ref = lp_oracle::solve(lp);
        for (const auto& x : ref.vertices) {
            double cx = 0.0;
            for (std::size_t j = 0; j < lp.num_vars; ++j) cx += lp.objective[j] * x[j];
            CHECK(cx >= dual_value - 1e-6);
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("lp_dual_route_matches_direct_route") {
    mrc::rng::Stream rs(90125ull);
    for (int t = 0; t < 200; ++t) {
        LinearProgram lp = random_lp(rs, 4, 6);
        for (std::size_t j = 0; j < lp.num_vars; ++j)
            if (rs.next_below(3) == 0) lp.var_bounds[j] = VarBound::Free;
        LpSolution direct = solve_lp(lp);
        LpSolution via_dual = detail::solve_lp_via_dual(lp);
        REQUIRE_MESSAGE(direct.status == via_dual.status, "case ", t);
        if (direct.status == LpStatus::Optimal)
            CHECK_MESSAGE(std::abs(direct.objective_value - via_dual.objective_value) <
                              1e-6 * (1.0 + std::abs(direct.objective_value)),
                          "case ", t);
    }
}

TEST_CASE("lp_determinism_bit_identical") {
    mrc::rng::Stream rs(555ull);
    for (int t = 0; t < 50; ++t) {
        LinearProgram lp = random_lp(rs, 4, 6);
        LpSolution a = solve_lp(lp);
        LpSolution b = solve_lp(lp);
        REQUIRE(a.status == b.status);
        if (a.status != LpStatus::Optimal) continue;
        REQUIRE(a.primal.size() == b.primal.size());
        CHECK(std::memcmp(a.primal.data(), b.primal.data(), a.primal.size() * sizeof(double)) == 0);
        CHECK(std::memcmp(&a.objective_value, &b.objective_value, sizeof(double)) == 0);
    }
}

TEST_CASE("lp_numerical_breakdown_on_repeated_tiny_pivots") {
    // Every candidate pivot sits in the marginal band just above 1e-12, so
    // the solver must give up rather than loop or fabricate an answer.
    const std::size_t n = 40;
    LinearProgram lp(n);
    for (std::size_t j = 0; j < n; ++j) lp.objective[j] = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> row(n, 0.0);
        row[j] = 1e-10;
        lp.add_le(std::move(row), 1.0);
    }
    CHECK_THROWS_AS(solve_lp(lp), NumericalBreakdown);
}

TEST_CASE("lp_rejects_malformed_input") {
    LinearProgram lp(2);
    lp.constraints.push_back({{1.0}, Relation::LessEq, 1.0});  // wrong arity
    CHECK_THROWS_AS(solve_lp(lp), std::invalid_argument);
}
