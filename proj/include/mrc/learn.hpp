// learn.hpp - minimax-risk learning over moment-box uncertainty sets.
//
// The learner solves, over (mu_a, mu_b >= 0, nu free),
//
//   minimize  b.mu_b - a.mu_a - nu
//   s.t.      sum_{y in C} [Phi_i (mu_a - mu_b)]_y + |C| nu <= 1 - |C|
//             for every unique instance matrix Phi_i and nonempty C subset Y,
//
// whose optimum is the worst-case expected 0-1 loss (the upper bound) and
// whose solution (mu* = mu_a - mu_b, nu*) parameterizes the classifier. The
// subset rows linearize the positive-part constraint
// ||(Phi_i mu + (nu+1) 1)_+||_1 <= 1, so there are r (2^|Y| - 1) of them.
// A companion LP over the same variables with rows
// Phi_i(mu_a-mu_b) + nu 1 <= q_i yields tight expected-loss bounds for any
// rule q; with the fitted rule it recovers the upper bound and, negated,
// the lower bound.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrc/error.hpp"
#include "mrc/feature_map.hpp"
#include "mrc/lp.hpp"
#include "mrc/matrix.hpp"

namespace mrc {

enum class EstimateMode { Interval, Point };

struct LearnConfig {
    EstimateMode mode = EstimateMode::Interval;
    std::size_t max_labels_for_subsets = 10;  // refuse 2^|Y| blowup past this
    bool compute_lower_bound = false;
};

struct MrcModel {
    FeatureMap feature_map;
    std::vector<double> mu;  // mu_a* - mu_b*
    double nu = 0.0;
    double upper_bound = 0.0;
    std::optional<double> lower_bound;
    ExpectationEstimates estimates;
};

namespace detail {

// Positive-part scores (Phi_x mu + (nu+1) 1)_+ for one instance matrix, and
// their sum. This is the shared arithmetic behind prediction and the
// lower-bound rule rows.
struct RuleScores {
    std::vector<double> positive;  // per label
    double total = 0.0;            // the normalizer
};

inline RuleScores positive_part_scores(const Matrix& phi, std::span<const double> mu, double nu) {
    RuleScores rs;
    rs.positive.resize(phi.rows);
    for (std::size_t y = 0; y < phi.rows; ++y) {
        double s = nu + 1.0;
        auto row = phi.row(y);
        for (std::size_t l = 0; l < phi.cols; ++l) s += row[l] * mu[l];
        rs.positive[y] = s > 0.0 ? s : 0.0;
        rs.total += rs.positive[y];
    }
    return rs;
}

// Label probabilities of the fitted rule at an instance matrix: normalized
// positive parts, or uniform when every score is clipped to zero.
inline std::vector<double> rule_probabilities(const Matrix& phi, std::span<const double> mu,
                                              double nu) {
    RuleScores rs = positive_part_scores(phi, mu, nu);
    std::vector<double> p(phi.rows);
    if (rs.total > 0.0) {
        for (std::size_t y = 0; y < phi.rows; ++y) p[y] = rs.positive[y] / rs.total;
    } else {
        for (std::size_t y = 0; y < phi.rows; ++y) p[y] = 1.0 / static_cast<double>(phi.rows);
    }
    return p;
}

}  // namespace detail

// Linearized constraint rows over the variable layout [mu_a | mu_b | nu]:
// one row per (matrix, nonempty label subset) pair.
inline std::vector<LpConstraint> enumerate_subset_constraints(const std::vector<Matrix>& matrices,
                                                              std::size_t max_labels = 10) {
    if (matrices.empty()) throw std::invalid_argument("enumerate_subset_constraints: no matrices");
    if (max_labels < 2) throw std::invalid_argument("enumerate_subset_constraints: cap too small");
    const std::size_t labels = matrices.front().rows;
    const std::size_t m = matrices.front().cols;
    if (labels > max_labels)
        throw TooManyLabels("subset enumeration needs 2^" + std::to_string(labels) +
                            " rows per matrix; cap is " + std::to_string(max_labels) + " labels");

    std::vector<LpConstraint> rows;
    const std::size_t subsets = (std::size_t{1} << labels) - 1;
    rows.reserve(matrices.size() * subsets);
    for (const Matrix& phi : matrices) {
        for (std::size_t mask = 1; mask <= subsets; ++mask) {
            LpConstraint row;
            row.coeffs.assign(2 * m + 1, 0.0);
            std::size_t size = 0;
            for (std::size_t y = 0; y < labels; ++y) {
                if (!(mask & (std::size_t{1} << y))) continue;
                ++size;
                auto phi_row = phi.row(y);
                for (std::size_t l = 0; l < m; ++l) {
                    row.coeffs[l] += phi_row[l];        // mu_a
                    row.coeffs[m + l] -= phi_row[l];    // mu_b
                }
            }
            row.coeffs[2 * m] = static_cast<double>(size);  // nu
            row.rhs = 1.0 - static_cast<double>(size);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

// Optimal value of the bounding LP for rule values q (one value per
// (matrix, label) pair):
//
//   minimize  b.mu_b - a.mu_a - nu
//   s.t.      [Phi_i (mu_a - mu_b)]_y + nu <= q[i][y]
//
// With q = h - 1 this is the tight upper bound on the expected loss of rule
// h over the moment box; with q = 1 - h its negation is the tight lower
// bound.
inline double kappa_bound_for_rule(const ExpectationEstimates& est,
                                   const std::vector<Matrix>& matrices,
                                   const std::vector<std::vector<double>>& q) {
    if (matrices.empty()) throw std::invalid_argument("kappa_bound_for_rule: no matrices");
    if (q.size() != matrices.size())
        throw std::invalid_argument("kappa_bound_for_rule: q does not match matrices");
    const std::size_t m = matrices.front().cols;
    const std::size_t labels = matrices.front().rows;

    LinearProgram lp(2 * m + 1);
    lp.var_bounds[2 * m] = VarBound::Free;
    for (std::size_t l = 0; l < m; ++l) {
        lp.objective[l] = -est.a[l];
        lp.objective[m + l] = est.b[l];
    }
    lp.objective[2 * m] = -1.0;

    lp.constraints.reserve(matrices.size() * labels);
    for (std::size_t i = 0; i < matrices.size(); ++i) {
        if (q[i].size() != labels)
            throw std::invalid_argument("kappa_bound_for_rule: q row arity");
        for (std::size_t y = 0; y < labels; ++y) {
            LpConstraint row;
            row.coeffs.assign(2 * m + 1, 0.0);
            auto phi_row = matrices[i].row(y);
            for (std::size_t l = 0; l < m; ++l) {
                row.coeffs[l] = phi_row[l];
                row.coeffs[m + l] = -phi_row[l];
            }
            row.coeffs[2 * m] = 1.0;
            row.rhs = q[i][y];
            lp.constraints.push_back(std::move(row));
        }
    }

    LpSolution sol = detail::solve_lp_auto(lp);
    if (sol.status == LpStatus::Unbounded)
        throw UncertaintySetEmpty("the moment box contains no distribution");
    if (sol.status != LpStatus::Optimal)
        throw NumericalBreakdown("bounding problem unexpectedly infeasible");
    return sol.objective_value;
}

// Tight lower bound on the expected loss of the fitted rule: build the
// rule's label probabilities from the positive-part scores (uniform where
// the normalizer vanishes), then negate the bounding LP at q = 1 - rule.
// The result is range-checked against [0, upper_bound], never clamped.
inline double lower_bound(const MrcModel& model, const std::vector<Matrix>& matrices) {
    std::vector<std::vector<double>> q;
    q.reserve(matrices.size());
    for (const Matrix& phi : matrices) {
        std::vector<double> h = detail::rule_probabilities(phi, model.mu, model.nu);
        for (double& v : h) v = 1.0 - v;
        q.push_back(std::move(h));
    }
    double value = -kappa_bound_for_rule(model.estimates, matrices, q);
    if (value < -1e-6 || value > model.upper_bound + 1e-6)
        throw NumericalBreakdown("lower bound escaped [0, upper_bound]: " + std::to_string(value));
    return value;
}

// Fit the minimax rule for the given estimates over the given unique
// instance matrices. Point mode optimizes a single free mu against tau;
// Interval mode optimizes the split mu_a/mu_b against [a, b]. The LP optimum
// is the upper risk bound. Throws UncertaintySetEmpty when the problem is
// unbounded below, which certifies that no distribution matches the
// estimates (cannot happen for estimates taken from a dataset, whose
// empirical distribution is always in the box).
inline MrcModel fit(const FeatureMap& fm, const ExpectationEstimates& est, const LearnConfig& cfg,
                    const std::vector<Matrix>& matrices) {
    const std::size_t m = fm.feature_count();
    if (est.tau.size() != m) throw std::invalid_argument("fit: estimates do not match features");
    if (matrices.empty()) throw std::invalid_argument("fit: no instance matrices");

    std::vector<LpConstraint> rows =
        enumerate_subset_constraints(matrices, cfg.max_labels_for_subsets);

    LpSolution sol;
    MrcModel model;
    model.feature_map = fm;
    model.estimates = est;

    if (cfg.mode == EstimateMode::Point) {
        // Variables [mu (free) | nu (free)]; rows shrink to mu coefficients.
        LinearProgram lp(m + 1);
        for (std::size_t j = 0; j <= m; ++j) lp.var_bounds[j] = VarBound::Free;
        for (std::size_t l = 0; l < m; ++l) lp.objective[l] = -est.tau[l];
        lp.objective[m] = -1.0;
        lp.constraints.reserve(rows.size());
        for (const LpConstraint& r : rows) {
            LpConstraint c;
            c.coeffs.assign(m + 1, 0.0);
            for (std::size_t l = 0; l < m; ++l) c.coeffs[l] = r.coeffs[l];
            c.coeffs[m] = r.coeffs[2 * m];
            c.rhs = r.rhs;
            lp.constraints.push_back(std::move(c));
        }
        sol = detail::solve_lp_auto(lp);
        if (sol.status == LpStatus::Unbounded)
            throw UncertaintySetEmpty("no distribution matches the point estimates");
        if (sol.status != LpStatus::Optimal)
            throw NumericalBreakdown("learning problem unexpectedly infeasible");
        model.mu.assign(sol.primal.begin(), sol.primal.begin() + static_cast<long>(m));
        model.nu = sol.primal[m];
    } else {
        LinearProgram lp(2 * m + 1);
        lp.var_bounds[2 * m] = VarBound::Free;
        for (std::size_t l = 0; l < m; ++l) {
            lp.objective[l] = -est.a[l];
            lp.objective[m + l] = est.b[l];
        }
        lp.objective[2 * m] = -1.0;
        lp.constraints = std::move(rows);
        sol = detail::solve_lp_auto(lp);
        if (sol.status == LpStatus::Unbounded)
            throw UncertaintySetEmpty("the moment box contains no distribution");
        if (sol.status != LpStatus::Optimal)
            throw NumericalBreakdown("learning problem unexpectedly infeasible");
        model.mu.resize(m);
        for (std::size_t l = 0; l < m; ++l) model.mu[l] = sol.primal[l] - sol.primal[m + l];
        model.nu = sol.primal[2 * m];
    }
    model.upper_bound = sol.objective_value;

    if (cfg.compute_lower_bound) model.lower_bound = lower_bound(model, matrices);
    return model;
}

enum class WorstCase { Max, Min };

// Reference computation for tiny explicit domains: optimize the expected
// 0-1 loss of rule h directly over distributions p on X x Y subject to
// a <= E_p[features] <= b. Exact up to LP tolerances; exponential in
// |X| |Y|, so the domain is capped at 64 cells.
inline double worst_case_oracle(const FeatureMap& fm, const ExpectationEstimates& est,
                                const std::vector<std::vector<double>>& instances,
                                const Matrix& rule, WorstCase direction) {
    const std::size_t nx = instances.size();
    const std::size_t ny = fm.num_labels;
    if (nx == 0 || nx * ny > 64)
        throw std::invalid_argument("worst_case_oracle: domain must have 1..64 cells");
    if (rule.rows != nx || rule.cols != ny)
        throw std::invalid_argument("worst_case_oracle: rule table shape");
    const std::size_t m = fm.feature_count();

    std::vector<Matrix> phis;
    phis.reserve(nx);
    for (const auto& x : instances)
        phis.push_back(instance_matrix(fm, std::span<const double>(x)));

    LinearProgram lp(nx * ny);
    for (std::size_t xi = 0; xi < nx; ++xi) {
        for (std::size_t y = 0; y < ny; ++y) {
            double loss = 1.0 - rule(xi, y);
            lp.objective[xi * ny + y] = direction == WorstCase::Max ? -loss : loss;
        }
    }

    // Total mass one.
    lp.add_eq(std::vector<double>(nx * ny, 1.0), 1.0);

    // Moment box rows.
    for (std::size_t l = 0; l < m; ++l) {
        std::vector<double> coeff(nx * ny, 0.0);
        for (std::size_t xi = 0; xi < nx; ++xi)
            for (std::size_t y = 0; y < ny; ++y) coeff[xi * ny + y] = phis[xi](y, l);
        lp.add_le(coeff, est.b[l]);
        for (double& c : coeff) c = -c;
        lp.add_le(std::move(coeff), -est.a[l]);
    }

    LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::Infeasible)
        throw UncertaintySetEmpty("no distribution on the explicit domain matches the box");
    if (sol.status != LpStatus::Optimal)
        throw NumericalBreakdown("explicit-domain problem unexpectedly unbounded");
    return direction == WorstCase::Max ? -sol.objective_value : sol.objective_value;
}

}  // namespace mrc
