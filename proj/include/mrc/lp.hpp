// lp.hpp - dense linear program model and a two-phase revised simplex solver.
//
// The model is intentionally small: minimize c.z subject to rows of the form
// a.z <= u or a.z == u, with each variable either nonnegative or free.
// Greater-equal rows are negated at build time via add_ge.
//
// The solver keeps an explicit basis inverse, prices with Dantzig's rule and
// switches permanently to Bland's rule when a long degenerate stall is
// detected, which guarantees termination. Feasibility is established by a
// phase-1 problem over artificial variables. Row multipliers (duals) are
// reported alongside the primal solution.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "mrc/error.hpp"

namespace mrc {

enum class Relation { LessEq, Eq };

enum class VarBound { NonNegative, Free };  // lower bound 0 or -inf; upper is always +inf

struct LpConstraint {
    std::vector<double> coeffs;
    Relation rel = Relation::LessEq;
    double rhs = 0.0;
};

struct LinearProgram {
    std::size_t num_vars = 0;
    std::vector<double> objective;        // length num_vars, minimized
    std::vector<LpConstraint> constraints;
    std::vector<VarBound> var_bounds;     // length num_vars

    explicit LinearProgram(std::size_t n = 0)
        : num_vars(n), objective(n, 0.0), var_bounds(n, VarBound::NonNegative) {}

    void add_le(std::vector<double> coeffs, double rhs) {
        constraints.push_back({std::move(coeffs), Relation::LessEq, rhs});
    }
    void add_eq(std::vector<double> coeffs, double rhs) {
        constraints.push_back({std::move(coeffs), Relation::Eq, rhs});
    }
    // a.z >= u stored as (-a).z <= -u.
    void add_ge(std::vector<double> coeffs, double rhs) {
        for (double& c : coeffs) c = -c;
        constraints.push_back({std::move(coeffs), Relation::LessEq, -rhs});
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double objective_value = 0.0;       // valid iff Optimal
    std::vector<double> primal;         // valid iff Optimal, length num_vars
    // Row multipliers, one per constraint, valid iff Optimal. Convention for
    // minimization: objective_value == duals . rhs, duals <= 0 on LessEq rows,
    // free on Eq rows, and (A^T duals)_j <= c_j for nonnegative variables with
    // equality for free variables. Rows found redundant carry multiplier 0.
    std::vector<double> duals;
};

// A nonnegative-variable copy of an LP plus the bookkeeping needed to map
// points back. Free variables keep their column and get a paired negative
// part appended at the end.
struct StandardForm {
    LinearProgram lp;
    std::vector<std::size_t> negative_part;  // per original var, npos if not split
    std::size_t original_vars = 0;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::vector<double> recover(const std::vector<double>& std_point) const {
        std::vector<double> x(original_vars);
        for (std::size_t i = 0; i < original_vars; ++i) {
            x[i] = std_point[i];
            if (negative_part[i] != npos) x[i] -= std_point[negative_part[i]];
        }
        return x;
    }
};

namespace detail {

inline void validate_lp(const LinearProgram& lp) {
    if (lp.objective.size() != lp.num_vars || lp.var_bounds.size() != lp.num_vars)
        throw std::invalid_argument("linear program: objective/bounds length mismatch");
    for (const LpConstraint& c : lp.constraints)
        if (c.coeffs.size() != lp.num_vars)
            throw std::invalid_argument("linear program: constraint length mismatch");
}

// Tolerances (double precision, modest conditioning).
inline constexpr double kFeasTol = 1e-7;     // constraint satisfaction
inline constexpr double kPivotTol = 1e-9;    // acceptable pivot magnitude
inline constexpr double kDualTol = 1e-9;     // reduced-cost optimality
inline constexpr double kTinyPivot = 1e-11;  // below this a column is treated as zero
inline constexpr int kMaxWeakPivots = 30;    // consecutive pivots in (kTinyPivot, kPivotTol]
inline constexpr int kStallLimit = 200;      // degenerate steps before switching to Bland

// Revised simplex over the equality form A x = b, x >= 0 built from a
// standard-form LP (all variables nonnegative).
class SimplexSolver {
  public:
    explicit SimplexSolver(const LinearProgram& std_lp) { build(std_lp); }

    struct Result {
        LpStatus status = LpStatus::Infeasible;
        std::vector<double> x;       // standard-form variables
        std::vector<double> duals;   // per input constraint
    };

    Result run() {
        Result out;
        if (rows_ == 0) {
            // Only variable bounds: x = 0 is optimal unless some cost is negative.
            for (std::size_t j = 0; j < n_struct_; ++j) {
                if (cost2_[j] < -kDualTol) {
                    out.status = LpStatus::Unbounded;
                    return out;
                }
            }
            out.status = LpStatus::Optimal;
            out.x.assign(n_vars_, 0.0);
            return out;
        }
        if (n_art_ > 0) {
            std::vector<double> phase1_cost(n_total_, 0.0);
            for (std::size_t j = n_struct_; j < n_total_; ++j) phase1_cost[j] = 1.0;
            PhaseEnd end = run_phase(phase1_cost, n_total_);
            if (end == PhaseEnd::Unbounded)
                throw NumericalBreakdown("phase 1 reported unbounded");
            double infeas = 0.0;
            for (std::size_t i = 0; i < rows_; ++i)
                if (basis_[i] >= static_cast<int>(n_struct_)) infeas += std::max(xb_[i], 0.0);
            if (infeas > kFeasTol) {
                out.status = LpStatus::Infeasible;
                return out;
            }
            drive_out_artificials();
        }
        PhaseEnd end = run_phase(cost2_, n_struct_);
        if (end == PhaseEnd::Unbounded) {
            out.status = LpStatus::Unbounded;
            return out;
        }
        refactorize();  // tighten xb before extraction
        out.status = LpStatus::Optimal;
        out.x.assign(n_vars_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            int j = basis_[i];
            if (j >= 0 && j < static_cast<int>(n_vars_)) out.x[j] = std::max(xb_[i], 0.0);
        }
        out.duals = extract_duals();
        return out;
    }

  private:
    enum class PhaseEnd { Optimal, Unbounded };

    std::size_t rows_ = 0;      // kept equality rows
    std::size_t n_vars_ = 0;    // standard-form variables
    std::size_t n_struct_ = 0;  // variables + slacks
    std::size_t n_total_ = 0;   // + artificials
    std::size_t n_art_ = 0;
    std::vector<std::vector<double>> col_;  // column-major, n_total_ columns of length rows_
    std::vector<double> b_;
    std::vector<double> cost2_;             // phase-2 cost per column (0 on slacks/artificials)
    std::vector<int> basis_;                // per row: column index
    std::vector<char> in_basis_;            // per column
    std::vector<double> binv_;              // rows_ x rows_, row-major
    std::vector<double> xb_;                // basic values
    std::vector<int> row_origin_;           // kept row -> input constraint index
    std::vector<int> row_sign_;             // +1 kept as-is, -1 negated at build
    std::size_t num_input_rows_ = 0;
    bool bland_ = false;
    long iterations_ = 0;

    void build(const LinearProgram& lp) {
        num_input_rows_ = lp.constraints.size();
        rows_ = num_input_rows_;
        n_vars_ = lp.num_vars;
        std::size_t n_slack = 0;
        for (const LpConstraint& c : lp.constraints)
            if (c.rel == Relation::LessEq) ++n_slack;
        n_struct_ = n_vars_ + n_slack;

        col_.assign(n_struct_, std::vector<double>(rows_, 0.0));
        b_.assign(rows_, 0.0);
        basis_.assign(rows_, -1);
        row_origin_.resize(rows_);
        row_sign_.assign(rows_, 1);

        std::size_t slack_at = n_vars_;
        for (std::size_t i = 0; i < rows_; ++i) {
            const LpConstraint& c = lp.constraints[i];
            row_origin_[i] = static_cast<int>(i);
            double sign = 1.0;
            if (c.rhs < 0.0) {
                sign = -1.0;
                row_sign_[i] = -1;
            }
            for (std::size_t j = 0; j < n_vars_; ++j)
                if (c.coeffs[j] != 0.0) col_[j][i] = sign * c.coeffs[j];
            b_[i] = sign * c.rhs;
            if (c.rel == Relation::LessEq) {
                col_[slack_at][i] = sign;
                if (sign > 0.0) basis_[i] = static_cast<int>(slack_at);
                ++slack_at;
            }
        }

        // Artificial columns for rows without a unit slack start.
        for (std::size_t i = 0; i < rows_; ++i) {
            if (basis_[i] >= 0) continue;
            col_.emplace_back(rows_, 0.0);
            col_.back()[i] = 1.0;
            basis_[i] = static_cast<int>(col_.size() - 1);
            ++n_art_;
        }
        n_total_ = n_struct_ + n_art_;

        cost2_.assign(n_total_, 0.0);
        for (std::size_t j = 0; j < n_vars_; ++j) cost2_[j] = lp.objective[j];

        in_basis_.assign(n_total_, 0);
        for (std::size_t i = 0; i < rows_; ++i) in_basis_[basis_[i]] = 1;

        // Initial basis columns are unit vectors, so B = I.
        binv_.assign(rows_ * rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) binv_[i * rows_ + i] = 1.0;
        xb_ = b_;
    }

    // binv_ <- inverse of the current basis matrix; xb_ <- binv_ * b_.
    void refactorize() {
        const std::size_t n = rows_;
        if (n == 0) return;
        std::vector<double> aug(n * 2 * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::vector<double>& c = col_[basis_[i]];
            for (std::size_t r = 0; r < n; ++r) aug[r * 2 * n + i] = c[r];
            aug[i * 2 * n + n + i] = 1.0;
        }
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            double best = std::abs(aug[k * 2 * n + k]);
            for (std::size_t r = k + 1; r < n; ++r) {
                double v = std::abs(aug[r * 2 * n + k]);
                if (v > best) { best = v; piv = r; }
            }
            if (best < 1e-12)
                throw NumericalBreakdown("singular basis during refactorization");
            if (piv != k)
                for (std::size_t jj = 0; jj < 2 * n; ++jj)
                    std::swap(aug[piv * 2 * n + jj], aug[k * 2 * n + jj]);
            double inv = 1.0 / aug[k * 2 * n + k];
            for (std::size_t jj = 0; jj < 2 * n; ++jj) aug[k * 2 * n + jj] *= inv;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == k) continue;
                double f = aug[r * 2 * n + k];
                if (f == 0.0) continue;
                for (std::size_t jj = 0; jj < 2 * n; ++jj)
                    aug[r * 2 * n + jj] -= f * aug[k * 2 * n + jj];
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) binv_[i * n + j] = aug[i * 2 * n + n + j];
        recompute_xb();
    }

    void recompute_xb() {
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            const double* row = binv_.data() + i * rows_;
            for (std::size_t j = 0; j < rows_; ++j) s += row[j] * b_[j];
            if (s < 0.0) {
                if (s < -1e-5) throw NumericalBreakdown("basic solution drifted infeasible");
                s = 0.0;
            }
            xb_[i] = s;
        }
    }

    std::vector<double> ftran(const std::vector<double>& a) const {
        std::vector<double> w(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            const double* row = binv_.data() + i * rows_;
            for (std::size_t j = 0; j < rows_; ++j) s += row[j] * a[j];
            w[i] = s;
        }
        return w;
    }

    std::vector<double> btran(const std::vector<double>& cost) const {
        std::vector<double> y(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            double cb = cost[basis_[i]];
            if (cb == 0.0) continue;
            const double* row = binv_.data() + i * rows_;
            for (std::size_t j = 0; j < rows_; ++j) y[j] += cb * row[j];
        }
        return y;
    }

    void pivot(std::size_t r, std::size_t q, const std::vector<double>& w, double theta) {
        double inv = 1.0 / w[r];
        double* prow = binv_.data() + r * rows_;
        for (std::size_t j = 0; j < rows_; ++j) prow[j] *= inv;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == r) continue;
            double f = w[i];
            if (f == 0.0) continue;
            double* row = binv_.data() + i * rows_;
            for (std::size_t j = 0; j < rows_; ++j) row[j] -= f * prow[j];
            xb_[i] -= theta * f;
            if (xb_[i] < 0.0 && xb_[i] > -kFeasTol) xb_[i] = 0.0;
        }
        xb_[r] = theta;
        in_basis_[basis_[r]] = 0;
        in_basis_[q] = 1;
        basis_[r] = static_cast<int>(q);
    }

    PhaseEnd run_phase(const std::vector<double>& cost, std::size_t allowed_cols) {
        const long max_iter = 5000 + 50L * static_cast<long>(rows_ + n_total_);
        int weak_pivots = 0;
        int stall = 0;
        long local_iter = 0;
        while (true) {
            if (++local_iter > max_iter)
                throw NumericalBreakdown("simplex iteration limit exceeded");
            if ((++iterations_ & 511) == 0) refactorize();

            std::vector<double> y = btran(cost);

            // Entering column.
            int q = -1;
            double best = -kDualTol;
            for (std::size_t j = 0; j < allowed_cols; ++j) {
                if (in_basis_[j]) continue;
                double d = cost[j];
                const std::vector<double>& cj = col_[j];
                for (std::size_t i = 0; i < rows_; ++i) d -= y[i] * cj[i];
                if (bland_) {
                    if (d < -kDualTol) { q = static_cast<int>(j); break; }
                } else if (d < best) {
                    best = d;
                    q = static_cast<int>(j);
                }
            }
            if (q < 0) return PhaseEnd::Optimal;

            std::vector<double> w = ftran(col_[q]);

            // Ratio test.
            int r = -1;
            double theta = std::numeric_limits<double>::infinity();
            double wmax = 0.0;
            for (std::size_t i = 0; i < rows_; ++i) {
                if (w[i] > wmax) wmax = w[i];
                if (w[i] <= kPivotTol) continue;
                double t = std::max(xb_[i], 0.0) / w[i];
                if (r < 0 || t < theta) {
                    theta = t;
                    r = static_cast<int>(i);
                } else if (t == theta) {
                    if (bland_) {
                        if (basis_[i] < basis_[r]) r = static_cast<int>(i);
                    } else if (w[i] > w[r] || (w[i] == w[r] && basis_[i] < basis_[r])) {
                        r = static_cast<int>(i);
                    }
                }
            }
            if (r < 0) {
                if (wmax <= kTinyPivot) return PhaseEnd::Unbounded;
                // Pivot column is numerically marginal; take the largest entry
                // but refuse to do so indefinitely.
                for (std::size_t i = 0; i < rows_; ++i)
                    if (w[i] == wmax) { r = static_cast<int>(i); break; }
                theta = std::max(xb_[r], 0.0) / w[r];
                if (++weak_pivots > kMaxWeakPivots)
                    throw NumericalBreakdown("pivot magnitudes repeatedly below threshold");
            } else {
                weak_pivots = 0;
            }

            if (theta < 1e-12) {
                if (++stall >= kStallLimit) bland_ = true;
            } else {
                stall = 0;
            }

            pivot(static_cast<std::size_t>(r), static_cast<std::size_t>(q), w, theta);
        }
    }

    // After a feasible phase 1, remove artificial columns from the basis.
    // Rows whose artificial cannot be pivoted out are linearly dependent and
    // get dropped.
    void drive_out_artificials() {
        std::vector<char> drop(rows_, 0);
        for (std::size_t i = 0; i < rows_; ++i) {
            if (basis_[i] < static_cast<int>(n_struct_)) continue;
            // Row i of B^-1 A over structural columns; pick the largest pivot.
            int enter = -1;
            double best = kPivotTol;
            const double* brow = binv_.data() + i * rows_;
            for (std::size_t j = 0; j < n_struct_; ++j) {
                if (in_basis_[j]) continue;
                const std::vector<double>& cj = col_[j];
                double v = 0.0;
                for (std::size_t k = 0; k < rows_; ++k) v += brow[k] * cj[k];
                if (std::abs(v) > best) {
                    best = std::abs(v);
                    enter = static_cast<int>(j);
                }
            }
            if (enter < 0) {
                drop[i] = 1;
                continue;
            }
            std::vector<double> w = ftran(col_[enter]);
            pivot(i, static_cast<std::size_t>(enter), w, std::max(xb_[i], 0.0) / w[i]);
        }
        if (std::find(drop.begin(), drop.end(), 1) != drop.end()) {
            std::size_t kept = 0;
            for (std::size_t i = 0; i < rows_; ++i) {
                if (drop[i]) continue;
                if (kept != i) {
                    for (auto& c : col_) c[kept] = c[i];
                    b_[kept] = b_[i];
                    basis_[kept] = basis_[i];
                    row_origin_[kept] = row_origin_[i];
                    row_sign_[kept] = row_sign_[i];
                }
                ++kept;
            }
            for (auto& c : col_) c.resize(kept);
            b_.resize(kept);
            basis_.resize(kept);
            row_origin_.resize(kept);
            row_sign_.resize(kept);
            rows_ = kept;
            binv_.assign(rows_ * rows_, 0.0);
            xb_.assign(rows_, 0.0);
            std::fill(in_basis_.begin(), in_basis_.end(), 0);
            for (std::size_t i = 0; i < rows_; ++i) in_basis_[basis_[i]] = 1;
            refactorize();
        }
    }

    std::vector<double> extract_duals() const {
        std::vector<double> y = btran(cost2_);
        std::vector<double> duals(num_input_rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            duals[row_origin_[i]] = row_sign_[i] > 0 ? y[i] : -y[i];
        return duals;
    }
};

}  // namespace detail

// Split free variables into nonnegative pairs; relations and row order are
// preserved, so row multipliers carry over unchanged.
inline StandardForm to_standard_form(const LinearProgram& lp) {
    detail::validate_lp(lp);
    StandardForm sf;
    sf.original_vars = lp.num_vars;
    sf.negative_part.assign(lp.num_vars, StandardForm::npos);
    std::size_t extra = 0;
    for (std::size_t j = 0; j < lp.num_vars; ++j)
        if (lp.var_bounds[j] == VarBound::Free) sf.negative_part[j] = lp.num_vars + extra++;

    LinearProgram out(lp.num_vars + extra);
    out.objective = lp.objective;
    out.objective.resize(out.num_vars, 0.0);
    for (std::size_t j = 0; j < lp.num_vars; ++j)
        if (sf.negative_part[j] != StandardForm::npos)
            out.objective[sf.negative_part[j]] = -lp.objective[j];

    out.constraints.reserve(lp.constraints.size());
    for (const LpConstraint& c : lp.constraints) {
        LpConstraint nc;
        nc.rel = c.rel;
        nc.rhs = c.rhs;
        nc.coeffs = c.coeffs;
        nc.coeffs.resize(out.num_vars, 0.0);
        for (std::size_t j = 0; j < lp.num_vars; ++j)
            if (sf.negative_part[j] != StandardForm::npos)
                nc.coeffs[sf.negative_part[j]] = -c.coeffs[j];
        out.constraints.push_back(std::move(nc));
    }
    sf.lp = std::move(out);
    return sf;
}

namespace detail {

inline double constraint_violation(const LinearProgram& lp, const std::vector<double>& x) {
    double worst = 0.0;
    for (const LpConstraint& c : lp.constraints) {
        double v = 0.0;
        for (std::size_t j = 0; j < lp.num_vars; ++j) v += c.coeffs[j] * x[j];
        double slack = v - c.rhs;
        if (c.rel == Relation::LessEq) {
            worst = std::max(worst, slack);
        } else {
            worst = std::max(worst, std::abs(slack));
        }
    }
    for (std::size_t j = 0; j < lp.num_vars; ++j)
        if (lp.var_bounds[j] == VarBound::NonNegative) worst = std::max(worst, -x[j]);
    return worst;
}

}  // namespace detail

inline LpSolution solve_lp(const LinearProgram& lp) {
    StandardForm sf = to_standard_form(lp);
    detail::SimplexSolver solver(sf.lp);
    detail::SimplexSolver::Result res = solver.run();

    LpSolution sol;
    sol.status = res.status;
    if (res.status != LpStatus::Optimal) return sol;

    sol.primal = sf.recover(res.x);
    double obj = 0.0;
    for (std::size_t j = 0; j < lp.num_vars; ++j) obj += lp.objective[j] * sol.primal[j];
    sol.objective_value = obj;
    sol.duals = std::move(res.duals);

    double viol = detail::constraint_violation(lp, sol.primal);
    if (viol > detail::kFeasTol)
        throw NumericalBreakdown("optimal point violates constraints by " + std::to_string(viol));
    return sol;
}

namespace detail {

// Solve an LP through its explicit dual. Worthwhile when the row count far
// exceeds the variable count: the simplex basis is sized by the row count of
// whichever problem is solved. The primal point is read off the dual's row
// multipliers; statuses map across by LP duality, with the ambiguous cases
// settled by a direct solve.
inline LpSolution solve_lp_via_dual(const LinearProgram& lp) {
    validate_lp(lp);
    const std::size_t n = lp.num_vars;
    const std::size_t m = lp.constraints.size();

    LinearProgram dual(m);
    for (std::size_t i = 0; i < m; ++i) {
        dual.objective[i] = lp.constraints[i].rhs;
        dual.var_bounds[i] = lp.constraints[i].rel == Relation::LessEq ? VarBound::NonNegative
                                                                       : VarBound::Free;
    }
    dual.constraints.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        LpConstraint row;
        row.coeffs.resize(m);
        for (std::size_t i = 0; i < m; ++i) row.coeffs[i] = -lp.constraints[i].coeffs[j];
        row.rhs = lp.objective[j];
        row.rel = lp.var_bounds[j] == VarBound::NonNegative ? Relation::LessEq : Relation::Eq;
        dual.constraints.push_back(std::move(row));
    }

    LpSolution dsol = solve_lp(dual);
    LpSolution sol;
    if (dsol.status == LpStatus::Infeasible) {
        // Dual infeasibility leaves the original status ambiguous (unbounded
        // or also infeasible); settle it directly.
        return solve_lp(lp);
    }
    if (dsol.status == LpStatus::Unbounded) {
        sol.status = LpStatus::Infeasible;
        return sol;
    }

    sol.status = LpStatus::Optimal;
    sol.primal.resize(n);
    for (std::size_t j = 0; j < n; ++j) sol.primal[j] = -dsol.duals[j];
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * sol.primal[j];
    sol.objective_value = obj;

    if (constraint_violation(lp, sol.primal) > kFeasTol || std::abs(obj + dsol.objective_value) >
            kFeasTol * (1.0 + std::abs(obj))) {
        // Degenerate multiplier recovery; fall back to the direct solve.
        return solve_lp(lp);
    }
    return sol;
}

// Pick the cheaper route by basis size.
inline LpSolution solve_lp_auto(const LinearProgram& lp) {
    if (lp.constraints.size() > 2 * lp.num_vars && lp.constraints.size() > 64)
        return solve_lp_via_dual(lp);
    return solve_lp(lp);
}

}  // namespace detail

}  // namespace mrc
