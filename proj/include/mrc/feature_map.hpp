// feature_map.hpp - label-indicator + instance-thresholding features.
//
// A feature map with k thresholds over |Y| labels has m = |Y| * (k+1) binary
// components laid out in per-label blocks: block y starts at y*(k+1) with the
// label indicator, followed by one component per threshold that fires when
// the instance value is <= the threshold and the label matches. Thresholds
// are picked greedily by decision-stump impurity.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mrc/dataset.hpp"
#include "mrc/error.hpp"
#include "mrc/matrix.hpp"

namespace mrc {

struct ThresholdSpec {
    std::size_t dimension = 0;  // index into the instance vector
    double value = 0.0;

    bool operator==(const ThresholdSpec&) const = default;
};

struct FeatureMap {
    std::size_t num_labels = 0;
    std::vector<ThresholdSpec> thresholds;

    std::size_t block_size() const { return thresholds.size() + 1; }
    std::size_t feature_count() const { return num_labels * block_size(); }
};

// Interval estimates for the feature expectations: tau is the empirical
// mean, a/b the lower/upper endpoints tau -+ lambda/sqrt(n), and d the
// per-feature value range used for confidence-based widths.
struct ExpectationEstimates {
    std::vector<double> tau;
    std::vector<double> lambda;
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> d;
    std::size_t sample_count = 0;
};

// --- threshold selection ------------------------------------------------

namespace detail {

inline double gini_from_counts(const std::vector<std::size_t>& counts, std::size_t total) {
    if (total == 0) return 0.0;
    double g = 1.0;
    for (std::size_t c : counts) {
        double p = static_cast<double>(c) / static_cast<double>(total);
        g -= p * p;
    }
    return g;
}

struct StumpCandidate {
    double score;  // weighted Gini impurity of the induced split, lower is better
    std::size_t dimension;
    double value;
};

// All midpoint candidates of one dimension with their split scores, via a
// single sorted sweep.
inline void score_dimension(const Dataset& data, std::size_t dim,
                            std::vector<StumpCandidate>& out) {
    const std::size_t n = data.num_rows;
    std::vector<std::pair<double, int>> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = {data.instance(i)[dim], data.labels[i]};
    std::sort(order.begin(), order.end());

    const std::size_t classes = data.num_labels();
    std::vector<std::size_t> left(classes, 0), total(classes, 0);
    for (const auto& [v, y] : order) ++total[static_cast<std::size_t>(y)];

    for (std::size_t i = 0; i + 1 < n; ++i) {
        ++left[static_cast<std::size_t>(order[i].second)];
        if (order[i].first == order[i + 1].first) continue;  // not a boundary
        std::size_t nl = i + 1, nr = n - nl;
        std::vector<std::size_t> right(classes);
        for (std::size_t c = 0; c < classes; ++c) right[c] = total[c] - left[c];
        double score = (static_cast<double>(nl) * gini_from_counts(left, nl) +
                        static_cast<double>(nr) * gini_from_counts(right, nr)) /
                       static_cast<double>(n);
        out.push_back({score, dim, (order[i].first + order[i + 1].first) / 2.0});
    }
}

}  // namespace detail

// Rank every midpoint between consecutive distinct values of each dimension
// by the weighted Gini impurity of the two-way split it induces, and return
// the best max_thresholds of them. Ties break toward the lower dimension
// index, then the lower threshold value. The result is sorted by
// (dimension, value).
inline std::vector<ThresholdSpec> select_thresholds(const Dataset& data,
                                                    std::size_t max_thresholds) {
    if (data.num_rows == 0) throw std::invalid_argument("select_thresholds: empty dataset");
    if (max_thresholds == 0) throw std::invalid_argument("select_thresholds: zero budget");

    std::vector<detail::StumpCandidate> candidates;
    for (std::size_t dim = 0; dim < data.num_dims; ++dim)
        detail::score_dimension(data, dim, candidates);
    if (candidates.empty())
        throw DegenerateData("every dimension is constant; no threshold candidates");

    std::sort(candidates.begin(), candidates.end(), [](const auto& x, const auto& y) {
        if (x.score != y.score) return x.score < y.score;
        if (x.dimension != y.dimension) return x.dimension < y.dimension;
        return x.value < y.value;
    });
    if (candidates.size() > max_thresholds) candidates.resize(max_thresholds);

    std::vector<ThresholdSpec> specs;
    specs.reserve(candidates.size());
    for (const auto& c : candidates) specs.push_back({c.dimension, c.value});
    std::sort(specs.begin(), specs.end(), [](const ThresholdSpec& x, const ThresholdSpec& y) {
        if (x.dimension != y.dimension) return x.dimension < y.dimension;
        return x.value < y.value;
    });
    return specs;
}

// Threshold budget: floor(200 / |Y|).
inline std::size_t default_threshold_budget(std::size_t num_labels) {
    if (num_labels < 2) throw std::invalid_argument("default_threshold_budget: need >= 2 labels");
    return 200 / num_labels;
}

// --- feature evaluation ---------------------------------------------------

// The k threshold indicators of an instance, shared by every label block.
inline std::vector<std::uint8_t> threshold_pattern(const FeatureMap& fm,
                                                   std::span<const double> x) {
    std::vector<std::uint8_t> bits(fm.thresholds.size());
    for (std::size_t j = 0; j < fm.thresholds.size(); ++j)
        bits[j] = x[fm.thresholds[j].dimension] <= fm.thresholds[j].value ? 1 : 0;
    return bits;
}

inline std::vector<double> evaluate_features(const FeatureMap& fm, std::span<const double> x,
                                             int y) {
    std::vector<double> phi(fm.feature_count(), 0.0);
    const std::size_t base = static_cast<std::size_t>(y) * fm.block_size();
    phi[base] = 1.0;
    for (std::size_t j = 0; j < fm.thresholds.size(); ++j)
        if (x[fm.thresholds[j].dimension] <= fm.thresholds[j].value) phi[base + j + 1] = 1.0;
    return phi;
}

// |Y| x m matrix whose y-th row is the feature vector of (x, y). Rows have
// disjoint supports by the block layout.
inline Matrix instance_matrix(const FeatureMap& fm, std::span<const double> x) {
    Matrix mat(fm.num_labels, fm.feature_count());
    const std::vector<std::uint8_t> bits = threshold_pattern(fm, x);
    for (std::size_t y = 0; y < fm.num_labels; ++y) {
        const std::size_t base = y * fm.block_size();
        mat(y, base) = 1.0;
        for (std::size_t j = 0; j < bits.size(); ++j)
            if (bits[j]) mat(y, base + j + 1) = 1.0;
    }
    return mat;
}

namespace detail {

template <typename InstanceAt>
std::vector<Matrix> unique_matrices_impl(const FeatureMap& fm, std::size_t count,
                                         InstanceAt&& at) {
    std::vector<Matrix> out;
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < count; ++i) {
        std::span<const double> x = at(i);
        std::vector<std::uint8_t> bits = threshold_pattern(fm, x);
        std::string key(bits.begin(), bits.end());
        if (seen.emplace(std::move(key), out.size()).second)
            out.push_back(instance_matrix(fm, x));
    }
    return out;
}

}  // namespace detail

// Deduplicated instance matrices, order-stable by first occurrence. Two
// instances collide exactly when they fall on the same side of every
// threshold, so the result has at most min(n, 2^k) entries.
inline std::vector<Matrix> unique_instance_matrices(const FeatureMap& fm,
                                                    const std::vector<std::vector<double>>& xs) {
    if (xs.empty()) throw std::invalid_argument("unique_instance_matrices: no instances");
    return detail::unique_matrices_impl(fm, xs.size(), [&](std::size_t i) {
        return std::span<const double>(xs[i].data(), xs[i].size());
    });
}

inline std::vector<Matrix> unique_instance_matrices(const FeatureMap& fm, const Dataset& data) {
    if (data.num_rows == 0) throw std::invalid_argument("unique_instance_matrices: no instances");
    return detail::unique_matrices_impl(fm, data.num_rows,
                                        [&](std::size_t i) { return data.instance(i); });
}

// --- expectation estimates -------------------------------------------------

// Per-feature value range over instances x all labels. Features are binary,
// so the range is 1 unless the feature is constant: a label indicator is
// constant only when there is a single label, and a threshold feature is
// constant (at 0) when no instance falls at or below the threshold, or
// constant (at 1) in the single-label case when every instance does.
inline std::vector<double> feature_ranges(const FeatureMap& fm, const Dataset& data) {
    std::vector<char> any_below(fm.thresholds.size(), 0), any_above(fm.thresholds.size(), 0);
    for (std::size_t i = 0; i < data.num_rows; ++i) {
        auto x = data.instance(i);
        for (std::size_t j = 0; j < fm.thresholds.size(); ++j) {
            if (x[fm.thresholds[j].dimension] <= fm.thresholds[j].value)
                any_below[j] = 1;
            else
                any_above[j] = 1;
        }
    }
    const bool multi_label = fm.num_labels >= 2;
    std::vector<double> d(fm.feature_count(), 0.0);
    for (std::size_t y = 0; y < fm.num_labels; ++y) {
        const std::size_t base = y * fm.block_size();
        d[base] = multi_label ? 1.0 : 0.0;
        for (std::size_t j = 0; j < fm.thresholds.size(); ++j) {
            bool attains_one = any_below[j] != 0;
            bool attains_zero = multi_label || any_above[j] != 0;
            d[base + j + 1] = (attains_one && attains_zero) ? 1.0 : 0.0;
        }
    }
    return d;
}

// Empirical mean of the features plus the interval endpoints
// a = tau - lambda/sqrt(n), b = tau + lambda/sqrt(n).
inline ExpectationEstimates estimate_expectations(const FeatureMap& fm, const Dataset& data,
                                                  const std::vector<double>& lambda) {
    if (data.num_rows == 0) throw std::invalid_argument("estimate_expectations: empty dataset");
    const std::size_t m = fm.feature_count();
    if (lambda.size() != m) throw std::invalid_argument("estimate_expectations: lambda size");
    for (double l : lambda)
        if (l < 0.0) throw std::invalid_argument("estimate_expectations: negative lambda");

    ExpectationEstimates est;
    est.sample_count = data.num_rows;
    est.lambda = lambda;
    est.tau.assign(m, 0.0);
    for (std::size_t i = 0; i < data.num_rows; ++i) {
        std::vector<double> phi = evaluate_features(fm, data.instance(i), data.labels[i]);
        for (std::size_t l = 0; l < m; ++l) est.tau[l] += phi[l];
    }
    const double n = static_cast<double>(data.num_rows);
    for (std::size_t l = 0; l < m; ++l) est.tau[l] /= n;

    const double root_n = std::sqrt(n);
    est.a.resize(m);
    est.b.resize(m);
    for (std::size_t l = 0; l < m; ++l) {
        est.a[l] = est.tau[l] - lambda[l] / root_n;
        est.b[l] = est.tau[l] + lambda[l] / root_n;
    }
    est.d = feature_ranges(fm, data);
    return est;
}

inline ExpectationEstimates estimate_expectations(const FeatureMap& fm, const Dataset& data,
                                                  double uniform_lambda) {
    return estimate_expectations(fm, data,
                                 std::vector<double>(fm.feature_count(), uniform_lambda));
}

// Interval half-widths d * sqrt((log m + log(2/delta)) / 2) that make the
// moment box hold with probability at least 1 - delta.
inline std::vector<double> lambda_for_confidence(const std::vector<double>& d, std::size_t m,
                                                 double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("lambda_for_confidence: delta must be in (0,1)");
    const double scale =
        std::sqrt((std::log(static_cast<double>(m)) + std::log(2.0 / delta)) / 2.0);
    std::vector<double> lambda(d.size());
    for (std::size_t l = 0; l < d.size(); ++l) {
        if (d[l] < 0.0) throw std::invalid_argument("lambda_for_confidence: negative range");
        lambda[l] = d[l] * scale;
    }
    return lambda;
}

}  // namespace mrc
