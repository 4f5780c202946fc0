// eval.hpp - training pipeline, stratified cross-validation, and the
// bounds-versus-training-size experiment.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "mrc/dataset.hpp"
#include "mrc/error.hpp"
#include "mrc/feature_map.hpp"
#include "mrc/learn.hpp"
#include "mrc/predict.hpp"
#include "mrc/rng.hpp"

namespace mrc {

// Everything needed to go from a dataset to a fitted model: threshold
// budget, interval widths, and the learning configuration.
struct TrainOptions {
    EstimateMode mode = EstimateMode::Interval;
    double lambda = 0.25;                // uniform interval width
    std::optional<double> delta;         // confidence-based widths instead, when set
    std::size_t max_thresholds = 0;      // 0 -> floor(200 / |Y|)
    bool compute_lower_bound = false;
    std::size_t max_labels_for_subsets = 10;
};

enum class PredictionMode { Sampled, Deterministic };

struct CvReport {
    std::vector<double> per_fold_errors;
    double mean_error = 0.0;
    double std_error = 0.0;  // population standard deviation over folds
    double lower_bound_full = 0.0;
    double upper_bound_full = 0.0;
};

struct BoundsCurvePoint {
    std::size_t train_size = 0;
    double upper = 0.0;
    double lower = 0.0;
    double test_error = 0.0;
};

using BoundsCurve = std::vector<BoundsCurvePoint>;

// Select thresholds, estimate expectations, and fit. Falls back to a
// featureless (label-indicator only) map when no threshold candidate exists,
// so degenerate splits still train.
inline MrcModel train_model(const Dataset& data, const TrainOptions& opts) {
    const std::size_t labels = data.num_labels();
    std::size_t budget = opts.max_thresholds;
    if (budget == 0) budget = labels >= 2 ? default_threshold_budget(labels) : 200;

    FeatureMap fm;
    fm.num_labels = labels;
    try {
        fm.thresholds = select_thresholds(data, budget);
    } catch (const DegenerateData&) {
        fm.thresholds.clear();
    }

    std::vector<double> lambda;
    if (opts.delta) {
        lambda = lambda_for_confidence(feature_ranges(fm, data), fm.feature_count(), *opts.delta);
    } else {
        if (opts.lambda < 0.0) throw std::invalid_argument("train_model: negative lambda");
        lambda.assign(fm.feature_count(), opts.lambda);
    }

    ExpectationEstimates est = estimate_expectations(fm, data, lambda);
    std::vector<Matrix> matrices = unique_instance_matrices(fm, data);
    LearnConfig cfg;
    cfg.mode = opts.mode;
    cfg.max_labels_for_subsets = opts.max_labels_for_subsets;
    cfg.compute_lower_bound = opts.compute_lower_bound;
    return fit(fm, est, cfg, matrices);
}

// k disjoint index sets covering the dataset, deterministic in the seed.
// Each class is shuffled and dealt round-robin, with the starting fold
// rotated between classes so fold sizes stay within one of each other;
// per-class counts across folds differ by at most one.
inline std::vector<std::vector<std::size_t>> stratified_folds(const Dataset& data, std::size_t k,
                                                              std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("stratified_folds: need k >= 2");
    if (data.num_rows < k)
        throw TooFewSamples("stratified_folds: " + std::to_string(data.num_rows) +
                            " samples for " + std::to_string(k) + " folds");

    std::vector<std::vector<std::size_t>> by_class(data.num_labels());
    for (std::size_t i = 0; i < data.num_rows; ++i)
        by_class[static_cast<std::size_t>(data.labels[i])].push_back(i);

    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t start = 0;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        std::vector<std::size_t>& idx = by_class[c];
        rng::Stream rs(rng::derive(seed, c));
        for (std::size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[rs.next_below(i)]);
        for (std::size_t pos = 0; pos < idx.size(); ++pos)
            folds[(start + pos) % k].push_back(idx[pos]);
        start = (start + idx.size()) % k;
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

namespace detail {

// Reported bounds must land in [0, 1]; tolerate only LP-level noise when
// snapping them there.
inline double snap_unit_interval(double v) {
    if (v < -1e-7 || v > 1.0 + 1e-7)
        throw NumericalBreakdown("reported bound outside [0,1]: " + std::to_string(v));
    return std::min(std::max(v, 0.0), 1.0);
}

inline double misclassification_rate(const MrcModel& model, const Dataset& test,
                                     PredictionMode mode, std::uint64_t seed) {
    if (test.num_rows == 0) return 0.0;
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.num_rows; ++i) {
        int got = mode == PredictionMode::Deterministic
                      ? predict_label(model, test.instance(i))
                      : predict_label(model, test.instance(i), SampleDraw{seed, i});
        if (got != test.labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(test.num_rows);
}

}  // namespace detail

// Stratified k-fold cross-validation. Fold errors come from models trained
// on the other folds; the bounds come from a single fit on all samples.
// Held-out predictions default to the randomized rule with fold-derived
// seeds; pass Deterministic for argmax labels.
inline CvReport evaluate_cv(const Dataset& data, const TrainOptions& opts, std::size_t k = 10,
                            std::uint64_t seed = 0,
                            PredictionMode prediction = PredictionMode::Sampled) {
    std::vector<std::vector<std::size_t>> folds = stratified_folds(data, k, seed);

    CvReport report;
    report.per_fold_errors.reserve(k);
    TrainOptions fold_opts = opts;
    fold_opts.compute_lower_bound = false;  // bounds are reported from the full fit only
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<std::size_t> train_idx;
        train_idx.reserve(data.num_rows - folds[f].size());
        for (std::size_t g = 0; g < k; ++g)
            if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
        std::sort(train_idx.begin(), train_idx.end());

        MrcModel model = train_model(data.subset(train_idx), fold_opts);
        Dataset held_out = data.subset(folds[f]);
        report.per_fold_errors.push_back(detail::misclassification_rate(
            model, held_out, prediction, rng::derive(seed, 1000 + f)));
    }

    report.mean_error =
        std::accumulate(report.per_fold_errors.begin(), report.per_fold_errors.end(), 0.0) /
        static_cast<double>(k);
    double ss = 0.0;
    for (double e : report.per_fold_errors) ss += (e - report.mean_error) * (e - report.mean_error);
    report.std_error = std::sqrt(ss / static_cast<double>(k));

    TrainOptions full_opts = opts;
    full_opts.compute_lower_bound = true;
    MrcModel full = train_model(data, full_opts);
    report.upper_bound_full = detail::snap_unit_interval(full.upper_bound);
    report.lower_bound_full =
        std::min(detail::snap_unit_interval(full.lower_bound.value()), report.upper_bound_full);
    return report;
}

namespace detail {

// Stratified subsample of the requested size: class quotas proportional to
// class frequencies (largest remainder), each present class guaranteed one
// slot when the size allows, picks drawn from a seeded shuffle per class.
inline std::vector<std::size_t> stratified_subsample(const Dataset& data, std::size_t size,
                                                     std::uint64_t seed) {
    if (size == 0 || size >= data.num_rows)
        throw TooFewSamples("stratified_subsample: size must be in [1, n)");

    std::vector<std::vector<std::size_t>> by_class(data.num_labels());
    for (std::size_t i = 0; i < data.num_rows; ++i)
        by_class[static_cast<std::size_t>(data.labels[i])].push_back(i);

    const std::size_t classes = by_class.size();
    std::vector<std::size_t> quota(classes, 0);
    std::vector<std::pair<double, std::size_t>> fractional;  // (-frac, class)
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        double exact = static_cast<double>(size) * static_cast<double>(by_class[c].size()) /
                       static_cast<double>(data.num_rows);
        quota[c] = static_cast<std::size_t>(exact);
        assigned += quota[c];
        fractional.push_back({-(exact - static_cast<double>(quota[c])), c});
    }
    std::sort(fractional.begin(), fractional.end());
    for (std::size_t i = 0; assigned < size && i < fractional.size(); ++i) {
        std::size_t c = fractional[i].second;
        if (quota[c] < by_class[c].size()) {
            ++quota[c];
            ++assigned;
        }
    }
    // Keep every nonempty class represented when there is room.
    for (std::size_t c = 0; c < classes; ++c) {
        if (quota[c] == 0 && !by_class[c].empty()) {
            for (std::size_t donor = 0; donor < classes; ++donor) {
                if (quota[donor] > 1) {
                    --quota[donor];
                    ++quota[c];
                    break;
                }
            }
        }
    }
    // Fill any shortfall from classes with spare members.
    for (std::size_t c = 0; c < classes && assigned < size; ++c) {
        while (assigned < size && quota[c] < by_class[c].size()) {
            ++quota[c];
            ++assigned;
        }
    }

    std::vector<std::size_t> picked;
    picked.reserve(size);
    for (std::size_t c = 0; c < classes; ++c) {
        std::vector<std::size_t>& idx = by_class[c];
        rng::Stream rs(rng::derive(seed, 7000 + c));
        for (std::size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[rs.next_below(i)]);
        for (std::size_t i = 0; i < quota[c]; ++i) picked.push_back(idx[i]);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

}  // namespace detail

// For each training size: fit on a stratified subsample, record the learned
// bounds and the error on the remaining samples. Rows come back sorted by
// size.
inline BoundsCurve bounds_curve(const Dataset& data, std::vector<std::size_t> training_sizes,
                                const TrainOptions& opts, std::uint64_t seed = 0,
                                PredictionMode prediction = PredictionMode::Sampled) {
    if (training_sizes.empty()) throw std::invalid_argument("bounds_curve: no sizes");
    std::sort(training_sizes.begin(), training_sizes.end());
    if (training_sizes.back() >= data.num_rows)
        throw TooFewSamples("bounds_curve: largest size must be < n");

    TrainOptions point_opts = opts;
    point_opts.compute_lower_bound = true;

    BoundsCurve curve;
    curve.reserve(training_sizes.size());
    for (std::size_t s : training_sizes) {
        std::uint64_t point_seed = rng::derive(seed, s);
        std::vector<std::size_t> train_idx = detail::stratified_subsample(data, s, point_seed);
        std::vector<char> in_train(data.num_rows, 0);
        for (std::size_t i : train_idx) in_train[i] = 1;
        std::vector<std::size_t> test_idx;
        test_idx.reserve(data.num_rows - s);
        for (std::size_t i = 0; i < data.num_rows; ++i)
            if (!in_train[i]) test_idx.push_back(i);

        MrcModel model = train_model(data.subset(train_idx), point_opts);
        double err = detail::misclassification_rate(model, data.subset(test_idx), prediction,
                                                    rng::derive(point_seed, 1));
        double upper = detail::snap_unit_interval(model.upper_bound);
        double lower = std::min(detail::snap_unit_interval(model.lower_bound.value()), upper);
        curve.push_back({s, upper, lower, err});
    }
    return curve;
}

}  // namespace mrc
