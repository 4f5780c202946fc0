// test_eval.cpp - stratified folds, cross-validation, bounds curve.
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <set>
#include <sstream>
#include <vector>

#include "mrc/eval.hpp"
#include "mrc/io.hpp"
#include "mrc/rng.hpp"
#include "synthetic.hpp"

using namespace mrc;

TEST_CASE("stratified_folds_balanced_two_classes") {
    // 10 samples, 2 balanced classes, 5 folds: one of each class per fold.
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 10; ++i) {
        rows.push_back({static_cast<double>(i)});
        labels.push_back(i % 2);
    }
    Dataset d = make_dataset(rows, labels);
    auto folds = stratified_folds(d, 5, 7);
    REQUIRE(folds.size() == 5);
    for (const auto& f : folds) {
        REQUIRE(f.size() == 2);
        std::size_t zeros = 0;
        for (std::size_t i : f)
            if (d.labels[i] == 0) ++zeros;
        CHECK(zeros == 1);
    }
}

TEST_CASE("stratified_folds_partition_and_proportions") {
    mrc::rng::Stream rs(1212ull);
    for (int t = 0; t < 100; ++t) {
        std::size_t n = 20 + rs.next_below(80);
        std::size_t classes = 2 + rs.next_below(3);
        std::vector<std::vector<double>> rows;
        std::vector<int> labels;
        for (std::size_t i = 0; i < n; ++i) {
            rows.push_back({rs.next_uniform01()});
            labels.push_back(static_cast<int>(rs.next_below(classes)));
        }
        Dataset d = make_dataset(rows, labels);
        std::size_t k = 2 + rs.next_below(5);
        auto folds = stratified_folds(d, k, t);

        // Partition: disjoint, union covers everything.
        std::set<std::size_t> seen;
        std::size_t total = 0;
        for (const auto& f : folds) {
            total += f.size();
            for (std::size_t i : f) CHECK(seen.insert(i).second);
        }
        CHECK(total == d.num_rows);

        // Per-class counts differ by at most one across folds.
        for (std::size_t c = 0; c < d.num_labels(); ++c) {
            std::size_t lo = n, hi = 0;
            for (const auto& f : folds) {
                std::size_t cnt = 0;
                for (std::size_t i : f)
                    if (d.labels[i] == static_cast<int>(c)) ++cnt;
                lo = std::min(lo, cnt);
                hi = std::max(hi, cnt);
            }
            CHECK(hi - lo <= 1);
        }
    }
}

TEST_CASE("stratified_folds_deterministic_and_guarded") {
    Dataset d = synth::two_class(50, 2, 1.0, 5);
    auto f1 = stratified_folds(d, 10, 99);
    auto f2 = stratified_folds(d, 10, 99);
    CHECK(f1 == f2);
    auto f3 = stratified_folds(d, 10, 100);
    CHECK(f1 != f3);

    Dataset tiny = synth::two_class(5, 1, 1.0, 6);
    CHECK_THROWS_AS(stratified_folds(tiny, 6, 0), TooFewSamples);
}

TEST_CASE("evaluate_cv_constant_label_zero_error") {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    mrc::rng::Stream rs(31ull);
    for (int i = 0; i < 24; ++i) {
        rows.push_back({rs.next_uniform01(), rs.next_uniform01()});
        labels.push_back(1);
    }
    Dataset d = make_dataset(rows, labels);
    TrainOptions opts;
    CvReport report = evaluate_cv(d, opts, 4, 3);
    for (double e : report.per_fold_errors) CHECK(e == 0.0);
    CHECK(report.mean_error == 0.0);
    CHECK(report.lower_bound_full >= -1e-9);
    CHECK(report.upper_bound_full <= 1e-7);
}

TEST_CASE("evaluate_cv_learns_separable_data") {
    Dataset d = synth::two_class(160, 2, 2.5, 11);
    TrainOptions opts;
    opts.max_thresholds = 16;
    CvReport report = evaluate_cv(d, opts, 5, 21);
    REQUIRE(report.per_fold_errors.size() == 5);

    // Well-separated classes: small error, valid bound chain.
    CHECK(report.mean_error < 0.25);
    CHECK(report.lower_bound_full >= -1e-9);
    CHECK(report.lower_bound_full <= report.upper_bound_full + 1e-9);
    CHECK(report.upper_bound_full <= 1.0 + 1e-9);

    // Mean and std agree with the fold errors.
    double mean = 0.0;
    for (double e : report.per_fold_errors) mean += e;
    mean /= 5.0;
    CHECK(report.mean_error == mean);
    double ss = 0.0;
    for (double e : report.per_fold_errors) ss += (e - mean) * (e - mean);
    CHECK(report.std_error == std::sqrt(ss / 5.0));
}

TEST_CASE("evaluate_cv_reproducible_bit_for_bit") {
    Dataset d = synth::two_class(80, 2, 1.5, 17);
    TrainOptions opts;
    opts.max_thresholds = 12;
    CvReport r1 = evaluate_cv(d, opts, 5, 77);
    CvReport r2 = evaluate_cv(d, opts, 5, 77);
    REQUIRE(r1.per_fold_errors.size() == r2.per_fold_errors.size());
    CHECK(std::memcmp(r1.per_fold_errors.data(), r2.per_fold_errors.data(),
                      r1.per_fold_errors.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(&r1.mean_error, &r2.mean_error, sizeof(double)) == 0);
    CHECK(std::memcmp(&r1.upper_bound_full, &r2.upper_bound_full, sizeof(double)) == 0);
    CHECK(std::memcmp(&r1.lower_bound_full, &r2.lower_bound_full, sizeof(double)) == 0);

    std::ostringstream csv1, csv2;
    write_cv_report_csv(r1, csv1);
    write_cv_report_csv(r2, csv2);
    CHECK(csv1.str() == csv2.str());
}

TEST_CASE("bounds_curve_rows_ordered_and_bounded") {
    Dataset d = synth::two_class(240, 2, 1.5, 23);
    TrainOptions opts;
    opts.max_thresholds = 10;
    BoundsCurve curve = bounds_curve(d, {96, 24, 48}, opts, 5);
    REQUIRE(curve.size() == 3);
    CHECK(curve[0].train_size == 24);
    CHECK(curve[1].train_size == 48);
    CHECK(curve[2].train_size == 96);
    for (const BoundsCurvePoint& p : curve) {
        CHECK(p.lower <= p.upper + 1e-9);
        CHECK(p.lower >= -1e-9);
        CHECK(p.upper <= 1.0 + 1e-9);
        CHECK(p.test_error >= 0.0);
        CHECK(p.test_error <= 1.0);
    }

    CHECK_THROWS_AS(bounds_curve(d, {240}, opts, 5), TooFewSamples);
    CHECK_THROWS_AS(bounds_curve(d, {}, opts, 5), std::invalid_argument);
}

TEST_CASE("train_model_handles_degenerate_features") {
    // All-constant instances: the pipeline falls back to label indicators.
    std::vector<std::vector<double>> rows(12, std::vector<double>{1.0});
    std::vector<int> labels;
    for (int i = 0; i < 12; ++i) labels.push_back(i % 2);
    Dataset d = make_dataset(rows, labels);
    TrainOptions opts;
    opts.compute_lower_bound = true;
    MrcModel model = train_model(d, opts);
    CHECK(model.feature_map.thresholds.empty());
    CHECK(model.upper_bound <= 1.0 + 1e-9);
    CHECK(*model.lower_bound >= -1e-9);
}
