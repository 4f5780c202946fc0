// predict.hpp - randomized and deterministic prediction from a fitted model.
//
// Label probabilities are the normalized positive parts of the affine scores
// features(x,y) . mu + nu + 1; when every score clips to zero the rule falls
// back to uniform. Sampling uses the counter-based generator in rng.hpp so a
// (seed, draw index) pair fully determines the outcome.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mrc/feature_map.hpp"
#include "mrc/learn.hpp"
#include "mrc/rng.hpp"

namespace mrc {

struct Prediction {
    std::vector<double> probabilities;  // per label, sums to 1
    int label = 0;                      // argmax, lowest index on ties
    double normalizer = 0.0;            // sum of positive-part scores
};

inline Prediction predict_proba(const FeatureMap& fm, std::span<const double> mu, double nu,
                                std::span<const double> x) {
    Matrix phi = instance_matrix(fm, x);
    detail::RuleScores rs = detail::positive_part_scores(phi, mu, nu);

    Prediction pred;
    pred.normalizer = rs.total;
    pred.probabilities.resize(fm.num_labels);
    if (rs.total > 0.0) {
        for (std::size_t y = 0; y < fm.num_labels; ++y)
            pred.probabilities[y] = rs.positive[y] / rs.total;
    } else {
        for (std::size_t y = 0; y < fm.num_labels; ++y)
            pred.probabilities[y] = 1.0 / static_cast<double>(fm.num_labels);
    }
    for (std::size_t y = 1; y < fm.num_labels; ++y)
        if (pred.probabilities[y] > pred.probabilities[pred.label])
            pred.label = static_cast<int>(y);
    return pred;
}

inline Prediction predict_proba(const MrcModel& model, std::span<const double> x) {
    return predict_proba(model.feature_map, model.mu, model.nu, x);
}

// Deterministic mode: argmax with lowest-index tie-break.
inline int predict_label(const MrcModel& model, std::span<const double> x) {
    return predict_proba(model, x).label;
}

// One reproducible draw from the label distribution.
struct SampleDraw {
    std::uint64_t seed = 0;
    std::uint64_t index = 0;  // e.g. the position of x in a batch
};

inline int sample_label(const std::vector<double>& probabilities, SampleDraw draw) {
    double u = rng::uniform01(draw.seed, draw.index);
    double cum = 0.0;
    for (std::size_t y = 0; y < probabilities.size(); ++y) {
        cum += probabilities[y];
        if (u < cum) return static_cast<int>(y);
    }
    return static_cast<int>(probabilities.size()) - 1;  // guard against rounding
}

inline int predict_label(const MrcModel& model, std::span<const double> x, SampleDraw draw) {
    return sample_label(predict_proba(model, x).probabilities, draw);
}

}  // namespace mrc
