#pragma once

#include <array>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vamorph/image.hpp"

namespace vamorph {

// Standardized downsampled-pixel regressor standing in for a deep model:
// luminance, area-average pooling to d_side^2 values, bias term, closed-form
// ridge fit per output dimension, clamped predictions.

struct FeatureVector {
    std::vector<double> values;  // d luminance values + trailing bias 1
};

FeatureVector extract_features(const RasterImage& img, int d_side);

struct RidgeModel {
    std::vector<double> weights_valence;  // d+1, in standardized feature space
    std::vector<double> weights_arousal;
    std::vector<double> feature_mean;  // d
    std::vector<double> feature_std;   // d; zero-variance features get std 1
    double lambda = 1.0;
    int d_side = 0;
    int d = 0;

    nlohmann::ordered_json to_json() const;
    static RidgeModel from_json(const nlohmann::json& j);
};

// w = (X^T X + lambda*I)^-1 X^T y per dimension on standardized features,
// bias column unregularized. Throws ComputeError for a singular system at
// lambda = 0.
RidgeModel fit(const std::vector<FeatureVector>& features,
               const std::vector<std::array<double, 2>>& labels, double lambda,
               int d_side);

// Linear prediction on standardized features, clamped to [-1, 1].
std::pair<double, double> predict(const RidgeModel& model,
                                  const FeatureVector& features);

}  // namespace vamorph
