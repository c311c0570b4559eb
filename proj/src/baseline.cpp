#include "vamorph/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "vamorph/errors.hpp"

namespace vamorph {

FeatureVector extract_features(const RasterImage& img, int d_side) {
    img.validate();
    if (d_side < 1)
        throw ValidationError("d_side must be at least 1, got " +
                              std::to_string(d_side));
    const std::vector<double> lum = luminance_f64(img);
    const int w = img.width;
    const int h = img.height;

    // Exact fractional-coverage area average: each output cell integrates the
    // source rectangle [cx*w/d, (cx+1)*w/d) x [cy*h/d, (cy+1)*h/d).
    FeatureVector fv;
    fv.values.resize(static_cast<std::size_t>(d_side) * d_side + 1);
    const double sx = static_cast<double>(w) / d_side;
    const double sy = static_cast<double>(h) / d_side;
    for (int cy = 0; cy < d_side; ++cy) {
        const double y0 = cy * sy;
        const double y1 = (cy + 1) * sy;
        for (int cx = 0; cx < d_side; ++cx) {
            const double x0 = cx * sx;
            const double x1 = (cx + 1) * sx;
            double total = 0.0;
            const int py0 = static_cast<int>(std::floor(y0));
            const int py1 = std::min(h - 1, static_cast<int>(std::ceil(y1)) - 1);
            const int px0 = static_cast<int>(std::floor(x0));
            const int px1 = std::min(w - 1, static_cast<int>(std::ceil(x1)) - 1);
            for (int py = py0; py <= py1; ++py) {
                const double cover_y = std::min<double>(py + 1, y1) -
                                       std::max<double>(py, y0);
                for (int px = px0; px <= px1; ++px) {
                    const double cover_x = std::min<double>(px + 1, x1) -
                                           std::max<double>(px, x0);
                    total += cover_x * cover_y *
                             lum[static_cast<std::size_t>(py) * w + px];
                }
            }
            fv.values[static_cast<std::size_t>(cy) * d_side + cx] =
                total / (sx * sy);
        }
    }
    fv.values.back() = 1.0;
    return fv;
}

nlohmann::ordered_json RidgeModel::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["d_side"] = d_side;
    j["d"] = d;
    j["lambda"] = lambda;
    j["feature_mean"] = feature_mean;
    j["feature_std"] = feature_std;
    j["weights_valence"] = weights_valence;
    j["weights_arousal"] = weights_arousal;
    return j;
}

RidgeModel RidgeModel::from_json(const nlohmann::json& j) {
    RidgeModel m;
    try {
        m.d_side = j.at("d_side").get<int>();
        m.d = j.at("d").get<int>();
        m.lambda = j.at("lambda").get<double>();
        m.feature_mean = j.at("feature_mean").get<std::vector<double>>();
        m.feature_std = j.at("feature_std").get<std::vector<double>>();
        m.weights_valence =
            j.at("weights_valence").get<std::vector<double>>();
        m.weights_arousal =
            j.at("weights_arousal").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed model JSON: ") +
                              e.what());
    }
    const std::size_t d = static_cast<std::size_t>(m.d);
    if (m.feature_mean.size() != d || m.feature_std.size() != d ||
        m.weights_valence.size() != d + 1 ||
        m.weights_arousal.size() != d + 1)
        throw ValidationError("model vector lengths do not match d");
    for (double s : m.feature_std)
        if (!(s > 0.0))
            throw ValidationError("model feature_std entries must be positive");
    return m;
}

RidgeModel fit(const std::vector<FeatureVector>& features,
               const std::vector<std::array<double, 2>>& labels,
               double lambda, int d_side) {
    if (features.empty())
        throw ValidationError("fit needs at least one sample");
    if (features.size() != labels.size())
        throw ValidationError("feature/label counts differ (" +
                              std::to_string(features.size()) + " vs " +
                              std::to_string(labels.size()) + ")");
    if (lambda < 0.0)
        throw ValidationError("lambda must be non-negative");

    const std::size_t n = features.size();
    const std::size_t dim = features.front().values.size();
    if (dim < 2)
        throw ValidationError("feature vectors must hold at least one value "
                              "plus the bias term");
    const std::size_t d = dim - 1;
    for (const FeatureVector& fv : features)
        if (fv.values.size() != dim)
            throw ValidationError("feature vectors differ in length");

    RidgeModel model;
    model.lambda = lambda;
    model.d_side = d_side;
    model.d = static_cast<int>(d);
    model.feature_mean.assign(d, 0.0);
    model.feature_std.assign(d, 1.0);

    for (const FeatureVector& fv : features)
        for (std::size_t k = 0; k < d; ++k)
            model.feature_mean[k] += fv.values[k];
    for (std::size_t k = 0; k < d; ++k)
        model.feature_mean[k] /= static_cast<double>(n);

    std::vector<double> var(d, 0.0);
    for (const FeatureVector& fv : features)
        for (std::size_t k = 0; k < d; ++k) {
            const double diff = fv.values[k] - model.feature_mean[k];
            var[k] += diff * diff;
        }
    for (std::size_t k = 0; k < d; ++k) {
        const double s = std::sqrt(var[k] / static_cast<double>(n));
        model.feature_std[k] = s > 0.0 ? s : 1.0;
    }

    Eigen::MatrixXd x(n, dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < d; ++k)
            x(i, k) = (features[i].values[k] - model.feature_mean[k]) /
                      model.feature_std[k];
        x(i, d) = 1.0;
    }

    Eigen::MatrixXd gram = x.transpose() * x;
    for (std::size_t k = 0; k < d; ++k) gram(k, k) += lambda;

    Eigen::LDLT<Eigen::MatrixXd> solver(gram);
    const Eigen::VectorXd pivots = solver.vectorD().cwiseAbs();
    const double pivot_max = pivots.maxCoeff();
    if (solver.info() != Eigen::Success || !(pivot_max > 0.0) ||
        pivots.minCoeff() <= 1e-12 * pivot_max)
        throw ComputeError(
            "normal equations are singular; rerun with lambda > 0");

    const auto solve_dim = [&](int dim_idx) {
        Eigen::VectorXd y(n);
        for (std::size_t i = 0; i < n; ++i) y(i) = labels[i][dim_idx];
        const Eigen::VectorXd rhs = x.transpose() * y;
        const Eigen::VectorXd w = solver.solve(rhs);
        const double residual = (gram * w - rhs).norm();
        const double scale = std::max(1.0, rhs.norm());
        if (!w.allFinite() || residual > 1e-6 * scale)
            throw ComputeError(
                "normal equations are singular; rerun with lambda > 0");
        return std::vector<double>(w.data(), w.data() + w.size());
    };

    model.weights_valence = solve_dim(0);
    model.weights_arousal = solve_dim(1);
    return model;
}

std::pair<double, double> predict(const RidgeModel& model,
                                  const FeatureVector& features) {
    const std::size_t d = static_cast<std::size_t>(model.d);
    if (features.values.size() != d + 1)
        throw ValidationError(
            "feature vector length " + std::to_string(features.values.size()) +
            " does not match model dimension " + std::to_string(d + 1));

    const auto apply = [&](const std::vector<double>& w) {
        double acc = w[d];  // bias: standardized bias feature is always 1
        for (std::size_t k = 0; k < d; ++k)
            acc += w[k] * (features.values[k] - model.feature_mean[k]) /
                   model.feature_std[k];
        return std::clamp(acc, -1.0, 1.0);
    };
    return {apply(model.weights_valence), apply(model.weights_arousal)};
}

}  // namespace vamorph
