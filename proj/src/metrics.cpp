#include "vamorph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "vamorph/errors.hpp"

namespace vamorph {

PredictionSet read_predictions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open predictions file " + path.string());
    PredictionSet preds;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        PredictionEntry e;
        try {
            j = nlohmann::json::parse(line);
            e.record_key = j.at("image_path").get<std::string>();
            e.valence = j.at("valence").get<double>();
            e.arousal = j.at("arousal").get<double>();
        } catch (const nlohmann::json::exception& err) {
            throw ValidationError(path.string() + ":" +
                                  std::to_string(line_no) +
                                  ": malformed prediction: " + err.what());
        }
        const auto in_range = [](double v) {
            return std::isfinite(v) && v >= -1.0 && v <= 1.0;
        };
        if (!in_range(e.valence) || !in_range(e.arousal))
            throw ValidationError(
                path.string() + ":" + std::to_string(line_no) +
                ": prediction (" + std::to_string(e.valence) + ", " +
                std::to_string(e.arousal) + ") lies outside [-1,1]");
        preds.entries.push_back(std::move(e));
    }
    if (in.bad())
        throw IoError("failed reading predictions file " + path.string());
    return preds;
}

void write_predictions(const PredictionSet& preds,
                       const std::filesystem::path& path) {
    std::ostringstream out;
    for (const PredictionEntry& e : preds.entries) {
        nlohmann::ordered_json j;
        j["image_path"] = e.record_key;
        j["valence"] = e.valence;
        j["arousal"] = e.arousal;
        out << j.dump() << '\n';
    }
    atomic_write_text(path, out.str());
}

double rmse(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size())
        throw ValidationError("rmse inputs differ in length (" +
                              std::to_string(pred.size()) + " vs " +
                              std::to_string(truth.size()) + ")");
    if (pred.empty()) throw ValidationError("rmse of empty input");
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - truth[i];
        sum_sq += d * d;
    }
    return std::sqrt(sum_sq / static_cast<double>(pred.size()));
}

double ccc(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size())
        throw ValidationError("ccc inputs differ in length (" +
                              std::to_string(pred.size()) + " vs " +
                              std::to_string(truth.size()) + ")");
    if (pred.size() < 2)
        throw ValidationError("ccc needs at least 2 samples, got " +
                              std::to_string(pred.size()));
    const double n = static_cast<double>(pred.size());

    double mean_p = 0.0, mean_t = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        mean_p += pred[i];
        mean_t += truth[i];
    }
    mean_p /= n;
    mean_t /= n;

    double var_p = 0.0, var_t = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double dp = pred[i] - mean_p;
        const double dt = truth[i] - mean_t;
        var_p += dp * dp;
        var_t += dt * dt;
        cov += dp * dt;
    }
    var_p /= n;
    var_t /= n;
    cov /= n;

    const double mean_gap = mean_p - mean_t;
    const double denom = var_p + var_t + mean_gap * mean_gap;
    if (denom == 0.0)
        throw ComputeError(
            "degenerate CCC: both sequences constant with equal means");
    return 2.0 * cov / denom;
}

namespace {

GroupScores score_group(const std::vector<double>& pv,
                        const std::vector<double>& tv,
                        const std::vector<double>& pa,
                        const std::vector<double>& ta) {
    GroupScores s;
    s.count = pv.size();
    s.rmse_valence = rmse(pv, tv);
    s.rmse_arousal = rmse(pa, ta);
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < pv.size(); ++i) {
        const double dv = pv[i] - tv[i];
        const double da = pa[i] - ta[i];
        sum_sq += dv * dv + da * da;
    }
    s.rmse_2d = std::sqrt(sum_sq / static_cast<double>(pv.size()));
    if (pv.size() >= 2) {
        try {
            s.ccc_valence = ccc(pv, tv);
        } catch (const ComputeError&) {
        }
        try {
            s.ccc_arousal = ccc(pa, ta);
        } catch (const ComputeError&) {
        }
    }
    return s;
}

nlohmann::ordered_json scores_to_json(const GroupScores& s) {
    nlohmann::ordered_json j;
    j["count"] = s.count;
    j["rmse_valence"] = s.rmse_valence;
    j["rmse_arousal"] = s.rmse_arousal;
    j["rmse_2d"] = s.rmse_2d;
    j["ccc_valence"] =
        s.ccc_valence ? nlohmann::ordered_json(*s.ccc_valence)
                      : nlohmann::ordered_json(nullptr);
    j["ccc_arousal"] =
        s.ccc_arousal ? nlohmann::ordered_json(*s.ccc_arousal)
                      : nlohmann::ordered_json(nullptr);
    return j;
}

}  // namespace

nlohmann::ordered_json EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["n"] = n;
    j["global"] = scores_to_json(global);
    nlohmann::ordered_json groups = nlohmann::ordered_json::object();
    for (const auto& [label, scores] : per_emotion)
        groups[label] = scores_to_json(scores);
    j["per_emotion"] = std::move(groups);
    return j;
}

EvalReport evaluate(std::span<const SampleRecord> records,
                    const PredictionSet& predictions, bool group) {
    if (records.empty())
        throw ValidationError("evaluation needs at least one record");

    std::unordered_map<std::string, const SampleRecord*> by_path;
    for (const SampleRecord& r : records) by_path[r.image_path] = &r;

    std::unordered_map<std::string, const PredictionEntry*> by_key;
    for (const PredictionEntry& e : predictions.entries) {
        if (!by_key.emplace(e.record_key, &e).second)
            throw ValidationError("duplicate prediction for \"" +
                                  e.record_key + "\"");
    }

    std::vector<std::string> missing;
    for (const SampleRecord& r : records)
        if (by_key.find(r.image_path) == by_key.end())
            missing.push_back(r.image_path);
    std::vector<std::string> extra;
    for (const PredictionEntry& e : predictions.entries)
        if (by_path.find(e.record_key) == by_path.end())
            extra.push_back(e.record_key);
    if (!missing.empty() || !extra.empty()) {
        std::sort(missing.begin(), missing.end());
        std::sort(extra.begin(), extra.end());
        std::string msg = "predictions do not align with records;";
        if (!missing.empty()) {
            msg += " missing: ";
            for (std::size_t i = 0; i < missing.size(); ++i)
                msg += (i ? ", " : "") + missing[i];
            msg += ";";
        }
        if (!extra.empty()) {
            msg += " extra: ";
            for (std::size_t i = 0; i < extra.size(); ++i)
                msg += (i ? ", " : "") + extra[i];
        }
        throw ValidationError(msg);
    }

    std::vector<double> pv, tv, pa, ta;
    pv.reserve(records.size());
    tv.reserve(records.size());
    pa.reserve(records.size());
    ta.reserve(records.size());
    std::map<std::string, std::array<std::vector<double>, 4>> groups;
    for (const SampleRecord& r : records) {
        const PredictionEntry& e = *by_key.at(r.image_path);
        pv.push_back(e.valence);
        tv.push_back(r.valence);
        pa.push_back(e.arousal);
        ta.push_back(r.arousal);
        if (group) {
            auto& g = groups[r.emotion_label];
            g[0].push_back(e.valence);
            g[1].push_back(r.valence);
            g[2].push_back(e.arousal);
            g[3].push_back(r.arousal);
        }
    }

    EvalReport report;
    report.n = records.size();
    report.global = score_group(pv, tv, pa, ta);
    for (const auto& [label, g] : groups)
        report.per_emotion[label] = score_group(g[0], g[1], g[2], g[3]);
    return report;
}

HeatmapGrid heatmap(std::span<const SampleRecord> records,
                    const PredictionSet& predictions, int resolution) {
    if (resolution < 2)
        throw ValidationError("heatmap resolution must be at least 2, got " +
                              std::to_string(resolution));

    std::unordered_map<std::string, const PredictionEntry*> by_key;
    for (const PredictionEntry& e : predictions.entries)
        by_key[e.record_key] = &e;

    const auto bin_of = [resolution](double v) {
        // [-1,1] split into `resolution` bins, upper edge inclusive.
        const double scaled = (v + 1.0) / 2.0 * resolution;
        int b = static_cast<int>(std::floor(scaled));
        if (b < 0) b = 0;
        if (b >= resolution) b = resolution - 1;
        return b;
    };

    HeatmapGrid grid;
    grid.resolution = resolution;
    grid.cells.assign(static_cast<std::size_t>(resolution) * resolution, {});
    std::vector<double> sum_sq_v(grid.cells.size(), 0.0);
    std::vector<double> sum_sq_a(grid.cells.size(), 0.0);

    for (const SampleRecord& r : records) {
        const auto it = by_key.find(r.image_path);
        if (it == by_key.end())
            throw ValidationError("no prediction for \"" + r.image_path +
                                  "\"");
        const PredictionEntry& e = *it->second;
        const std::size_t idx =
            static_cast<std::size_t>(bin_of(r.arousal)) * resolution +
            bin_of(r.valence);
        grid.cells[idx].count += 1;
        const double dv = e.valence - r.valence;
        const double da = e.arousal - r.arousal;
        sum_sq_v[idx] += dv * dv;
        sum_sq_a[idx] += da * da;
    }

    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        if (grid.cells[i].count == 0) continue;
        const double n = static_cast<double>(grid.cells[i].count);
        grid.cells[i].rmse_valence = std::sqrt(sum_sq_v[i] / n);
        grid.cells[i].rmse_arousal = std::sqrt(sum_sq_a[i] / n);
    }
    return grid;
}

RenderedHeatmap render_heatmap(const HeatmapGrid& grid, VaDimension dim) {
    const int res = grid.resolution;
    if (res < 2 ||
        grid.cells.size() != static_cast<std::size_t>(res) * res)
        throw ValidationError("heatmap grid is inconsistent");

    const auto cell_value = [&](int ab, int vb) {
        const HeatmapCell& c = grid.cell(ab, vb);
        return dim == VaDimension::valence ? c.rmse_valence : c.rmse_arousal;
    };

    double max_rmse = 0.0;
    for (int ab = 0; ab < res; ++ab)
        for (int vb = 0; vb < res; ++vb)
            if (grid.cell(ab, vb).count > 0)
                max_rmse = std::max(max_rmse, cell_value(ab, vb));

    // CSV: header row of valence bin centers, then arousal rows descending.
    std::ostringstream csv;
    const auto center = [res](int b) {
        return -1.0 + (2.0 * b + 1.0) / res;
    };
    const auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        return std::string(buf);
    };
    csv << "arousal_center";
    for (int vb = 0; vb < res; ++vb) csv << ",v=" << fmt(center(vb));
    csv << '\n';
    for (int ab = res - 1; ab >= 0; --ab) {
        csv << fmt(center(ab));
        for (int vb = 0; vb < res; ++vb) {
            csv << ',';
            if (grid.cell(ab, vb).count > 0) csv << fmt(cell_value(ab, vb));
        }
        csv << '\n';
    }

    // PNG: one block per cell, blue (low) to red (high); gray for empty.
    constexpr int kBlock = 32;
    RasterImage img = RasterImage::create(res * kBlock, res * kBlock, 3);
    for (int ab = 0; ab < res; ++ab) {
        for (int vb = 0; vb < res; ++vb) {
            std::uint8_t rgb[3] = {128, 128, 128};
            if (grid.cell(ab, vb).count > 0) {
                const double v = cell_value(ab, vb);
                const double s = max_rmse > 0.0 ? v / max_rmse : 0.0;
                rgb[0] = static_cast<std::uint8_t>(std::lround(255.0 * s));
                rgb[1] = 0;
                rgb[2] = static_cast<std::uint8_t>(
                    std::lround(255.0 * (1.0 - s)));
            }
            // Row 0 of the image is the highest arousal bin.
            const int y0 = (res - 1 - ab) * kBlock;
            const int x0 = vb * kBlock;
            for (int y = y0; y < y0 + kBlock; ++y)
                for (int x = x0; x < x0 + kBlock; ++x)
                    for (int c = 0; c < 3; ++c) img.at(x, y, c) = rgb[c];
        }
    }

    RenderedHeatmap out;
    out.csv = csv.str();
    out.image = std::move(img);
    return out;
}

}  // namespace vamorph
