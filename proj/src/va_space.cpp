#include "vamorph/va_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "vamorph/errors.hpp"

namespace vamorph {

namespace {

// Grid coordinates are generated by repeated addition; snap to 9 decimals so
// the ladder lands exactly on its endpoints and labels stay clean.
double snap9(double x) { return std::round(x * 1e9) / 1e9; }

}  // namespace

VATemplate VATemplate::defaults() {
    VATemplate t;
    t.angle_min_deg = 10.0;
    t.angle_max_deg = 205.0;
    t.angle_step_deg = 15.0;
    t.intensity_min = 0.1;
    t.intensity_max = 1.0;
    t.intensity_step = 0.1;
    t.anchors = {
        {"HAPPY", 10.0},   {"SURPRISE", 85.0}, {"AFRAID", 115.0},
        {"ANGRY", 145.0},  {"DISGUST", 175.0}, {"SAD", 205.0},
    };
    return t;
}

void VATemplate::validate() const {
    if (!(angle_step_deg > 0.0))
        throw ValidationError("angle_step_deg must be positive");
    if (!(intensity_step > 0.0))
        throw ValidationError("intensity_step must be positive");
    if (angle_min_deg > angle_max_deg)
        throw ValidationError("angle_min_deg must not exceed angle_max_deg");
    if (intensity_min > intensity_max)
        throw ValidationError("intensity_min must not exceed intensity_max");
    if (!(intensity_min > 0.0))
        throw ValidationError(
            "intensity_min must be positive (0 is the implicit neutral "
            "center)");
    if (intensity_max > 1.0)
        throw ValidationError("intensity_max must not exceed 1");
    if (std::abs(angle_at(angle_count() - 1) - angle_max_deg) > 1e-9)
        throw ValidationError(
            "angle_max_deg is not reachable from angle_min_deg in "
            "angle_step_deg increments");
    if (std::abs(intensity_at(intensity_count() - 1) - intensity_max) > 1e-9)
        throw ValidationError(
            "intensity_max is not reachable from intensity_min in "
            "intensity_step increments");
    if (anchors.empty())
        throw ValidationError("at least one emotion anchor is required");
    std::set<std::string> names;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        const EmotionAnchor& a = anchors[i];
        if (a.emotion.empty())
            throw ValidationError("anchor " + std::to_string(i) +
                                  " has an empty emotion name");
        if (!names.insert(a.emotion).second)
            throw ValidationError("duplicate anchor emotion " + a.emotion);
        if (i > 0 && !(anchors[i - 1].angle_deg < a.angle_deg))
            throw ValidationError(
                "anchor angles must be strictly increasing, but " +
                anchors[i - 1].emotion + " (" +
                std::to_string(anchors[i - 1].angle_deg) + ") precedes " +
                a.emotion + " (" + std::to_string(a.angle_deg) + ")");
        const double steps = (a.angle_deg - angle_min_deg) / angle_step_deg;
        const double nearest = std::max(0.0, std::round(steps));
        if (std::abs(angle_at(static_cast<std::size_t>(nearest)) -
                     a.angle_deg) > 1e-9)
            throw ValidationError("anchor " + a.emotion + " at " +
                                  std::to_string(a.angle_deg) +
                                  " is not on the angle grid");
    }
    if (std::abs(anchors.front().angle_deg - angle_min_deg) > 1e-9 ||
        std::abs(anchors.back().angle_deg - angle_max_deg) > 1e-9)
        throw ValidationError(
            "the first anchor must sit at angle_min_deg and the last at "
            "angle_max_deg");
}

std::size_t VATemplate::angle_count() const {
    return static_cast<std::size_t>(
               std::floor((angle_max_deg - angle_min_deg) / angle_step_deg +
                          1e-9)) +
           1;
}

std::size_t VATemplate::intensity_count() const {
    return static_cast<std::size_t>(
               std::floor((intensity_max - intensity_min) / intensity_step +
                          1e-9)) +
           1;
}

double VATemplate::angle_at(std::size_t i) const {
    return snap9(angle_min_deg + static_cast<double>(i) * angle_step_deg);
}

double VATemplate::intensity_at(std::size_t i) const {
    return snap9(intensity_min + static_cast<double>(i) * intensity_step);
}

nlohmann::ordered_json VATemplate::to_json() const {
    nlohmann::ordered_json j;
    j["angle_min_deg"] = angle_min_deg;
    j["angle_max_deg"] = angle_max_deg;
    j["angle_step_deg"] = angle_step_deg;
    j["intensity_min"] = intensity_min;
    j["intensity_max"] = intensity_max;
    j["intensity_step"] = intensity_step;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const EmotionAnchor& a : anchors)
        arr.push_back({{"emotion", a.emotion}, {"angle_deg", a.angle_deg}});
    j["anchors"] = std::move(arr);
    return j;
}

VATemplate VATemplate::from_json(const nlohmann::json& j) {
    VATemplate t;
    try {
        t.angle_min_deg = j.at("angle_min_deg").get<double>();
        t.angle_max_deg = j.at("angle_max_deg").get<double>();
        t.angle_step_deg = j.at("angle_step_deg").get<double>();
        t.intensity_min = j.at("intensity_min").get<double>();
        t.intensity_max = j.at("intensity_max").get<double>();
        t.intensity_step = j.at("intensity_step").get<double>();
        for (const auto& a : j.at("anchors")) {
            t.anchors.push_back({a.at("emotion").get<std::string>(),
                                 a.at("angle_deg").get<double>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed template JSON: ") +
                              e.what());
    }
    t.validate();
    return t;
}

const char* to_string(GridPointKind kind) {
    switch (kind) {
        case GridPointKind::neutral: return "neutral";
        case GridPointKind::prototype: return "prototype";
        case GridPointKind::synthesized: return "synthesized";
    }
    return "unknown";
}

std::pair<double, double> polar_to_va(double angle_deg, double intensity) {
    if (!(intensity >= 0.0 && intensity <= 1.0))
        throw ValidationError("intensity must lie in [0,1], got " +
                              std::to_string(intensity));
    const double rad = angle_deg * std::numbers::pi / 180.0;
    return {intensity * std::cos(rad), intensity * std::sin(rad)};
}

std::vector<GridPoint> build_grid(const VATemplate& tmpl) {
    tmpl.validate();
    std::vector<GridPoint> grid;
    grid.reserve(tmpl.angle_count() * tmpl.intensity_count() + 1);

    GridPoint neutral;
    neutral.angle_deg = std::nullopt;
    neutral.intensity = 0.0;
    neutral.valence = 0.0;
    neutral.arousal = 0.0;
    neutral.kind = GridPointKind::neutral;
    grid.push_back(neutral);

    const auto is_anchor_apex = [&](double angle, double intensity) {
        if (std::abs(intensity - tmpl.intensity_max) > 1e-9) return false;
        return std::any_of(tmpl.anchors.begin(), tmpl.anchors.end(),
                           [&](const EmotionAnchor& a) {
                               return std::abs(a.angle_deg - angle) < 1e-9;
                           });
    };

    for (std::size_t ai = 0; ai < tmpl.angle_count(); ++ai) {
        const double angle = tmpl.angle_at(ai);
        for (std::size_t ii = 0; ii < tmpl.intensity_count(); ++ii) {
            const double intensity = tmpl.intensity_at(ii);
            GridPoint p;
            p.angle_deg = angle;
            p.intensity = intensity;
            std::tie(p.valence, p.arousal) = polar_to_va(angle, intensity);
            p.kind = is_anchor_apex(angle, intensity)
                         ? GridPointKind::prototype
                         : GridPointKind::synthesized;
            grid.push_back(p);
        }
    }
    return grid;
}

std::vector<MorphPlan> plan_morphs(std::span<const GridPoint> grid,
                                   const VATemplate& tmpl) {
    tmpl.validate();
    std::vector<MorphPlan> plans;
    plans.reserve(grid.size());
    for (const GridPoint& p : grid) {
        if (p.kind == GridPointKind::neutral) continue;
        if (!p.angle_deg)
            throw ValidationError(
                "non-neutral grid point is missing its angle");
        const double angle = *p.angle_deg;
        if (angle < tmpl.anchors.front().angle_deg - 1e-9 ||
            angle > tmpl.anchors.back().angle_deg + 1e-9)
            throw ValidationError("grid angle " + std::to_string(angle) +
                                  " lies outside the anchor span");

        MorphPlan plan;
        plan.target = p;
        plan.intensity_weight = p.intensity;

        // An angle landing exactly on an anchor is that anchor alone (t = 0);
        // otherwise blend the two bounding anchors.
        const auto exact = std::find_if(
            tmpl.anchors.begin(), tmpl.anchors.end(),
            [&](const EmotionAnchor& a) {
                return std::abs(a.angle_deg - angle) < 1e-9;
            });
        if (exact != tmpl.anchors.end()) {
            plan.apex_a = exact->emotion;
            plan.apex_b = exact->emotion;
            plan.angle_weight = 0.0;
        } else {
            std::size_t seg = tmpl.anchors.size() - 2;
            for (std::size_t i = 0; i + 1 < tmpl.anchors.size(); ++i) {
                if (angle < tmpl.anchors[i + 1].angle_deg) {
                    seg = i;
                    break;
                }
            }
            const EmotionAnchor& a = tmpl.anchors[seg];
            const EmotionAnchor& b = tmpl.anchors[seg + 1];
            plan.apex_a = a.emotion;
            plan.apex_b = b.emotion;
            plan.angle_weight =
                (angle - a.angle_deg) / (b.angle_deg - a.angle_deg);
        }
        plans.push_back(std::move(plan));
    }
    return plans;
}

std::string blend_label(const MorphPlan& plan) {
    if (plan.target.kind == GridPointKind::neutral) return "NEUTRAL";
    const int pb = static_cast<int>(std::lround(plan.angle_weight * 100.0));
    const int pa = 100 - pb;
    if (pb == 0) return plan.apex_a;
    if (pb == 100) return plan.apex_b;
    return plan.apex_a + "_" + std::to_string(pa) + "%_" + plan.apex_b + "_" +
           std::to_string(pb) + "%";
}

}  // namespace vamorph
