#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace vamorph {

struct EmotionAnchor {
    std::string emotion;
    double angle_deg = 0.0;
};

// Polar sampling plan over the circumplex: an angular fan of emotion anchors
// crossed with an intensity ladder, plus the neutral center.
struct VATemplate {
    double angle_min_deg = 0.0;
    double angle_max_deg = 0.0;
    double angle_step_deg = 0.0;
    double intensity_min = 0.0;
    double intensity_max = 0.0;
    double intensity_step = 0.0;
    std::vector<EmotionAnchor> anchors;

    static VATemplate defaults();

    void validate() const;  // throws ValidationError

    std::size_t angle_count() const;
    std::size_t intensity_count() const;
    double angle_at(std::size_t i) const;
    double intensity_at(std::size_t i) const;

    nlohmann::ordered_json to_json() const;
    static VATemplate from_json(const nlohmann::json& j);
};

enum class GridPointKind { neutral, prototype, synthesized };
const char* to_string(GridPointKind kind);

struct GridPoint {
    std::optional<double> angle_deg;  // absent for the neutral center
    double intensity = 0.0;
    double valence = 0.0;
    double arousal = 0.0;
    GridPointKind kind = GridPointKind::synthesized;
};

// Recipe for one grid point: blend the two bounding apex expressions with
// angular weight t, then blend the result against neutral with intensity r.
struct MorphPlan {
    GridPoint target;
    std::string apex_a;
    std::string apex_b;
    double angle_weight = 0.0;      // t in [0,1] along [apex_a, apex_b]
    double intensity_weight = 0.0;  // r, equals target intensity
};

std::pair<double, double> polar_to_va(double angle_deg, double intensity);

// Neutral first, then (angle asc, intensity asc). Cardinality is
// angle_count * intensity_count + 1.
std::vector<GridPoint> build_grid(const VATemplate& tmpl);

// One plan per non-neutral grid point, in grid order.
std::vector<MorphPlan> plan_morphs(std::span<const GridPoint> grid,
                                   const VATemplate& tmpl);

// "NEUTRAL", an anchor name when t = 0, otherwise e.g. "HAPPY_75%_SURPRISE_25%".
std::string blend_label(const MorphPlan& plan);

}  // namespace vamorph
