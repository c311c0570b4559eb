#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "vamorph/errors.hpp"
#include "vamorph/manifest.hpp"
#include "vamorph/metrics.hpp"

using namespace vamorph;
namespace fs = std::filesystem;

namespace {

// Reference metrics via raw moments in extended precision — a different
// computational route than the library's centered accumulation.
double rmse_oracle(const std::vector<double>& p, const std::vector<double>& t) {
    long double sq = 0.0L;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const long double d =
            static_cast<long double>(p[i]) - static_cast<long double>(t[i]);
        sq += d * d;
    }
    return static_cast<double>(sqrtl(sq / static_cast<long double>(p.size())));
}

double ccc_oracle(const std::vector<double>& p, const std::vector<double>& t) {
    const long double n = static_cast<long double>(p.size());
    long double sp = 0, st = 0, spp = 0, stt = 0, spt = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const long double x = p[i], y = t[i];
        sp += x;
        st += y;
        spp += x * x;
        stt += y * y;
        spt += x * y;
    }
    const long double mp = sp / n, mt = st / n;
    const long double var_p = spp / n - mp * mp;
    const long double var_t = stt / n - mt * mt;
    const long double cov = spt / n - mp * mt;
    const long double gap = mp - mt;
    return static_cast<double>(2.0L * cov / (var_p + var_t + gap * gap));
}

struct TempDir {
    fs::path path;

    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("vamorph_mt_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

SampleRecord labeled_record(const std::string& path, const std::string& emotion,
                            double valence, double arousal) {
    SampleRecord r;
    r.image_path = path;
    r.subject_id = "s01";
    r.emotion_label = emotion;
    r.valence = valence;
    r.arousal = arousal;
    return r;
}

PredictionEntry entry(const std::string& key, double v, double a) {
    return PredictionEntry{key, v, a};
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("rmse matches hand arithmetic") {
    const std::vector<double> t = {0.1, 0.4, 0.7};
    CHECK(rmse(t, t) == 0.0);

    const std::vector<double> ones = {1, 1};
    const std::vector<double> zeros = {0, 0};
    CHECK(rmse(ones, zeros) == 1.0);

    const std::vector<double> p = {0.2, 0.4, 0.9};
    CHECK(std::abs(rmse(p, t) - rmse_oracle(p, t)) <= 1e-12);
    CHECK(rmse(p, t) == doctest::Approx(0.129099).epsilon(1e-4));
}

TEST_CASE("rmse input validation") {
    const std::vector<double> a = {1, 2};
    const std::vector<double> b = {1, 2, 3};
    CHECK_THROWS_WITH_AS(rmse(a, b), doctest::Contains("differ in length"),
                         ValidationError);
    const std::vector<double> none;
    CHECK_THROWS_AS(rmse(none, none), ValidationError);
}

TEST_CASE("ccc of a sequence with itself is exactly one") {
    const std::vector<double> x = {0.1, -0.4, 0.9, 0.3};
    CHECK(ccc(x, x) == 1.0);
}

TEST_CASE("ccc of a constant against anything varying is zero") {
    const std::vector<double> varying = {0.1, 0.5, -0.3};
    const std::vector<double> half = {0.5, 0.5, 0.5};
    CHECK(ccc(half, varying) == 0.0);

    const std::vector<double> awkward = {0.3, 0.3, 0.3};
    CHECK(std::abs(ccc(awkward, varying)) <= 1e-12);
}

TEST_CASE("ccc is symmetric") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<double> x(10), y(10);
        for (auto& v : x) v = val(rng);
        for (auto& v : y) v = val(rng);
        CHECK(std::abs(ccc(x, y) - ccc(y, x)) <= 1e-12);
    }
}

TEST_CASE("ccc degenerate and error cases") {
    const std::vector<double> c1 = {0.5, 0.5};
    CHECK_THROWS_WITH_AS(ccc(c1, c1), doctest::Contains("degenerate CCC"),
                         ComputeError);

    // Two different constants: zero covariance over a positive denominator.
    const std::vector<double> lo = {0.25, 0.25};
    const std::vector<double> hi = {0.75, 0.75};
    CHECK(ccc(lo, hi) == 0.0);

    const std::vector<double> one = {0.5};
    CHECK_THROWS_WITH_AS(ccc(one, one), doctest::Contains("at least 2"),
                         ValidationError);
    const std::vector<double> two = {0.5, 0.6};
    const std::vector<double> three = {0.5, 0.6, 0.7};
    CHECK_THROWS_WITH_AS(ccc(two, three), doctest::Contains("differ in length"),
                         ValidationError);
}

TEST_CASE("ccc penalizes scale even at perfect correlation") {
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::vector<double> x(40), doubled(40);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = val(rng);
        doubled[i] = 2.0 * x[i];
    }

    const double got = ccc(doubled, x);
    CHECK(got < 1.0);

    long double sx = 0, sxx = 0;
    for (double v : x) {
        sx += v;
        sxx += static_cast<long double>(v) * v;
    }
    const long double n = static_cast<long double>(x.size());
    const long double mean = sx / n;
    const long double var = sxx / n - mean * mean;
    const double closed_form =
        static_cast<double>(4.0L * var / (5.0L * var + mean * mean));
    CHECK(std::abs(got - closed_form) <= 1e-9);
}

TEST_CASE("both metrics agree with the oracles on 1000 random instances") {
    std::mt19937 rng(20240818);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_int_distribution<int> len(2, 100);
    for (int iter = 0; iter < 1000; ++iter) {
        std::vector<double> p(static_cast<std::size_t>(len(rng)));
        std::vector<double> t(p.size());
        for (auto& v : p) v = val(rng);
        for (auto& v : t) v = val(rng);
        CHECK(std::abs(rmse(p, t) - rmse_oracle(p, t)) <= 1e-12);
        CHECK(std::abs(ccc(p, t) - ccc_oracle(p, t)) <= 1e-12);
    }
}

TEST_CASE("evaluate scores aligned predictions") {
    std::vector<SampleRecord> records;
    PredictionSet preds;
    const double vs[] = {0.9, 0.7, 0.5, -0.2, -0.4, -0.5, -0.6, -0.8};
    const double as[] = {0.2, 0.4, 0.6, -0.7, -0.5, -0.3, -0.1, 0.1};
    for (int i = 0; i < 8; ++i) {
        const std::string emotion = i < 3 ? "HAPPY" : "SAD";
        const std::string path = "img" + std::to_string(i) + ".png";
        records.push_back(labeled_record(path, emotion, vs[i], as[i]));
        preds.entries.push_back(entry(path, vs[i], as[i]));
    }

    const EvalReport report = evaluate(records, preds, true);
    CHECK(report.n == 8);
    CHECK(report.global.count == 8);
    CHECK(report.global.rmse_valence == 0.0);
    CHECK(report.global.rmse_arousal == 0.0);
    CHECK(report.global.rmse_2d == 0.0);
    REQUIRE(report.global.ccc_valence.has_value());
    CHECK(*report.global.ccc_valence == 1.0);
    CHECK(*report.global.ccc_arousal == 1.0);

    REQUIRE(report.per_emotion.size() == 2);
    CHECK(report.per_emotion.at("HAPPY").count == 3);
    CHECK(report.per_emotion.at("SAD").count == 5);
    CHECK(report.per_emotion.at("HAPPY").rmse_valence == 0.0);
    REQUIRE(report.per_emotion.at("SAD").ccc_arousal.has_value());
    CHECK(*report.per_emotion.at("SAD").ccc_arousal == 1.0);

    SUBCASE("grouping off leaves per_emotion empty") {
        const EvalReport flat = evaluate(records, preds, false);
        CHECK(flat.per_emotion.empty());
        CHECK(flat.n == 8);
    }
}

TEST_CASE("evaluate on a single record reports the Euclidean error") {
    const std::vector<SampleRecord> records = {
        labeled_record("a.png", "NEUTRAL", 0.0, 0.0)};
    PredictionSet preds;
    preds.entries.push_back(entry("a.png", 0.3, 0.4));

    const EvalReport report = evaluate(records, preds, true);
    CHECK(report.global.rmse_valence == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(report.global.rmse_arousal == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(report.global.rmse_2d == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(!report.global.ccc_valence.has_value());
    CHECK(report.per_emotion.size() == 1);
    CHECK(report.per_emotion.at("NEUTRAL").count == 1);

    const nlohmann::ordered_json j = report.to_json();
    CHECK(j["n"] == 1);
    CHECK(j["global"]["ccc_valence"].is_null());
    CHECK(j["per_emotion"]["NEUTRAL"]["count"] == 1);
}

TEST_CASE("evaluate refuses misaligned or duplicated predictions") {
    const std::vector<SampleRecord> records = {
        labeled_record("a.png", "HAPPY", 0.1, 0.2),
        labeled_record("b.png", "HAPPY", 0.3, 0.4)};

    SUBCASE("missing and extra keys are both reported") {
        PredictionSet preds;
        preds.entries.push_back(entry("b.png", 0.3, 0.4));
        preds.entries.push_back(entry("c.png", 0.0, 0.0));
        try {
            evaluate(records, preds, false);
            FAIL("expected misalignment error");
        } catch (const ValidationError& e) {
            const std::string what = e.what();
            CHECK(what.find("missing: a.png") != std::string::npos);
            CHECK(what.find("extra: c.png") != std::string::npos);
        }
    }
    SUBCASE("duplicate prediction keys") {
        PredictionSet preds;
        preds.entries.push_back(entry("a.png", 0.1, 0.2));
        preds.entries.push_back(entry("a.png", 0.1, 0.2));
        preds.entries.push_back(entry("b.png", 0.3, 0.4));
        CHECK_THROWS_WITH_AS(evaluate(records, preds, false),
                             doctest::Contains("duplicate prediction"),
                             ValidationError);
    }
    SUBCASE("no records") {
        CHECK_THROWS_AS(evaluate(std::vector<SampleRecord>{}, PredictionSet{},
                                 false),
                        ValidationError);
    }
}

TEST_CASE("heatmap bins by ground truth with inclusive upper edges") {
    SUBCASE("point mass at the origin") {
        std::vector<SampleRecord> records;
        PredictionSet preds;
        for (int i = 0; i < 10; ++i) {
            const std::string path = "p" + std::to_string(i) + ".png";
            records.push_back(labeled_record(path, "NEUTRAL", 0.0, 0.0));
            preds.entries.push_back(entry(path, 0.1, -0.2));
        }
        const HeatmapGrid grid = heatmap(records, preds, 4);
        CHECK(grid.resolution == 4);
        std::size_t total = 0;
        for (const HeatmapCell& c : grid.cells) total += c.count;
        CHECK(total == 10);
        CHECK(grid.cell(2, 2).count == 10);
        CHECK(grid.cell(2, 2).rmse_valence == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(grid.cell(2, 2).rmse_arousal == doctest::Approx(0.2).epsilon(1e-12));
        CHECK(grid.cell(0, 0).count == 0);
        CHECK(grid.cell(0, 0).rmse_valence == 0.0);
    }

    SUBCASE("corners of the square land in the outermost bins") {
        const std::vector<SampleRecord> records = {
            labeled_record("hi.png", "X", 1.0, 1.0),
            labeled_record("lo.png", "X", -1.0, -1.0)};
        PredictionSet preds;
        preds.entries.push_back(entry("hi.png", 1.0, 1.0));
        preds.entries.push_back(entry("lo.png", -1.0, -1.0));
        const HeatmapGrid grid = heatmap(records, preds, 8);
        CHECK(grid.cell(7, 7).count == 1);
        CHECK(grid.cell(0, 0).count == 1);
    }

    SUBCASE("uniform samples spread evenly at resolution 2") {
        std::mt19937 rng(77);
        std::uniform_real_distribution<double> val(-1.0, 1.0);
        std::vector<SampleRecord> records;
        PredictionSet preds;
        for (int i = 0; i < 1000; ++i) {
            const std::string path = "u" + std::to_string(i) + ".png";
            records.push_back(
                labeled_record(path, "X", val(rng), val(rng)));
            preds.entries.push_back(entry(path, 0.0, 0.0));
        }
        const HeatmapGrid grid = heatmap(records, preds, 2);
        std::size_t total = 0;
        for (const HeatmapCell& c : grid.cells) {
            CHECK(c.count >= 180);
            CHECK(c.count <= 320);
            total += c.count;
        }
        CHECK(total == 1000);
    }

    SUBCASE("counts are conserved at any resolution") {
        std::mt19937 rng(78);
        std::uniform_real_distribution<double> val(-1.0, 1.0);
        std::vector<SampleRecord> records;
        PredictionSet preds;
        for (int i = 0; i < 137; ++i) {
            const std::string path = "c" + std::to_string(i) + ".png";
            records.push_back(labeled_record(path, "X", val(rng), val(rng)));
            preds.entries.push_back(entry(path, val(rng), val(rng)));
        }
        for (int res : {2, 3, 5, 16}) {
            const HeatmapGrid grid = heatmap(records, preds, res);
            std::size_t total = 0;
            for (const HeatmapCell& c : grid.cells) total += c.count;
            CHECK(total == 137);
        }
    }

    SUBCASE("errors") {
        const std::vector<SampleRecord> records = {
            labeled_record("a.png", "X", 0.0, 0.0)};
        CHECK_THROWS_WITH_AS(heatmap(records, PredictionSet{}, 4),
                             doctest::Contains("no prediction"),
                             ValidationError);
        PredictionSet preds;
        preds.entries.push_back(entry("a.png", 0.0, 0.0));
        CHECK_THROWS_WITH_AS(heatmap(records, preds, 1),
                             doctest::Contains("at least 2"), ValidationError);
    }
}

TEST_CASE("heatmap rendering maps cells to fixed colors and CSV") {
    HeatmapGrid grid;
    grid.resolution = 2;
    grid.cells.assign(4, {});
    grid.cells[0] = {2, 0.0, 0.1};   // arousal bin 0, valence bin 0
    grid.cells[3] = {1, 0.5, 0.25};  // arousal bin 1, valence bin 1

    const RenderedHeatmap rendered = render_heatmap(grid, VaDimension::valence);

    CHECK(rendered.csv ==
          "arousal_center,v=-0.500000,v=0.500000\n"
          "0.500000,,0.500000\n"
          "-0.500000,0.000000,\n");

    // Block centers: top row is the high-arousal bin.
    const RasterImage& img = rendered.image;
    REQUIRE(img.width == 64);
    REQUIRE(img.height == 64);
    // max cell -> red
    CHECK(img.at(48, 16, 0) == 255);
    CHECK(img.at(48, 16, 1) == 0);
    CHECK(img.at(48, 16, 2) == 0);
    // zero-rmse cell -> blue
    CHECK(img.at(16, 48, 0) == 0);
    CHECK(img.at(16, 48, 2) == 255);
    // empty cells -> mid-gray
    CHECK(img.at(16, 16, 0) == 128);
    CHECK(img.at(16, 16, 1) == 128);
    CHECK(img.at(16, 16, 2) == 128);
    CHECK(img.at(48, 48, 0) == 128);

    SUBCASE("rendering is deterministic") {
        const RenderedHeatmap again = render_heatmap(grid, VaDimension::valence);
        CHECK(again.csv == rendered.csv);
        CHECK(again.image.samples == rendered.image.samples);
    }

    SUBCASE("the other dimension reads the arousal channel") {
        const RenderedHeatmap arousal =
            render_heatmap(grid, VaDimension::arousal);
        CHECK(arousal.csv.find("0.250000") != std::string::npos);
    }
}

TEST_CASE("prediction files round-trip and are validated") {
    TempDir tmp;
    PredictionSet preds;
    preds.entries.push_back(entry("a.png", 0.125, -0.5));
    preds.entries.push_back(entry("b.png", 1.0, -1.0));
    const fs::path p = tmp.path / "preds.jsonl";
    write_predictions(preds, p);

    const PredictionSet back = read_predictions(p);
    REQUIRE(back.entries.size() == 2);
    CHECK(back.entries[0].record_key == "a.png");
    CHECK(back.entries[0].valence == 0.125);
    CHECK(back.entries[1].arousal == -1.0);

    SUBCASE("out-of-range predictions are rejected") {
        std::ofstream out(p, std::ios::app);
        out << R"({"image_path":"c.png","valence":1.5,"arousal":0.0})" << "\n";
        out.close();
        CHECK_THROWS_WITH_AS(read_predictions(p),
                             doctest::Contains(":3: prediction"),
                             ValidationError);
    }
    SUBCASE("malformed lines are rejected with their line number") {
        std::ofstream out(p, std::ios::app);
        out << "{broken\n";
        out.close();
        CHECK_THROWS_WITH_AS(read_predictions(p),
                             doctest::Contains(":3: malformed prediction"),
                             ValidationError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_predictions(tmp.path / "nope.jsonl"), IoError);
    }
}

}  // TEST_SUITE
