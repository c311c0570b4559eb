#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vamorph/baseline.hpp"
#include "vamorph/dataset.hpp"
#include "vamorph/errors.hpp"
#include "vamorph/image.hpp"
#include "vamorph/manifest.hpp"
#include "vamorph/metrics.hpp"
#include "vamorph/nir_proxy.hpp"
#include "vamorph/parallel.hpp"
#include "vamorph/va_space.hpp"

namespace fs = std::filesystem;
using namespace vamorph;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitCompute = 4;

VATemplate load_template(const std::string& path) {
    if (path.empty()) return VATemplate::defaults();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open template " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed template JSON in " + path + ": " +
                              e.what());
    }
    return VATemplate::from_json(j);
}

std::vector<SampleRecord> records_for_split(const Manifest& m, Split want) {
    std::vector<SampleRecord> out;
    for (const SampleRecord& r : m.records)
        if (r.split == want) out.push_back(r);
    return out;
}

int run_plan(const std::string& template_path, const std::string& format,
             const std::string& out_path) {
    const VATemplate tmpl = load_template(template_path);
    const std::vector<GridPoint> grid = build_grid(tmpl);
    const std::vector<MorphPlan> plans = plan_morphs(grid, tmpl);

    std::ostringstream out;
    if (format == "json") {
        nlohmann::ordered_json doc;
        doc["template"] = tmpl.to_json();
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        {
            // The neutral center has no morph plan; list it first anyway.
            nlohmann::ordered_json row;
            row["label"] = "NEUTRAL";
            row["kind"] = "neutral";
            row["intensity"] = 0.0;
            row["valence"] = 0.0;
            row["arousal"] = 0.0;
            rows.push_back(std::move(row));
        }
        for (const MorphPlan& p : plans) {
            nlohmann::ordered_json row;
            row["label"] = blend_label(p);
            row["kind"] = to_string(p.target.kind);
            row["angle_deg"] = *p.target.angle_deg;
            row["intensity"] = p.target.intensity;
            row["valence"] = p.target.valence;
            row["arousal"] = p.target.arousal;
            row["apex_a"] = p.apex_a;
            row["apex_b"] = p.apex_b;
            row["angle_weight"] = p.angle_weight;
            rows.push_back(std::move(row));
        }
        doc["points"] = std::move(rows);
        out << doc.dump(2) << '\n';
    } else {
        char line[160];
        std::snprintf(line, sizeof(line), "%-28s %-12s %9s %9s %9s %9s\n",
                      "label", "kind", "angle", "intensity", "valence",
                      "arousal");
        out << line;
        std::snprintf(line, sizeof(line), "%-28s %-12s %9s %9.4f %9.4f %9.4f\n",
                      "NEUTRAL", "neutral", "-", 0.0, 0.0, 0.0);
        out << line;
        for (const MorphPlan& p : plans) {
            std::snprintf(line, sizeof(line),
                          "%-28s %-12s %9.1f %9.4f %9.4f %9.4f\n",
                          blend_label(p).c_str(), to_string(p.target.kind),
                          *p.target.angle_deg, p.target.intensity,
                          p.target.valence, p.target.arousal);
            out << line;
        }
    }
    if (out_path.empty())
        std::cout << out.str();
    else
        atomic_write_text(out_path, out.str());
    return 0;
}

int run_augment(const std::string& input_path, const std::string& out_dir,
                const std::string& template_path, unsigned workers) {
    const VATemplate tmpl = load_template(template_path);
    const Manifest input = read_manifest(input_path, /*validate_files=*/true);
    const fs::path input_dir = fs::path(input_path).parent_path();

    std::cerr << "augmenting " << input.records.size() << " source records\n";
    AugmentResult result =
        augment_dataset(input, input_dir, tmpl, out_dir, workers);

    write_manifest(result.manifest, fs::path(out_dir) / "manifest.jsonl");
    atomic_write_text(fs::path(out_dir) / "template.json",
                      tmpl.to_json().dump(2) + "\n");
    write_rejections(result.rejections,
                     fs::path(out_dir) / "rejections.jsonl");
    std::cerr << "wrote " << result.manifest.records.size() << " records, "
              << result.rejections.size() << " rejections\n";
    return 0;
}

int run_translate(const std::string& input_path, const std::string& stats_path,
                  const std::string& out_dir, unsigned workers) {
    const Manifest input = read_manifest(input_path, /*validate_files=*/true);
    std::ifstream in(stats_path);
    if (!in) throw IoError("cannot open stats file " + stats_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed stats JSON in " + stats_path + ": " +
                              e.what());
    }
    const NirReferenceStats stats = NirReferenceStats::from_json(j);

    std::cerr << "translating " << input.records.size() << " records\n";
    const Manifest out = translate_dataset(
        input, fs::path(input_path).parent_path(), stats, out_dir, workers);
    write_manifest(out, fs::path(out_dir) / "manifest.jsonl");
    return 0;
}

int run_nir_stats(const std::string& images_dir, const std::string& out_path) {
    std::vector<fs::path> paths;
    if (!fs::is_directory(images_dir))
        throw IoError("reference image directory " + images_dir +
                      " does not exist");
    for (const auto& entry : fs::directory_iterator(images_dir))
        if (entry.is_regular_file()) paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());

    std::vector<RasterImage> images;
    for (const fs::path& p : paths) {
        RasterImage img = load_image(p);
        if (img.channels != 1)
            throw ValidationError("reference image " + p.string() +
                                  " is not grayscale");
        images.push_back(std::move(img));
    }
    const NirReferenceStats stats = compute_reference_stats(images);
    atomic_write_text(out_path, stats.to_json().dump(2) + "\n");
    std::cerr << "pooled " << images.size() << " reference images\n";
    return 0;
}

int run_split(const std::string& input_path, const std::string& out_path,
              double fraction, std::uint64_t seed) {
    const Manifest input = read_manifest(input_path);
    const Manifest out = split_by_identity(input, fraction, seed);
    write_manifest(out, out_path);

    std::size_t test_records = 0;
    for (const SampleRecord& r : out.records)
        if (r.split == Split::test) ++test_records;
    std::cerr << "assigned " << test_records << " of " << out.records.size()
              << " records to test\n";
    return 0;
}

int run_train(const std::string& input_path, const std::string& out_path,
              double lambda, int d_side, unsigned workers) {
    const Manifest input = read_manifest(input_path, /*validate_files=*/true);
    const std::vector<SampleRecord> train =
        records_for_split(input, Split::train);
    if (train.empty())
        throw ValidationError(
            "no split=train records in the manifest; run `split` first");
    const fs::path base = fs::path(input_path).parent_path();

    std::cerr << "extracting features from " << train.size()
              << " training records\n";
    std::vector<FeatureVector> features(train.size());
    std::vector<std::array<double, 2>> labels(train.size());
    parallel_for(train.size(), workers, [&](std::size_t i) {
        const RasterImage img = load_image(base / train[i].image_path);
        features[i] = extract_features(img, d_side);
        labels[i] = {train[i].valence, train[i].arousal};
    });

    const RidgeModel model = fit(features, labels, lambda, d_side);
    atomic_write_text(out_path, model.to_json().dump() + "\n");
    std::cerr << "fit ridge model on " << train.size() << " samples\n";
    return 0;
}

RidgeModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed model JSON in " + path + ": " +
                              e.what());
    }
    return RidgeModel::from_json(j);
}

int run_predict(const std::string& input_path, const std::string& model_path,
                const std::string& out_path, const std::string& split_name,
                unsigned workers) {
    const Manifest input = read_manifest(input_path, /*validate_files=*/true);
    const RidgeModel model = load_model(model_path);
    const std::vector<SampleRecord> records =
        records_for_split(input, split_from_string(split_name));
    if (records.empty())
        throw ValidationError("no split=" + split_name +
                              " records in the manifest");
    const fs::path base = fs::path(input_path).parent_path();

    PredictionSet preds;
    preds.entries.resize(records.size());
    parallel_for(records.size(), workers, [&](std::size_t i) {
        const RasterImage img = load_image(base / records[i].image_path);
        const FeatureVector fv = extract_features(img, model.d_side);
        const auto [v, a] = predict(model, fv);
        preds.entries[i] = {records[i].image_path, v, a};
    });

    write_predictions(preds, out_path);
    std::cerr << "predicted " << preds.entries.size() << " records\n";
    return 0;
}

int run_evaluate(const std::string& input_path, const std::string& preds_path,
                 const std::string& out_path, const std::string& split_name,
                 bool group) {
    const Manifest input = read_manifest(input_path);
    const std::vector<SampleRecord> records =
        records_for_split(input, split_from_string(split_name));
    if (records.empty())
        throw ValidationError("no split=" + split_name +
                              " records in the manifest");
    const PredictionSet preds = read_predictions(preds_path);
    const EvalReport report = evaluate(records, preds, group);
    const std::string text = report.to_json().dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        atomic_write_text(out_path, text);
    return 0;
}

int run_heatmap(const std::string& input_path, const std::string& preds_path,
                const std::string& out_prefix, const std::string& split_name,
                int resolution) {
    const Manifest input = read_manifest(input_path);
    const std::vector<SampleRecord> records =
        records_for_split(input, split_from_string(split_name));
    if (records.empty())
        throw ValidationError("no split=" + split_name +
                              " records in the manifest");
    const PredictionSet preds = read_predictions(preds_path);
    const HeatmapGrid grid = heatmap(records, preds, resolution);

    const RenderedHeatmap valence = render_heatmap(grid, VaDimension::valence);
    const RenderedHeatmap arousal = render_heatmap(grid, VaDimension::arousal);
    atomic_write_text(out_prefix + "_valence.csv", valence.csv);
    atomic_write_text(out_prefix + "_arousal.csv", arousal.csv);
    save_png(valence.image, out_prefix + "_valence.png");
    save_png(arousal.image, out_prefix + "_arousal.png");
    std::cerr << "rendered " << resolution << "x" << resolution
              << " heatmaps\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Valence-arousal dataset augmentation via landmark morphing"};
    app.require_subcommand(1);

    std::string input_path, out_path, out_dir, template_path, stats_path;
    std::string model_path, preds_path, images_dir, format = "table";
    std::string split_name = "test";
    unsigned workers = 1;
    std::uint64_t seed = 42;
    double fraction = 0.1;
    double lambda = 1.0;
    int d_side = 32;
    int resolution = 8;
    bool group = false;

    CLI::App* plan = app.add_subcommand(
        "plan", "List the morph grid for a template");
    plan->add_option("--template", template_path,
                     "Template JSON (defaults to the built-in grid)");
    plan->add_option("--format", format, "Output format: table or json")
        ->check(CLI::IsMember({"table", "json"}));
    plan->add_option("--out", out_path, "Write to a file instead of stdout");

    CLI::App* augment = app.add_subcommand(
        "augment", "Synthesize the morph grid for every subject");
    augment->add_option("--input", input_path, "Input manifest JSONL")
        ->required();
    augment->add_option("--out-dir", out_dir, "Output dataset directory")
        ->required();
    augment->add_option("--template", template_path, "Template JSON");
    augment->add_option("--workers", workers, "Parallel workers");

    CLI::App* translate = app.add_subcommand(
        "translate", "Translate VL records to synthetic NIR");
    translate->add_option("--input", input_path, "Input manifest JSONL")
        ->required();
    translate->add_option("--stats", stats_path, "Reference stats JSON")
        ->required();
    translate->add_option("--out-dir", out_dir, "Output dataset directory")
        ->required();
    translate->add_option("--workers", workers, "Parallel workers");

    CLI::App* nir_stats = app.add_subcommand(
        "nir-stats", "Pool grayscale reference images into matching stats");
    nir_stats->add_option("--images", images_dir, "Directory of PNG/JPEG refs")
        ->required();
    nir_stats->add_option("--out", out_path, "Output stats JSON")->required();

    CLI::App* split = app.add_subcommand(
        "split", "Assign identity-disjoint train/test splits");
    split->add_option("--input", input_path, "Input manifest JSONL")
        ->required();
    split->add_option("--out", out_path, "Output manifest JSONL")->required();
    split->add_option("--test-fraction", fraction,
                      "Fraction of subjects assigned to test");
    split->add_option("--seed", seed, "Shuffle seed");

    CLI::App* train = app.add_subcommand(
        "train-baseline", "Fit the ridge baseline on split=train records");
    train->add_option("--input", input_path, "Input manifest JSONL")
        ->required();
    train->add_option("--out", out_path, "Output model JSON")->required();
    train->add_option("--lambda", lambda, "Ridge regularization strength");
    train->add_option("--d-side", d_side, "Downsampled feature grid side");
    train->add_option("--workers", workers, "Parallel workers");

    CLI::App* predict_cmd = app.add_subcommand(
        "predict", "Predict VA for manifest records with a trained model");
    predict_cmd->add_option("--input", input_path, "Input manifest JSONL")
        ->required();
    predict_cmd->add_option("--model", model_path, "Model JSON")->required();
    predict_cmd->add_option("--out", out_path, "Output predictions JSONL")
        ->required();
    predict_cmd->add_option("--split", split_name,
                            "Which split to predict (train/test/unassigned)");
    predict_cmd->add_option("--workers", workers, "Parallel workers");

    CLI::App* evaluate_cmd = app.add_subcommand(
        "evaluate", "Score predictions with RMSE and CCC");
    evaluate_cmd->add_option("--input", input_path, "Input manifest JSONL")
        ->required();
    evaluate_cmd->add_option("--predictions", preds_path, "Predictions JSONL")
        ->required();
    evaluate_cmd->add_option("--out", out_path,
                             "Report JSON (stdout when omitted)");
    evaluate_cmd->add_option("--split", split_name, "Which split to score");
    evaluate_cmd->add_flag("--group", group, "Add per-emotion scores");

    CLI::App* heatmap_cmd = app.add_subcommand(
        "heatmap", "Render binned VA-plane RMSE heatmaps (CSV + PNG)");
    heatmap_cmd->add_option("--input", input_path, "Input manifest JSONL")
        ->required();
    heatmap_cmd->add_option("--predictions", preds_path, "Predictions JSONL")
        ->required();
    heatmap_cmd->add_option("--out-prefix", out_path,
                            "Output path prefix for the four artifacts")
        ->required();
    heatmap_cmd->add_option("--split", split_name, "Which split to render");
    heatmap_cmd->add_option("--resolution", resolution, "Bins per axis");

    CLI11_PARSE(app, argc, argv);

    try {
        if (plan->parsed())
            return run_plan(template_path, format, out_path);
        if (augment->parsed())
            return run_augment(input_path, out_dir, template_path, workers);
        if (translate->parsed())
            return run_translate(input_path, stats_path, out_dir, workers);
        if (nir_stats->parsed())
            return run_nir_stats(images_dir, out_path);
        if (split->parsed())
            return run_split(input_path, out_path, fraction, seed);
        if (train->parsed())
            return run_train(input_path, out_path, lambda, d_side, workers);
        if (predict_cmd->parsed())
            return run_predict(input_path, model_path, out_path, split_name,
                               workers);
        if (evaluate_cmd->parsed())
            return run_evaluate(input_path, preds_path, out_path, split_name,
                                group);
        if (heatmap_cmd->parsed())
            return run_heatmap(input_path, preds_path, out_path, split_name,
                               resolution);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ComputeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCompute;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCompute;
    }
    return 0;
}
