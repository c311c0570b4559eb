#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vamorph/baseline.hpp"
#include "vamorph/delaunay.hpp"
#include "vamorph/errors.hpp"
#include "vamorph/fixture.hpp"
#include "vamorph/image.hpp"
#include "vamorph/landmarks.hpp"
#include "vamorph/metrics.hpp"
#include "vamorph/morph.hpp"
#include "vamorph/nir_proxy.hpp"
#include "vamorph/va_space.hpp"

namespace py = pybind11;

namespace {

using vamorph::LandmarkSet;
using vamorph::Point2;
using vamorph::RasterImage;

RasterImage image_from_array(const py::array& arr) {
    if (!py::isinstance<py::array_t<std::uint8_t>>(arr))
        throw vamorph::ValidationError("image array must have dtype uint8");
    auto a = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>::ensure(arr);
    int channels = 1;
    if (a.ndim() == 3) {
        channels = static_cast<int>(a.shape(2));
        if (channels != 1 && channels != 3)
            throw vamorph::ValidationError(
                "image array must have 1 or 3 channels, got " + std::to_string(channels));
    } else if (a.ndim() != 2) {
        throw vamorph::ValidationError("image array must be 2-d or 3-d, got " +
                                       std::to_string(a.ndim()) + "-d");
    }
    RasterImage img;
    img.height = static_cast<int>(a.shape(0));
    img.width = static_cast<int>(a.shape(1));
    img.channels = channels;
    img.samples.resize(static_cast<std::size_t>(a.size()));
    std::memcpy(img.samples.data(), a.data(), img.samples.size());
    img.validate();
    return img;
}

py::array image_to_array(const RasterImage& img) {
    py::array_t<std::uint8_t> out;
    if (img.channels == 1)
        out = py::array_t<std::uint8_t>({img.height, img.width});
    else
        out = py::array_t<std::uint8_t>({img.height, img.width, img.channels});
    std::memcpy(out.mutable_data(), img.samples.data(), img.samples.size());
    return std::move(out);
}

std::vector<Point2> points_from_array(const py::array& arr) {
    auto a = py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(arr);
    if (!a || a.ndim() != 2 || a.shape(1) != 2)
        throw vamorph::ValidationError("points array must have shape (n, 2)");
    std::vector<Point2> pts(static_cast<std::size_t>(a.shape(0)));
    auto view = a.unchecked<2>();
    for (py::ssize_t i = 0; i < a.shape(0); ++i)
        pts[static_cast<std::size_t>(i)] = {view(i, 0), view(i, 1)};
    return pts;
}

py::array points_to_array(const std::vector<Point2>& pts) {
    py::array_t<double> out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        view(static_cast<py::ssize_t>(i), 0) = pts[i].x;
        view(static_cast<py::ssize_t>(i), 1) = pts[i].y;
    }
    return std::move(out);
}

LandmarkSet landmarks_from_args(const py::array& pts, int width, int height) {
    LandmarkSet lm;
    lm.points = points_from_array(pts);
    lm.image_width = width;
    lm.image_height = height;
    lm.validate();
    return lm;
}

std::vector<double> doubles_from_array(const py::array& arr, const char* name) {
    auto a = py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(arr);
    if (!a || a.ndim() != 1)
        throw vamorph::ValidationError(std::string(name) + " must be a 1-d array");
    return {a.data(), a.data() + a.size()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Valence-arousal expression grid synthesis: circumplex sampling, "
              "piecewise-affine morphing, NIR-style translation, and the "
              "pixel-ridge reference regressor.";
#ifdef VAMORPH_VERSION
    m.attr("__version__") = VAMORPH_VERSION;
#endif

    static py::exception<vamorph::MorphRejected> morph_rejected(m, "MorphRejected",
                                                                PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const vamorph::MorphRejected& e) {
            py::set_error(morph_rejected, e.what());
        } catch (const vamorph::ValidationError& e) {
            py::set_error(py::handle(PyExc_ValueError), e.what());
        } catch (const vamorph::IoError& e) {
            py::set_error(py::handle(PyExc_OSError), e.what());
        } catch (const vamorph::ComputeError& e) {
            py::set_error(py::handle(PyExc_RuntimeError), e.what());
        }
    });

    // --- circumplex grid ---

    py::class_<vamorph::VATemplate>(m, "VATemplate")
        .def(py::init<>())
        .def_static("defaults", &vamorph::VATemplate::defaults)
        .def_readwrite("angle_min_deg", &vamorph::VATemplate::angle_min_deg)
        .def_readwrite("angle_max_deg", &vamorph::VATemplate::angle_max_deg)
        .def_readwrite("angle_step_deg", &vamorph::VATemplate::angle_step_deg)
        .def_readwrite("intensity_min", &vamorph::VATemplate::intensity_min)
        .def_readwrite("intensity_max", &vamorph::VATemplate::intensity_max)
        .def_readwrite("intensity_step", &vamorph::VATemplate::intensity_step)
        .def_property(
            "anchors",
            [](const vamorph::VATemplate& t) {
                std::vector<std::pair<std::string, double>> out;
                for (const auto& a : t.anchors) out.emplace_back(a.emotion, a.angle_deg);
                return out;
            },
            [](vamorph::VATemplate& t,
               const std::vector<std::pair<std::string, double>>& anchors) {
                t.anchors.clear();
                for (const auto& [emotion, angle] : anchors)
                    t.anchors.push_back({emotion, angle});
            })
        .def("validate", &vamorph::VATemplate::validate)
        .def("angle_count", &vamorph::VATemplate::angle_count)
        .def("intensity_count", &vamorph::VATemplate::intensity_count)
        .def("angle_at", &vamorph::VATemplate::angle_at, py::arg("i"))
        .def("intensity_at", &vamorph::VATemplate::intensity_at, py::arg("i"))
        .def("to_json", [](const vamorph::VATemplate& t) { return t.to_json().dump(2); })
        .def_static("from_json", [](const std::string& text) {
            return vamorph::VATemplate::from_json(nlohmann::json::parse(text));
        });

    py::class_<vamorph::GridPoint>(m, "GridPoint")
        .def_property_readonly("angle_deg",
                               [](const vamorph::GridPoint& g) { return g.angle_deg; })
        .def_readonly("intensity", &vamorph::GridPoint::intensity)
        .def_readonly("valence", &vamorph::GridPoint::valence)
        .def_readonly("arousal", &vamorph::GridPoint::arousal)
        .def_property_readonly(
            "kind", [](const vamorph::GridPoint& g) { return vamorph::to_string(g.kind); })
        .def("__repr__", [](const vamorph::GridPoint& g) {
            std::string angle = g.angle_deg ? std::to_string(*g.angle_deg) : "None";
            return "GridPoint(kind=" + std::string(vamorph::to_string(g.kind)) +
                   ", angle_deg=" + angle + ", intensity=" + std::to_string(g.intensity) + ")";
        });

    py::class_<vamorph::MorphPlan>(m, "MorphPlan")
        .def_readonly("target", &vamorph::MorphPlan::target)
        .def_readonly("apex_a", &vamorph::MorphPlan::apex_a)
        .def_readonly("apex_b", &vamorph::MorphPlan::apex_b)
        .def_readonly("angle_weight", &vamorph::MorphPlan::angle_weight)
        .def_readonly("intensity_weight", &vamorph::MorphPlan::intensity_weight)
        .def_property_readonly("label",
                               [](const vamorph::MorphPlan& p) { return vamorph::blend_label(p); });

    m.def("polar_to_va", &vamorph::polar_to_va, py::arg("angle_deg"), py::arg("intensity"),
          "Valence-arousal coordinates (intensity*cos(angle), intensity*sin(angle)).");
    m.def(
        "build_grid",
        [](const vamorph::VATemplate& t) { return vamorph::build_grid(t); },
        py::arg("template"));
    m.def(
        "plan_morphs",
        [](const std::vector<vamorph::GridPoint>& grid, const vamorph::VATemplate& t) {
            return vamorph::plan_morphs(grid, t);
        },
        py::arg("grid"), py::arg("template"));
    m.def("blend_label", &vamorph::blend_label, py::arg("plan"));

    // --- landmarks ---

    py::class_<LandmarkSet>(m, "LandmarkSet")
        .def(py::init(&landmarks_from_args), py::arg("points"), py::arg("image_width"),
             py::arg("image_height"))
        .def_property_readonly("points",
                               [](const LandmarkSet& lm) { return points_to_array(lm.points); })
        .def_readonly("image_width", &LandmarkSet::image_width)
        .def_readonly("image_height", &LandmarkSet::image_height)
        .def("to_json", [](const LandmarkSet& lm) { return vamorph::landmarks_to_json(lm); })
        .def("__len__", [](const LandmarkSet& lm) { return lm.points.size(); });

    m.def(
        "parse_landmarks",
        [](const std::string& text, int width, int height) {
            return vamorph::parse_landmarks(text, width, height);
        },
        py::arg("json_text"), py::arg("image_width"), py::arg("image_height"));
    m.def("interpolate", &vamorph::interpolate, py::arg("a"), py::arg("b"), py::arg("w"),
          "Per-point convex combination (1-w)*a + w*b.");
    m.def("combine3", &vamorph::combine3, py::arg("neutral"), py::arg("apex_a"),
          py::arg("apex_b"), py::arg("t"), py::arg("r"),
          "Target landmark shape for a grid point: angular blend then intensity blend.");
    m.def(
        "extend_with_boundary",
        [](const LandmarkSet& lm) {
            return points_to_array(vamorph::extend_with_boundary(lm).all_points());
        },
        py::arg("landmarks"),
        "The 68 landmarks plus the 8 frame-rectangle points, as a (76, 2) array.");

    // --- triangulation ---

    m.def(
        "delaunay",
        [](const py::array& points) {
            auto pts = points_from_array(points);
            auto mesh = vamorph::delaunay(pts);
            py::array_t<std::int32_t> out(
                {static_cast<py::ssize_t>(mesh.triangles.size()), py::ssize_t{3}});
            auto view = out.mutable_unchecked<2>();
            for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
                for (int k = 0; k < 3; ++k)
                    view(static_cast<py::ssize_t>(t), k) = mesh.triangles[t][k];
            return out;
        },
        py::arg("points"),
        "Delaunay triangle index triples, deterministic and canonically ordered.");

    // --- morphing ---

    m.def(
        "morph_pair",
        [](const py::array& img_a, const LandmarkSet& lm_a, const py::array& img_b,
           const LandmarkSet& lm_b, double w) {
            auto [img, lm] = vamorph::morph_pair(image_from_array(img_a), lm_a,
                                                 image_from_array(img_b), lm_b, w);
            return py::make_tuple(image_to_array(img), lm);
        },
        py::arg("image_a"), py::arg("landmarks_a"), py::arg("image_b"), py::arg("landmarks_b"),
        py::arg("w"), "Cross-dissolve of two expressions at blend weight w.");
    m.def(
        "morph_grid_point",
        [](const py::array& neutral_img, const LandmarkSet& neutral_lm, const py::array& a_img,
           const LandmarkSet& a_lm, const py::array& b_img, const LandmarkSet& b_lm,
           const vamorph::MorphPlan& plan) {
            auto [img, lm] =
                vamorph::morph_grid_point(image_from_array(neutral_img), neutral_lm,
                                          image_from_array(a_img), a_lm,
                                          image_from_array(b_img), b_lm, plan);
            return py::make_tuple(image_to_array(img), lm);
        },
        py::arg("neutral_image"), py::arg("neutral_landmarks"), py::arg("apex_a_image"),
        py::arg("apex_a_landmarks"), py::arg("apex_b_image"), py::arg("apex_b_landmarks"),
        py::arg("plan"), "Three-way synthesis of one grid point from neutral and two apexes.");

    // --- NIR-style translation ---

    py::class_<vamorph::NirReferenceStats>(m, "NirReferenceStats")
        .def_property_readonly("cdf",
                               [](const vamorph::NirReferenceStats& s) {
                                   py::array_t<double> out(py::ssize_t{256});
                                   std::memcpy(out.mutable_data(), s.cdf.data(),
                                               256 * sizeof(double));
                                   return out;
                               })
        .def_readonly("source_count", &vamorph::NirReferenceStats::source_count)
        .def("to_json",
             [](const vamorph::NirReferenceStats& s) { return s.to_json().dump(2); })
        .def_static("from_json", [](const std::string& text) {
            return vamorph::NirReferenceStats::from_json(nlohmann::json::parse(text));
        });

    m.def(
        "compute_reference_stats",
        [](const std::vector<py::array>& images) {
            std::vector<RasterImage> imgs;
            imgs.reserve(images.size());
            for (const auto& a : images) imgs.push_back(image_from_array(a));
            return vamorph::compute_reference_stats(imgs);
        },
        py::arg("images"), "Pooled intensity CDF over a set of grayscale reference images.");
    m.def(
        "to_nir",
        [](const py::array& img, const vamorph::NirReferenceStats& stats) {
            return image_to_array(vamorph::to_nir(image_from_array(img), stats));
        },
        py::arg("image"), py::arg("stats"),
        "Luminance plus monotone histogram matching onto the reference CDF.");
    m.def(
        "to_luminance",
        [](const py::array& img) {
            return image_to_array(vamorph::to_luminance(image_from_array(img)));
        },
        py::arg("image"));

    // --- metrics ---

    m.def(
        "rmse",
        [](const py::array& pred, const py::array& truth) {
            return vamorph::rmse(doubles_from_array(pred, "pred"),
                                 doubles_from_array(truth, "truth"));
        },
        py::arg("pred"), py::arg("truth"));
    m.def(
        "ccc",
        [](const py::array& pred, const py::array& truth) {
            return vamorph::ccc(doubles_from_array(pred, "pred"),
                                doubles_from_array(truth, "truth"));
        },
        py::arg("pred"), py::arg("truth"), "Concordance correlation coefficient.");

    // --- baseline regressor ---

    py::class_<vamorph::RidgeModel>(m, "RidgeModel")
        .def_readonly("lambda_", &vamorph::RidgeModel::lambda)
        .def_readonly("d_side", &vamorph::RidgeModel::d_side)
        .def_readonly("d", &vamorph::RidgeModel::d)
        .def("to_json", [](const vamorph::RidgeModel& mdl) { return mdl.to_json().dump(2); })
        .def_static("from_json", [](const std::string& text) {
            return vamorph::RidgeModel::from_json(nlohmann::json::parse(text));
        });

    m.def(
        "extract_features",
        [](const py::array& img, int d_side) {
            auto fv = vamorph::extract_features(image_from_array(img), d_side);
            py::array_t<double> out(static_cast<py::ssize_t>(fv.values.size()));
            std::memcpy(out.mutable_data(), fv.values.data(),
                        fv.values.size() * sizeof(double));
            return out;
        },
        py::arg("image"), py::arg("d_side"),
        "Area-average luminance pooling to d_side^2 values plus a trailing bias 1.");
    m.def(
        "fit_baseline",
        [](const py::array& features, const py::array& labels, double lambda, int d_side) {
            auto f = py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(
                features);
            auto y =
                py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(labels);
            if (!f || f.ndim() != 2)
                throw vamorph::ValidationError("features must be a 2-d array");
            if (!y || y.ndim() != 2 || y.shape(1) != 2)
                throw vamorph::ValidationError("labels must have shape (n, 2)");
            if (f.shape(0) != y.shape(0))
                throw vamorph::ValidationError("features and labels disagree on n");
            std::vector<vamorph::FeatureVector> fv(static_cast<std::size_t>(f.shape(0)));
            auto fview = f.unchecked<2>();
            for (py::ssize_t i = 0; i < f.shape(0); ++i) {
                fv[static_cast<std::size_t>(i)].values.resize(
                    static_cast<std::size_t>(f.shape(1)));
                for (py::ssize_t j = 0; j < f.shape(1); ++j)
                    fv[static_cast<std::size_t>(i)].values[static_cast<std::size_t>(j)] =
                        fview(i, j);
            }
            std::vector<std::array<double, 2>> lbl(static_cast<std::size_t>(y.shape(0)));
            auto yview = y.unchecked<2>();
            for (py::ssize_t i = 0; i < y.shape(0); ++i)
                lbl[static_cast<std::size_t>(i)] = {yview(i, 0), yview(i, 1)};
            return vamorph::fit(fv, lbl, lambda, d_side);
        },
        py::arg("features"), py::arg("labels"), py::arg("lambda_") = 1.0, py::arg("d_side"),
        "Closed-form ridge fit of (valence, arousal) on standardized features.");
    m.def(
        "predict_baseline",
        [](const vamorph::RidgeModel& model, const py::array& features) {
            vamorph::FeatureVector fv;
            fv.values = doubles_from_array(features, "features");
            return vamorph::predict(model, fv);
        },
        py::arg("model"), py::arg("features"),
        "Clamped (valence, arousal) prediction for one feature vector.");

    // --- image I/O and synthetic faces ---

    m.def(
        "load_image",
        [](const std::filesystem::path& path) {
            return image_to_array(vamorph::load_image(path));
        },
        py::arg("path"));
    m.def(
        "save_png",
        [](const py::array& img, const std::filesystem::path& path) {
            vamorph::save_png(image_from_array(img), path);
        },
        py::arg("image"), py::arg("path"));
    m.def(
        "draw_face",
        [](int subject_index, const std::string& emotion, double intensity, int width,
           int height) {
            auto face = vamorph::draw_face(subject_index, emotion, intensity, width, height);
            return py::make_tuple(image_to_array(face.image), face.landmarks);
        },
        py::arg("subject_index"), py::arg("emotion"), py::arg("intensity"),
        py::arg("width") = 128, py::arg("height") = 128,
        "Procedural synthetic face with hand-placed 68-point landmarks.");
    m.def(
        "write_fixture_dataset",
        [](const std::filesystem::path& dir, int subjects, int width, int height,
           int nir_references) {
            vamorph::FixtureOptions opts;
            opts.subjects = subjects;
            opts.width = width;
            opts.height = height;
            opts.nir_references = nir_references;
            vamorph::write_fixture_dataset(dir, opts);
        },
        py::arg("dir"), py::arg("subjects") = 2, py::arg("width") = 128, py::arg("height") = 128,
        py::arg("nir_references") = 3,
        "Synthetic apex dataset with manifest, landmarks, and NIR reference images.");
}
