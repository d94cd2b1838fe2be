#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>

#include "alprs/error.hpp"
#include "alprs/matchdb.hpp"
#include "alprs/ocr.hpp"
#include "alprs/pipeline.hpp"
#include "alprs/pnm.hpp"
#include "alprs/segment.hpp"
#include "alprs/sift.hpp"
#include "alprs/synth.hpp"

namespace py = pybind11;
using namespace alprs;

namespace {

using GrayArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using MaskArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

GrayImage to_gray(const GrayArray& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::kInvalidArgument, "expected a 2-D array");
  const auto h = static_cast<int>(a.shape(0));
  const auto w = static_cast<int>(a.shape(1));
  return GrayImage(w, h, std::vector<double>(a.data(), a.data() + a.size()));
}

GrayArray from_gray(const GrayImage& img) {
  GrayArray out({img.height(), img.width()});
  std::copy(img.data().begin(), img.data().end(), out.mutable_data());
  return out;
}

BinaryImage to_binary(const MaskArray& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::kInvalidArgument, "expected a 2-D array");
  BinaryImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.size(); ++i) img.data()[static_cast<std::size_t>(i)] = a.data()[i] ? 1 : 0;
  return img;
}

MaskArray from_binary(const BinaryImage& img) {
  MaskArray out({img.height(), img.width()});
  std::copy(img.data().begin(), img.data().end(), out.mutable_data());
  return out;
}

py::tuple box_tuple(const Box& b) { return py::make_tuple(b.x, b.y, b.width, b.height); }

Polarity parse_polarity(const std::string& s) {
  if (s == "dark") return Polarity::kDarkInk;
  if (s == "light") return Polarity::kLightInk;
  if (s == "auto") return Polarity::kAuto;
  throw Error(ErrorCode::kInvalidArgument, "polarity must be dark, light or auto");
}

PipelineConfig make_config(const std::map<std::string, std::string>& settings) {
  PipelineConfig cfg;
  for (const auto& [k, v] : settings) apply_setting(cfg, k, v);
  validate(cfg);
  return cfg;
}

py::dict report_dict(const RecognitionReport& r) {
  py::list chars;
  for (const CharResult& c : r.chars) chars.append(py::make_tuple(std::string(1, c.label), box_tuple(c.bbox)));
  py::dict d;
  d["status"] = std::string(to_string(r.status));
  d["plate"] = r.plate;
  d["chars"] = chars;
  d["plate_box"] = r.region ? py::object(box_tuple(r.region->bbox)) : py::object(py::none());
  d["seed_char"] = r.region ? py::object(py::str(std::string(1, r.region->seed_char))) : py::object(py::none());
  d["timings"] = py::dict(py::arg("sift_match_ms") = r.timings.sift_match_ms,
                          py::arg("segment_ms") = r.timings.segment_ms, py::arg("ocr_ms") = r.timings.ocr_ms);
  return d;
}

class Recognizer {
 public:
  Recognizer(const std::filesystem::path& db, const std::filesystem::path& model,
             const std::map<std::string, std::string>& settings)
      : cfg_(make_config(settings)), locator_(load_db(db), cfg_.locator), model_(load_model(model)) {
    model_.noise_fraction = cfg_.noise_fraction;
  }

  py::dict recognize(const GrayArray& image) const {
    const GrayImage img = to_gray(image);
    RecognitionReport r;
    {
      py::gil_scoped_release release;
      r = alprs::recognize(img, locator_, model_, cfg_);
    }
    return report_dict(r);
  }

 private:
  PipelineConfig cfg_;
  PlateLocator locator_;
  ClassifierModel model_;
};

}  // namespace

PYBIND11_MODULE(_alprs, m) {
  m.doc() = "License plate recognition: SIFT plate location, Otsu segmentation, transition OCR";

  // The module attribute keeps the type alive.
  static const py::handle error_type = py::exception<Error>(m, "AlprsError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("load_image", [](const std::filesystem::path& p) { return from_gray(load_image(p)); }, py::arg("path"),
        "Reads a PGM/PPM file as a float64 array in [0, 1].");
  m.def("save_pgm", [](const std::filesystem::path& p, const GrayArray& a) { save_pgm(p, to_gray(a)); },
        py::arg("path"), py::arg("image"));

  m.def(
      "extract_keypoints",
      [](const GrayArray& a, const std::map<std::string, std::string>& settings) {
        const PipelineConfig cfg = make_config(settings);
        const GrayImage img = to_gray(a);
        std::vector<Keypoint> kps;
        {
          py::gil_scoped_release release;
          kps = extract_keypoints(img, cfg.sift);
        }
        py::array_t<double> frames({static_cast<py::ssize_t>(kps.size()), py::ssize_t{4}});
        py::array_t<float> desc({static_cast<py::ssize_t>(kps.size()), py::ssize_t{kDescriptorSize}});
        auto f = frames.mutable_unchecked<2>();
        auto d = desc.mutable_unchecked<2>();
        for (std::size_t i = 0; i < kps.size(); ++i) {
          const auto r = static_cast<py::ssize_t>(i);
          f(r, 0) = kps[i].x;
          f(r, 1) = kps[i].y;
          f(r, 2) = kps[i].sigma;
          f(r, 3) = kps[i].theta;
          for (int k = 0; k < kDescriptorSize; ++k) d(r, k) = kps[i].descriptor[static_cast<std::size_t>(k)];
        }
        return py::make_tuple(frames, desc);
      },
      py::arg("image"), py::arg("settings") = std::map<std::string, std::string>{},
      "Returns (frames, descriptors): frames rows are x, y, sigma, theta.");

  m.def(
      "otsu_threshold",
      [](const GrayArray& a) {
        const OtsuResult r = otsu_threshold(to_gray(a));
        return py::dict(py::arg("threshold") = r.threshold, py::arg("cut") = r.cut,
                        py::arg("separability") = r.separability());
      },
      py::arg("image"));
  m.def(
      "binarize",
      [](const GrayArray& a, double t, const std::string& polarity) {
        return from_binary(binarize(to_gray(a), t, parse_polarity(polarity)));
      },
      py::arg("image"), py::arg("threshold"), py::arg("polarity") = "dark");
  m.def(
      "normalize_character",
      [](const MaskArray& a, int w, int h) { return from_binary(normalize_character(to_binary(a), w, h)); },
      py::arg("mask"), py::arg("width") = 65, py::arg("height") = 60);
  m.def(
      "prepare_glyph",
      [](const GrayArray& a, int w, int h, const std::string& polarity) {
        return from_binary(prepare_glyph(to_gray(a), {w, h, 2}, parse_polarity(polarity)));
      },
      py::arg("image"), py::arg("width") = 65, py::arg("height") = 60, py::arg("polarity") = "dark",
      "Otsu, binarize, keep the largest component, resample to the grid.");
  m.def(
      "transition_vector",
      [](const MaskArray& a, int order) {
        const BinaryImage img = to_binary(a);
        const TransitionVector tv = transition_vector(img, {img.width(), img.height(), order});
        py::array_t<std::uint8_t> out(static_cast<py::ssize_t>(tv.values.size()));
        std::copy(tv.values.begin(), tv.values.end(), out.mutable_data());
        return out;
      },
      py::arg("mask"), py::arg("order") = 2);

  m.def(
      "build_template_db",
      [](const std::map<std::string, GrayArray>& templates, const std::filesystem::path& out) {
        std::map<char, GrayImage> imgs;
        for (const auto& [k, v] : templates) {
          if (k.size() != 1) throw Error(ErrorCode::kInvalidArgument, "template keys must be single digits");
          imgs[k[0]] = to_gray(v);
        }
        const TemplateFeatureDB db = build_template_db(imgs);
        save_db(db, out);
        std::map<std::string, std::size_t> counts;
        for (const auto& [c, e] : db.entries) counts[std::string(1, c)] = e.keypoints.size();
        return counts;
      },
      py::arg("templates"), py::arg("out"), "Builds and saves a template DB; returns keypoints per digit.");

  m.def(
      "train_ocr",
      [](const std::vector<std::pair<std::string, MaskArray>>& samples, const std::filesystem::path& out, int width,
         int height, int order) {
        std::vector<LabeledSample> s;
        for (const auto& [label, mask] : samples) {
          if (label.size() != 1) throw Error(ErrorCode::kInvalidArgument, "labels must be single characters");
          s.push_back({label[0], normalize_character(to_binary(mask), width, height)});
        }
        const ClassifierModel model = train(s, {width, height, order});
        save_model(model, out);
        std::map<std::string, std::size_t> counts;
        for (const ClassRuleSet& c : model.classes) counts[std::string(1, c.label)] = c.restriction_count;
        return counts;
      },
      py::arg("samples"), py::arg("out"), py::arg("width") = 65, py::arg("height") = 60, py::arg("order") = 2,
      "Trains from (label, binary glyph) pairs and saves the model; returns restrictions per class.");

  m.def(
      "render_plate",
      [](const std::string& text, std::uint64_t seed) {
        const synth::PlateScene s = synth::render_plate_scene(text, {}, seed);
        py::list boxes;
        for (const Box& b : s.char_boxes) boxes.append(box_tuple(b));
        return py::make_tuple(from_gray(s.image), box_tuple(s.plate), boxes);
      },
      py::arg("text"), py::arg("seed") = 1, "Renders a synthetic 640x240 plate scene: (image, plate_box, char_boxes).");
  m.def(
      "render_template", [](const std::string& c) { return from_gray(synth::render_template(c.at(0))); },
      py::arg("char"));

  py::class_<Recognizer>(m, "Recognizer")
      .def(py::init<const std::filesystem::path&, const std::filesystem::path&,
                    const std::map<std::string, std::string>&>(),
           py::arg("db"), py::arg("model"), py::arg("settings") = std::map<std::string, std::string>{})
      .def("recognize", &Recognizer::recognize, py::arg("image"),
           "Returns a dict with status, plate, chars, plate_box, seed_char and timings.");
}
