// Copyright 2026 The segser Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "segser/audio_io.hpp"
#include "segser/classifier.hpp"
#include "segser/config.hpp"
#include "segser/error.hpp"
#include "segser/evaluation.hpp"
#include "segser/features.hpp"
#include "segser/lld.hpp"
#include "segser/manifest.hpp"
#include "segser/preprocess.hpp"
#include "segser/segmentation.hpp"

namespace py = pybind11;
using namespace segser;

namespace {

ExperimentConfig parse_config(const std::string& text) { return config_from_json(nlohmann::json::parse(text)); }

Eigen::MatrixXd frame_matrix(const AudioClip& clip, std::size_t start, std::optional<std::size_t> length,
                             double frame_ms, double hop_ms) {
  const std::size_t len = length.value_or(clip.samples.size() - std::min(start, clip.samples.size()));
  const auto frames = frame_region(clip, start, len, frame_ms, hop_ms);
  if (frames.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(frames.size()), static_cast<Eigen::Index>(frames[0].samples.size()));
  for (std::size_t i = 0; i < frames.size(); ++i) {
    for (std::size_t j = 0; j < frames[i].samples.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = frames[i].samples[j];
    }
  }
  return out;
}

py::dict functional_dict(const FunctionalVector& f) {
  py::dict d;
  const auto values = f.values();
  for (std::size_t i = 0; i < values.size(); ++i) d[py::str(std::string(FunctionalVector::name(i)))] = values[i];
  return d;
}

}  // namespace

PYBIND11_MODULE(_segser, m) {
  m.doc() = "Segmental speech emotion features, preprocessing and linear SVM evaluation";
  py::register_exception<Error>(m, "SegserError", PyExc_ValueError);

  py::class_<AudioClip>(m, "AudioClip")
      .def(py::init([](std::vector<double> samples, int sample_rate, std::string source_id) {
             AudioClip c{std::move(samples), sample_rate, std::move(source_id)};
             validate_clip(c);
             return c;
           }),
           py::arg("samples"), py::arg("sample_rate"), py::arg("source_id") = "")
      .def_readonly("sample_rate", &AudioClip::sample_rate)
      .def_readonly("source_id", &AudioClip::source_id)
      .def_property_readonly("samples", [](const AudioClip& c) {
        return Eigen::Map<const Eigen::VectorXd>(c.samples.data(), static_cast<Eigen::Index>(c.samples.size())).eval();
      })
      .def("__len__", [](const AudioClip& c) { return c.samples.size(); });

  m.def("load_wav", &load_wav, py::arg("path"));
  m.def("write_wav", &write_wav, py::arg("path"), py::arg("clip"), py::arg("bits") = 16);
  m.def("frames", &frame_matrix, py::arg("clip"), py::arg("start") = 0, py::arg("length") = py::none(),
        py::arg("frame_ms") = 25.0, py::arg("hop_ms") = 10.0,
        "Frames of a region as a (count, frame_length) array.");

  m.def("zcr", [](const std::vector<double>& x) { return zcr(x); }, py::arg("frame"));
  m.def("rms_energy", [](const std::vector<double>& x) { return rms_energy(x); }, py::arg("frame"));
  m.def("acf", [](const std::vector<double>& x, std::size_t lag) { return acf(x, lag); }, py::arg("frame"),
        py::arg("lag"));

  py::class_<PitchOptions>(m, "PitchOptions")
      .def(py::init<>())
      .def_readwrite("fmin", &PitchOptions::fmin)
      .def_readwrite("fmax", &PitchOptions::fmax)
      .def_readwrite("voicing_threshold", &PitchOptions::voicing_threshold)
      .def_readwrite("silence_floor", &PitchOptions::silence_floor)
      .def_readwrite("octave_ratio", &PitchOptions::octave_ratio);
  py::class_<PitchEstimate>(m, "PitchEstimate")
      .def_readonly("hz", &PitchEstimate::hz)
      .def_readonly("lag", &PitchEstimate::lag)
      .def_readonly("strength", &PitchEstimate::strength)
      .def_property_readonly("voiced", &PitchEstimate::voiced);
  m.def("estimate_pitch",
        [](const std::vector<double>& x, int sr, const PitchOptions& o) { return estimate_pitch(x, sr, o); },
        py::arg("frame"), py::arg("sample_rate"), py::arg("options") = PitchOptions{});
  m.def("hnr", [](const std::vector<double>& x, std::size_t lag) { return hnr(x, lag); }, py::arg("frame"),
        py::arg("lag"));
  m.def("mfcc", [](const std::vector<double>& x, int sr) { return mfcc(x, sr); }, py::arg("frame"),
        py::arg("sample_rate"));
  m.def("delta", [](const std::vector<double>& x) { return delta(x); }, py::arg("contour"));

  py::class_<SegmentationScheme>(m, "SegmentationScheme")
      .def_static("gti", &SegmentationScheme::gti)
      .def_static("rti", &SegmentationScheme::rti, py::arg("n"))
      .def_property_readonly("segment_count", &SegmentationScheme::segment_count)
      .def("__repr__", [](const SegmentationScheme& s) {
        return s.kind == SegmentationScheme::Kind::Gti ? std::string("SegmentationScheme.gti()")
                                                       : "SegmentationScheme.rti(" + std::to_string(s.n) + ")";
      });
  m.def(
      "segment",
      [](const AudioClip& clip, const SegmentationScheme& scheme, std::size_t min_len) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const auto& s : segment(clip, scheme, min_len)) out.emplace_back(s.start_sample, s.length);
        return out;
      },
      py::arg("clip"), py::arg("scheme"), py::arg("min_segment_samples") = 1,
      "(start_sample, length) pairs in temporal order.");

  m.def(
      "pitch_histogram",
      [](const std::vector<std::optional<double>>& p, double a, double b, double h) {
        return pitch_histogram(p, HistogramParams{a, b, h}).heights;
      },
      py::arg("pitches"), py::arg("a") = 50.0, py::arg("b") = 500.0, py::arg("h") = 50.0,
      "None marks an unvoiced frame.");
  m.def("functionals", [](const std::vector<double>& x) { return functional_dict(functionals(x)); },
        py::arg("contour"));

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_static("from_json", &parse_config, py::arg("text"))
      .def("to_json", [](const ExperimentConfig& c) { return to_json(c).dump(); })
      .def_readonly("name", &ExperimentConfig::name)
      .def_property_readonly("extraction_hash", [](const ExperimentConfig& c) { return c.extraction.hash_hex(); })
      .def_property_readonly("feature_dimension", [](const ExperimentConfig& c) { return feature_dimension(c.extraction); })
      .def_property_readonly("feature_names", [](const ExperimentConfig& c) { return build_layout(c.extraction).names; });
  m.def("assemble",
        [](const AudioClip& clip, const ExperimentConfig& c) {
          auto v = assemble(clip, c.extraction).values;
          return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())).eval();
        },
        py::arg("clip"), py::arg("config"));

  py::class_<ZScoreModel>(m, "ZScoreModel")
      .def_readonly("mu", &ZScoreModel::mu)
      .def_readonly("sigma", &ZScoreModel::sigma)
      .def("apply", &ZScoreModel::apply_rows, py::arg("X"));
  m.def("zscore_fit", &zscore_fit, py::arg("X"));

  py::class_<PcaModel>(m, "PcaModel")
      .def_readonly("mean", &PcaModel::mean)
      .def_readonly("components", &PcaModel::components)
      .def_readonly("explained_ratio", &PcaModel::explained_ratio)
      .def_readonly("eigenvalues", &PcaModel::eigenvalues)
      .def_property_readonly("k", &PcaModel::k)
      .def("transform", &PcaModel::transform_rows, py::arg("X"))
      .def("reconstruct", &PcaModel::reconstruct, py::arg("z"));
  m.def("pca_fit", &pca_fit, py::arg("X"), py::arg("threshold") = 0.99);

  py::class_<SvmOptions>(m, "SvmOptions")
      .def(py::init<>())
      .def_readwrite("C", &SvmOptions::C)
      .def_readwrite("tol", &SvmOptions::tol)
      .def_readwrite("max_iterations", &SvmOptions::max_iterations);
  py::class_<BinarySvmModel>(m, "BinarySvmModel")
      .def_readonly("w", &BinarySvmModel::w)
      .def_readonly("b", &BinarySvmModel::b)
      .def_readonly("converged", &BinarySvmModel::converged)
      .def_readonly("iterations", &BinarySvmModel::iterations)
      .def("decision", &BinarySvmModel::decision, py::arg("x"))
      .def("predict", &BinarySvmModel::predict, py::arg("x"));
  m.def(
      "train_binary",
      [](const Eigen::MatrixXd& X, const std::vector<int>& y, const SvmOptions& o) { return train_binary(X, y, o); },
      py::arg("X"), py::arg("y"), py::arg("options") = SvmOptions{});
  py::class_<MulticlassSvmModel>(m, "MulticlassSvmModel")
      .def_readonly("classes", &MulticlassSvmModel::classes)
      .def_property_readonly("pair_count", [](const MulticlassSvmModel& mm) { return mm.pairwise.size(); })
      .def("predict", &MulticlassSvmModel::predict, py::arg("x"))
      .def("votes", [](const MulticlassSvmModel& mm, const Eigen::VectorXd& x) { return mm.vote(x).votes; },
           py::arg("x"))
      .def("to_json", [](const MulticlassSvmModel& mm) { return to_json(mm).dump(); });
  m.def(
      "train_multiclass",
      [](const Eigen::MatrixXd& X, const std::vector<int>& labels, const SvmOptions& o) {
        return train_multiclass(X, labels, o);
      },
      py::arg("X"), py::arg("labels"), py::arg("options") = SvmOptions{});

  m.def(
      "compute_metrics",
      [](const ConfusionMatrix& c) {
        const auto r = compute_metrics(c);
        py::dict d;
        d["wa"] = r.wa;
        d["ua"] = r.ua;
        d["recall"] = r.recall;
        return d;
      },
      py::arg("confusion"));

  m.def(
      "emodb_label",
      [](const std::string& name) -> std::optional<std::pair<std::string, std::string>> {
        const auto l = emodb_label_from_filename(name);
        if (!l) return std::nullopt;
        return std::make_pair(l->emotion, l->speaker);
      },
      py::arg("filename"), "(emotion, speaker) or None.");

  m.def(
      "loocv_features",
      [](const Eigen::MatrixXd& X, const std::vector<int>& labels, const std::vector<std::string>& classes,
         const ExperimentConfig& config) {
        FeatureTable t;
        t.X = X;
        t.labels = labels;
        for (Eigen::Index i = 0; i < X.rows(); ++i) t.ids.push_back(std::to_string(i));
        return to_json(loocv_features(t, classes, config)).dump();
      },
      py::arg("X"), py::arg("labels"), py::arg("classes"), py::arg("config"),
      "Leave-one-out report (JSON text) on a precomputed feature matrix.");
  m.def(
      "loocv",
      [](const std::filesystem::path& manifest, const ExperimentConfig& config, bool skip_bad) {
        return to_json(loocv(parse_manifest(manifest), config, skip_bad)).dump();
      },
      py::arg("manifest"), py::arg("config"), py::arg("skip_bad") = false,
      "Leave-one-out report (JSON text) for a manifest CSV.");
}
