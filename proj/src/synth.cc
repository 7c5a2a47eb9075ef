// src/synth.cc

// Copyright 2026  zslkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.


#include "zslkit/synth.h"

#include <cstdio>
#include <sstream>

#include <Eigen/QR>
#include <json.hpp>

#include "zslkit/data-io.h"
#include "zslkit/encoders.h"
#include "zslkit/portable-rng.h"

namespace zsl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Matrix Gaussian(Eigen::Index rows, Eigen::Index cols, PortableRng *rng) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng->Normal();
  return m;
}

// Orthonormal columns spanning a random subspace.
Matrix RandomLift(Eigen::Index rows, Eigen::Index cols, PortableRng *rng) {
  Eigen::HouseholderQR<Matrix> qr(Gaussian(rows, cols, rng));
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

std::string ClassFile(const char *prefix, int c, const char *ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s/class_%03d.%s", prefix, c, ext);
  return buf;
}

void Validate(const SynthSpec &s) {
  auto fail = [](const std::string &m) { throw ConfigError("synth spec: " + m); };
  if (s.num_classes < 2) fail("num_classes must be at least 2");
  if (s.n_seen <= 0 || s.n_seen >= s.num_classes) fail("n_seen must lie in (0, num_classes)");
  if (s.n_splits < 1) fail("n_splits must be positive");
  if (s.latent_dim < 1) fail("latent_dim must be positive");
  if (s.visual_dim < s.latent_dim) fail("visual_dim must be >= latent_dim");
  if (s.semantic_dim < s.latent_dim) fail("semantic_dim must be >= latent_dim");
  if (s.examples_per_class < 2) fail("examples_per_class must be at least 2");
  if (s.images_per_class < 1) fail("images_per_class must be positive");
  if (s.words_per_class < 1 || s.doc_length < 1) fail("documents need words");
  if (!(s.class_spread > 0.0)) fail("class_spread must be positive");
  if (s.visual_noise < 0.0 || s.semantic_noise < 0.0 || s.image_noise < 0.0)
    fail("noise levels must be non-negative");
}

const char *const kFillerWords[] = {"usually", "person", "body", "motion",
                                    "start", "position"};
const char *const kStopFiller[] = {"The", "and", "of", "with", "you", "is"};

}  // namespace

SynthSpec ParseSynthSpec(const std::string &json_text) {
  SynthSpec s;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception &e) {
    throw ConfigError(std::string("synth spec: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("synth spec must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string &k = it.key();
    try {
      if (k == "num_classes" || k == "C") s.num_classes = it->get<int>();
      else if (k == "n_seen") s.n_seen = it->get<int>();
      else if (k == "n_splits") s.n_splits = it->get<int>();
      else if (k == "visual_dim" || k == "d_visual") s.visual_dim = it->get<int>();
      else if (k == "latent_dim" || k == "d_latent_true") s.latent_dim = it->get<int>();
      else if (k == "semantic_dim" || k == "d_semantic") s.semantic_dim = it->get<int>();
      else if (k == "examples_per_class") s.examples_per_class = it->get<int>();
      else if (k == "images_per_class") s.images_per_class = it->get<int>();
      else if (k == "words_per_class") s.words_per_class = it->get<int>();
      else if (k == "doc_length") s.doc_length = it->get<int>();
      else if (k == "class_spread") s.class_spread = it->get<double>();
      else if (k == "visual_noise") s.visual_noise = it->get<double>();
      else if (k == "semantic_noise") s.semantic_noise = it->get<double>();
      else if (k == "image_noise") s.image_noise = it->get<double>();
      else if (k == "noise") s.visual_noise = s.semantic_noise = s.image_noise = it->get<double>();
      else throw ConfigError("synth spec: unknown key '" + k + "'");
    } catch (const json::exception &e) {
      throw ConfigError("synth spec: bad value for '" + k + "': " + e.what());
    }
  }
  Validate(s);
  return s;
}

std::string SynthSpecJson(const SynthSpec &s) {
  json j = {{"num_classes", s.num_classes},
            {"n_seen", s.n_seen},
            {"n_splits", s.n_splits},
            {"visual_dim", s.visual_dim},
            {"latent_dim", s.latent_dim},
            {"semantic_dim", s.semantic_dim},
            {"examples_per_class", s.examples_per_class},
            {"images_per_class", s.images_per_class},
            {"words_per_class", s.words_per_class},
            {"doc_length", s.doc_length},
            {"class_spread", s.class_spread},
            {"visual_noise", s.visual_noise},
            {"semantic_noise", s.semantic_noise},
            {"image_noise", s.image_noise}};
  return j.dump(2);
}

fs::path Synthesize(const SynthSpec &spec, uint64_t seed, const fs::path &out_dir) {
  Validate(spec);
  fs::create_directories(out_dir / "images");
  fs::create_directories(out_dir / "docs");
  const int c_total = spec.num_classes;

  PortableRng rng(seed);
  const Matrix class_points = spec.class_spread * Gaussian(c_total, spec.latent_dim, &rng);
  const Matrix visual_lift = RandomLift(spec.visual_dim, spec.latent_dim, &rng);
  const Matrix semantic_lift = RandomLift(spec.semantic_dim, spec.latent_dim, &rng);

  Matrix videos(c_total * spec.examples_per_class, spec.visual_dim);
  std::vector<ClassId> labels;
  for (int c = 0; c < c_total; ++c) {
    const Vector centre = visual_lift * class_points.row(c).transpose();
    for (int i = 0; i < spec.examples_per_class; ++i) {
      Eigen::Index r = static_cast<Eigen::Index>(labels.size());
      for (int d = 0; d < spec.visual_dim; ++d)
        videos(r, d) = centre(d) + spec.visual_noise * rng.Normal();
      labels.push_back(c);
    }
  }
  SaveMatrix(videos, out_dir / "video_features.zmat");
  SaveLabels(labels, out_dir / "video_labels.txt");

  // Class-level semantic points, each a noisy copy of the lifted class point.
  Matrix semantic(c_total, spec.semantic_dim);
  for (int c = 0; c < c_total; ++c) {
    semantic.row(c) = (semantic_lift * class_points.row(c).transpose()).transpose();
    for (int d = 0; d < spec.semantic_dim; ++d)
      semantic(c, d) += spec.semantic_noise * rng.Normal();
  }
  for (int c = 0; c < c_total; ++c) {
    Matrix bag(spec.images_per_class, spec.semantic_dim);
    for (int i = 0; i < spec.images_per_class; ++i)
      for (int d = 0; d < spec.semantic_dim; ++d)
        bag(i, d) = semantic(c, d) + spec.image_noise * rng.Normal();
    SaveMatrix(bag, out_dir / ClassFile("images", c, "zmat"));
  }

  WordTable table(spec.semantic_dim);
  std::vector<std::string> terms;
  for (int c = 0; c < c_total; ++c) {
    for (int w = 0; w < spec.words_per_class; ++w) {
      std::string term = "c" + std::to_string(c) + "w" + std::to_string(w);
      Vector v = semantic.row(c).transpose();
      for (int d = 0; d < spec.semantic_dim; ++d) v(d) += spec.semantic_noise * rng.Normal();
      table.Add(term, std::move(v));
      terms.push_back(term);
    }
  }
  for (const char *w : kFillerWords) {
    Vector v(spec.semantic_dim);
    for (int d = 0; d < spec.semantic_dim; ++d) v(d) = 0.1 * spec.class_spread * rng.Normal();
    table.Add(w, std::move(v));
    terms.push_back(w);
  }
  SaveWordTableText(table, terms, out_dir / "word_table.txt");

  for (int c = 0; c < c_total; ++c) {
    std::ostringstream doc;
    for (int t = 0; t < spec.doc_length; ++t) {
      if (t > 0) doc << ((t % 12 == 0) ? ". " : " ");
      uint64_t roll = rng.Below(20);
      if (roll < 2)
        doc << kFillerWords[rng.Below(std::size(kFillerWords))];
      else if (roll < 4)
        doc << kStopFiller[rng.Below(std::size(kStopFiller))];
      else
        doc << (t % 12 == 0 ? "C" : "c") << c << "w" << rng.Below(spec.words_per_class);
    }
    doc << ", unlistedterm.\n";
    WriteFileAtomic(out_dir / ClassFile("docs", c, "txt"), doc.str());
  }

  const auto splits = GenerateClassSplits(c_total, spec.n_seen, spec.n_splits,
                                          DeriveSeed(seed, 0x5117));
  SaveSplits(splits, c_total, out_dir / "splits.json");

  json manifest;
  manifest["name"] = "synthetic";
  manifest["video_features"] = "video_features.zmat";
  manifest["video_labels"] = "video_labels.txt";
  manifest["word_table"] = "word_table.txt";
  manifest["classes"] = json::array();
  for (int c = 0; c < c_total; ++c)
    manifest["classes"].push_back({{"id", c},
                                   {"name", "action_" + std::to_string(c)},
                                   {"doc", ClassFile("docs", c, "txt")},
                                   {"image_bag", ClassFile("images", c, "zmat")}});
  json echo = json::parse(SynthSpecJson(spec));
  echo["seed"] = seed;
  WriteFileAtomic(out_dir / "synth_spec.json", echo.dump(2) + "\n");
  const fs::path manifest_path = out_dir / "manifest.json";
  WriteFileAtomic(manifest_path, manifest.dump(2) + "\n");
  return manifest_path;
}

}  // namespace zsl
