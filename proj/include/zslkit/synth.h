// zslkit/synth.h

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


#ifndef ZSLKIT_SYNTH_H_
#define ZSLKIT_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <string>

namespace zsl {

// Desk-scale dataset with planted structure. Class points live in a latent
// space of dimension `latent_dim`; videos are an orthonormal linear lift of
// the class point plus Gaussian noise, image bags are noisy samples around
// an orthonormal lift of the class point into the semantic space, and each
// class document mixes class-specific words (embedded near the class's
// semantic point) with shared filler words and stop words.
struct SynthSpec {
  int num_classes = 12;
  int n_seen = 6;
  int n_splits = 5;
  int visual_dim = 20;
  int latent_dim = 4;
  int semantic_dim = 16;
  int examples_per_class = 40;
  int images_per_class = 30;
  int words_per_class = 8;
  int doc_length = 60;
  double class_spread = 1.0;
  double visual_noise = 0.05;
  double semantic_noise = 0.05;
  double image_noise = 0.05;
};

/// Reads a spec from JSON; absent keys keep their defaults. Throws
/// ConfigError on unknown keys or inconsistent values.
SynthSpec ParseSynthSpec(const std::string &json_text);
std::string SynthSpecJson(const SynthSpec &spec);

/// Writes manifest.json, video_features.zmat, video_labels.txt,
/// images/class_XXX.zmat, docs/class_XXX.txt, word_table.txt, splits.json
/// and synth_spec.json under `out_dir`. Returns the manifest path.
std::filesystem::path Synthesize(const SynthSpec &spec, uint64_t seed,
                                 const std::filesystem::path &out_dir);

}  // namespace zsl

#endif  // ZSLKIT_SYNTH_H_
