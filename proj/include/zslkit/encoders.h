// zslkit/encoders.h

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


#ifndef ZSLKIT_ENCODERS_H_
#define ZSLKIT_ENCODERS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "zslkit/corpus.h"
#include "zslkit/diag-gmm.h"
#include "zslkit/vector-bag.h"
#include "zslkit/zsl-common.h"

namespace zsl {

/// Pre-trained word embeddings, one D-dimensional vector per term.
class WordTable {
 public:
  WordTable() = default;
  explicit WordTable(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  size_t size() const { return vectors_.size(); }
  void Add(const std::string &term, Vector v);
  /// nullptr when `term` is absent.
  const Vector *Find(const std::string &term) const;

 private:
  int dim_ = 0;
  std::unordered_map<std::string, Vector> vectors_;
};

enum class WordTableFormat { kAuto, kText, kBinary };

// Text layout: header "count dim", then one line per word holding the term
// and `dim` ASCII floats. Binary layout: the same header line, then per word
// the term, one space and `dim` little-endian float32 values; a newline
// between records is tolerated. kAuto tries text first.
// When `keep` is given, only those terms are retained.
WordTable LoadWordTable(const std::filesystem::path &path,
                        WordTableFormat format = WordTableFormat::kAuto,
                        const std::unordered_set<std::string> *keep = nullptr);
void SaveWordTableText(const WordTable &table,
                       const std::vector<std::string> &terms,
                       const std::filesystem::path &path);

struct LookupResult {
  VectorBag bag;
  int skipped = 0;  // tokens absent from the table
};

/// One vector per token found in `table`, repeats kept. Throws DataError when
/// no token of the document is in the table.
LookupResult LookupWordVectors(const TokenDoc &doc, const WordTable &table);

/// Mean of the bag's vectors.
Vector AverageEncode(const VectorBag &bag);

struct FisherOptions {
  bool power_normalize = false;  // sign(x) sqrt|x|
  bool l2_normalize = false;
};

/// Fisher Vector [G_mu,1 .. G_mu,K, G_sigma,1 .. G_sigma,K] of length 2DK:
///   G_mu,k    = 1/sqrt(pi_k)  sum_i gamma_ki (v_i - mu_k) / sigma_k
///   G_sigma,k = 1/sqrt(2pi_k) sum_i gamma_ki ((v_i - mu_k)^2 / sigma_k^2 - 1)
/// with sigma_k the per-dimension standard deviation of component k.
Vector FisherEncode(const DiagGmm &gmm, const VectorBag &bag,
                    const FisherOptions &opts = {});

/// Per-class semantic representations (one row per class) and the metric
/// used to compare them.
struct SemanticSpace {
  std::vector<ClassId> class_ids;
  Matrix reps;
  Metric metric = Metric::kEuclidean;
  std::string method;

  int num_classes() const { return static_cast<int>(class_ids.size()); }
  /// Row holding class `id`; throws DataError when absent.
  int RowOf(ClassId id) const;
};

/// Writes `<stem>.zmat` and `<stem>.json`. The sidecar carries class ids,
/// metric, method and `extra`.
void SaveSemanticSpace(const SemanticSpace &space,
                       const std::filesystem::path &sidecar,
                       const std::string &extra_json = "{}");
/// Reads a space from its JSON sidecar.
SemanticSpace LoadSemanticSpace(const std::filesystem::path &sidecar);

enum class EncodeMethod { kAverage, kFisher };

struct EncodeOptions {
  EncodeMethod method = EncodeMethod::kAverage;
  int num_components = 1;  // Fisher only
  GmmConfig gmm;
  FisherOptions fisher;
  /// Cap on the pooled vectors used to fit the GMM; 0 pools everything.
  /// A capped pool is a seeded sample without replacement.
  int max_pool = 0;
  uint64_t seed = 0;
};

/// Encodes one bag per class. Average encodings use Euclidean distance,
/// Fisher encodings cosine distance. For Fisher encodings a single GMM is
/// fitted on the pooled vectors of all bags.
SemanticSpace EncodeClassSet(const std::vector<VectorBag> &bags,
                             const EncodeOptions &opts,
                             DiagGmm *fitted_gmm = nullptr);

/// Term-document columns used as representations, compared by cosine.
SemanticSpace EncodeTermDoc(const TermDocMatrix &td);

}  // namespace zsl

#endif  // ZSLKIT_ENCODERS_H_
