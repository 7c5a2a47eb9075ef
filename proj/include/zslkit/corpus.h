// zslkit/corpus.h

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


#ifndef ZSLKIT_CORPUS_H_
#define ZSLKIT_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "zslkit/zsl-common.h"

namespace zsl {

using StopWords = std::unordered_set<std::string>;

/// Tokens of one class description document, stop words removed.
struct TokenDoc {
  ClassId class_id = 0;
  std::vector<std::string> tokens;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  /// `terms` must be distinct; their order defines the row order.
  explicit Vocabulary(std::vector<std::string> terms);

  size_t size() const { return terms_.size(); }
  const std::vector<std::string> &terms() const { return terms_; }
  const std::string &term(size_t i) const { return terms_[i]; }
  /// Row of `term`, or -1 when absent.
  int64_t Index(std::string_view term) const;

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, int64_t> index_;
};

using CountMatrix = Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// counts(i, j) is the frequency of term i in document j.
struct TermDocMatrix {
  CountMatrix counts;
  std::vector<ClassId> class_ids;  // one per column
};

/// Lowercases ASCII letters and splits on every byte that is not an ASCII
/// letter or digit. Empty pieces and stop words are dropped.
TokenDoc Tokenize(std::string_view text, const StopWords &stopwords,
                  ClassId class_id = 0);

/// Lexicographically ordered union of all tokens. Throws DataError when the
/// list is empty or every document is empty.
Vocabulary BuildVocabulary(const std::vector<TokenDoc> &docs);

TermDocMatrix BuildTermDocMatrix(const std::vector<TokenDoc> &docs,
                                 const Vocabulary &vocab);

/// Built-in list of common English function words.
const StopWords &DefaultStopWords();
/// One term per line; terms are lowercased, blank lines skipped.
StopWords LoadStopWords(const std::filesystem::path &path);

struct CorpusEntry {
  ClassId class_id = 0;
  std::string class_name;
  std::filesystem::path doc_path;
};

/// Corpus manifest: JSON array of {class_id, class_name, doc_path}. Relative
/// document paths resolve against the manifest's directory.
std::vector<CorpusEntry> LoadCorpusManifest(
    const std::filesystem::path &manifest);

}  // namespace zsl

#endif  // ZSLKIT_CORPUS_H_
