// src/corpus.cc

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


#include "zslkit/corpus.h"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "zslkit/data-io.h"

namespace zsl {

namespace {

const char *const kDefaultStopWords[] = {
    "a", "about", "above", "after", "again", "against", "all", "also", "always",
    "am", "an", "and", "another", "any", "anything", "are", "around", "as",
    "at", "be", "because", "become", "been", "before", "being", "below",
    "between", "both", "but", "by", "can", "could", "did", "do", "does",
    "doing", "done", "down", "during", "each", "either", "else", "etc", "ever",
    "every", "few", "for", "from", "further", "get", "gets", "got", "had",
    "has", "have", "having", "he", "her", "here", "hers", "herself", "him",
    "himself", "his", "how", "however", "i", "if", "in", "into", "is", "it",
    "its", "itself", "just", "let", "may", "me", "might", "more", "most",
    "much", "must", "my", "myself", "neither", "no", "nor", "not", "now", "of",
    "off", "often", "on", "once", "one", "only", "or", "other", "others",
    "ought", "our", "ours", "ourselves", "out", "over", "own", "per", "quite",
    "rather", "really", "same", "shall", "she", "should", "since", "so", "some",
    "something", "such", "than", "that", "the", "their", "theirs", "them",
    "themselves", "then", "there", "therefore", "these", "they", "this",
    "those", "though", "through", "thus", "to", "too", "under", "unless",
    "until", "up", "upon", "us", "very", "via", "was", "we", "were", "what",
    "when", "where", "whereas", "whether", "which", "while", "who", "whom",
    "whose", "why", "will", "with", "within", "without", "would", "yet", "you",
    "your", "yours", "yourself", "yourselves",
};

bool IsAsciiAlnum(unsigned char ch) {
  return (ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'z') ||
         (ch >= 'A' && ch <= 'Z');
}

char AsciiLower(unsigned char ch) {
  return (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch - 'A' + 'a')
                                  : static_cast<char>(ch);
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> terms)
    : terms_(std::move(terms)) {
  for (size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], static_cast<int64_t>(i)).second)
      throw DataError("duplicate vocabulary term '" + terms_[i] + "'");
  }
}

int64_t Vocabulary::Index(std::string_view term) const {
  auto it = index_.find(std::string(term));
  return it == index_.end() ? -1 : it->second;
}

TokenDoc Tokenize(std::string_view text, const StopWords &stopwords,
                  ClassId class_id) {
  TokenDoc doc;
  doc.class_id = class_id;
  std::string current;
  auto flush = [&]() {
    if (!current.empty() && !stopwords.count(current))
      doc.tokens.push_back(current);
    current.clear();
  };
  for (char c : text) {
    unsigned char ch = static_cast<unsigned char>(c);
    if (IsAsciiAlnum(ch))
      current.push_back(AsciiLower(ch));
    else
      flush();
  }
  flush();
  return doc;
}

Vocabulary BuildVocabulary(const std::vector<TokenDoc> &docs) {
  if (docs.empty()) throw DataError("cannot build a vocabulary from no documents");
  std::set<std::string> terms;
  for (const auto &d : docs) terms.insert(d.tokens.begin(), d.tokens.end());
  if (terms.empty())
    throw DataError("every document is empty after tokenization");
  return Vocabulary(std::vector<std::string>(terms.begin(), terms.end()));
}

TermDocMatrix BuildTermDocMatrix(const std::vector<TokenDoc> &docs,
                                 const Vocabulary &vocab) {
  TermDocMatrix td;
  td.counts = CountMatrix::Zero(static_cast<Eigen::Index>(vocab.size()),
                                static_cast<Eigen::Index>(docs.size()));
  for (size_t j = 0; j < docs.size(); ++j) {
    td.class_ids.push_back(docs[j].class_id);
    for (const auto &t : docs[j].tokens) {
      int64_t i = vocab.Index(t);
      if (i < 0)
        throw DataError("token '" + t + "' of class " +
                        std::to_string(docs[j].class_id) +
                        " is not in the vocabulary");
      ++td.counts(i, static_cast<Eigen::Index>(j));
    }
  }
  return td;
}

const StopWords &DefaultStopWords() {
  static const StopWords words(std::begin(kDefaultStopWords),
                               std::end(kDefaultStopWords));
  return words;
}

StopWords LoadStopWords(const std::filesystem::path &path) {
  std::istringstream is(ReadFile(path));
  StopWords words;
  std::string line;
  while (std::getline(is, line)) {
    TokenDoc d = Tokenize(line, {});
    for (auto &t : d.tokens) words.insert(std::move(t));
  }
  return words;
}

std::vector<CorpusEntry> LoadCorpusManifest(
    const std::filesystem::path &manifest) {
  std::vector<CorpusEntry> entries;
  try {
    auto j = nlohmann::json::parse(ReadFile(manifest));
    for (const auto &e : j) {
      CorpusEntry entry;
      entry.class_id = e.at("class_id").get<ClassId>();
      entry.class_name = e.value("class_name", std::to_string(entry.class_id));
      std::filesystem::path p(e.at("doc_path").get<std::string>());
      entry.doc_path = p.is_absolute() ? p : manifest.parent_path() / p;
      entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception &e) {
    throw DataError(manifest.string() + ": " + e.what());
  }
  return entries;
}

}  // namespace zsl
