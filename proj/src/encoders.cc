// src/encoders.cc

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


#include "zslkit/encoders.h"

#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include <json.hpp>

#include "zslkit/data-io.h"
#include "zslkit/portable-rng.h"

namespace zsl {

namespace fs = std::filesystem;

void WordTable::Add(const std::string &term, Vector v) {
  if (v.size() != dim_)
    throw DataError("word vector for '" + term + "' has dimension " +
                    std::to_string(v.size()) + ", table dimension is " +
                    std::to_string(dim_));
  vectors_[term] = std::move(v);
}

const Vector *WordTable::Find(const std::string &term) const {
  auto it = vectors_.find(term);
  return it == vectors_.end() ? nullptr : &it->second;
}

namespace {

struct TableHeader {
  long long count = 0;
  int dim = 0;
  size_t body = 0;  // offset of the first record
};

TableHeader ParseHeader(const std::string &buf, const fs::path &path) {
  size_t eol = buf.find('\n');
  std::istringstream hs(buf.substr(0, eol));
  TableHeader h;
  std::string extra;
  if (eol == std::string::npos || !(hs >> h.count >> h.dim) || (hs >> extra) ||
      h.count < 0 || h.dim <= 0)
    throw DataError(path.string() + ": word table header must be 'count dim'");
  h.body = eol + 1;
  return h;
}

WordTable ParseText(const std::string &buf, const TableHeader &h,
                    const std::unordered_set<std::string> *keep,
                    const fs::path &path) {
  WordTable table(h.dim);
  size_t pos = h.body;
  long long records = 0;
  int lineno = 1;
  while (pos < buf.size()) {
    size_t eol = buf.find('\n', pos);
    if (eol == std::string::npos) eol = buf.size();
    std::string line = buf.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const char *p = line.c_str();
    while (*p == ' ' || *p == '\t') ++p;
    const char *term_end = p;
    while (*term_end && *term_end != ' ' && *term_end != '\t') ++term_end;
    std::string term(p, term_end);
    p = term_end;
    Vector v(h.dim);
    for (int d = 0; d < h.dim; ++d) {
      char *end = nullptr;
      errno = 0;
      double x = std::strtod(p, &end);
      if (end == p || errno == ERANGE || !std::isfinite(x))
        throw DataError(path.string() + ":" + std::to_string(lineno) +
                        ": expected " + std::to_string(h.dim) +
                        " floats after '" + term + "'");
      v(d) = x;
      p = end;
    }
    while (*p == ' ' || *p == '\t' || *p == '\r') ++p;
    if (*p != '\0')
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": trailing data after " + std::to_string(h.dim) +
                      " floats");
    ++records;
    if (!keep || keep->count(term)) table.Add(term, std::move(v));
  }
  if (records != h.count)
    throw DataError(path.string() + ": header announces " +
                    std::to_string(h.count) + " words, found " +
                    std::to_string(records));
  return table;
}

WordTable ParseBinary(const std::string &buf, const TableHeader &h,
                      const std::unordered_set<std::string> *keep,
                      const fs::path &path) {
  WordTable table(h.dim);
  size_t pos = h.body;
  const size_t payload = static_cast<size_t>(h.dim) * 4;
  for (long long r = 0; r < h.count; ++r) {
    while (pos < buf.size() && (buf[pos] == '\n' || buf[pos] == '\r')) ++pos;
    size_t sp = buf.find(' ', pos);
    if (sp == std::string::npos || sp + 1 + payload > buf.size())
      throw DataError(path.string() + ": truncated binary record " +
                      std::to_string(r));
    std::string term = buf.substr(pos, sp - pos);
    pos = sp + 1;
    Vector v(h.dim);
    for (int d = 0; d < h.dim; ++d, pos += 4) {
      uint32_t bits = 0;
      for (int b = 0; b < 4; ++b)
        bits |= static_cast<uint32_t>(static_cast<unsigned char>(buf[pos + b]))
                << (8 * b);
      float x = std::bit_cast<float>(bits);
      if (!std::isfinite(x))
        throw DataError(path.string() + ": non-finite value for '" + term + "'");
      v(d) = x;
    }
    if (!keep || keep->count(term)) table.Add(term, std::move(v));
  }
  return table;
}

}  // namespace

WordTable LoadWordTable(const fs::path &path, WordTableFormat format,
                        const std::unordered_set<std::string> *keep) {
  const std::string buf = ReadFile(path);
  const TableHeader h = ParseHeader(buf, path);
  if (format == WordTableFormat::kText) return ParseText(buf, h, keep, path);
  if (format == WordTableFormat::kBinary) return ParseBinary(buf, h, keep, path);
  try {
    return ParseText(buf, h, keep, path);
  } catch (const DataError &text_error) {
    try {
      return ParseBinary(buf, h, keep, path);
    } catch (const DataError &) {
      throw text_error;
    }
  }
}

void SaveWordTableText(const WordTable &table,
                       const std::vector<std::string> &terms,
                       const fs::path &path) {
  std::ostringstream os;
  os.precision(17);
  os << terms.size() << " " << table.dim() << "\n";
  for (const auto &t : terms) {
    const Vector *v = table.Find(t);
    if (!v) throw DataError("word '" + t + "' not in table");
    os << t;
    for (int d = 0; d < table.dim(); ++d) os << " " << (*v)(d);
    os << "\n";
  }
  WriteFileAtomic(path, os.str());
}

LookupResult LookupWordVectors(const TokenDoc &doc, const WordTable &table) {
  if (table.size() == 0) throw DataError("word table is empty");
  std::vector<const Vector *> found;
  LookupResult res;
  for (const auto &t : doc.tokens) {
    const Vector *v = table.Find(t);
    if (v)
      found.push_back(v);
    else
      ++res.skipped;
  }
  if (found.empty())
    throw DataError("none of the " + std::to_string(doc.tokens.size()) +
                    " tokens of class " + std::to_string(doc.class_id) +
                    " is in the word table");
  res.bag.class_id = doc.class_id;
  res.bag.vectors.resize(static_cast<Eigen::Index>(found.size()), table.dim());
  for (size_t i = 0; i < found.size(); ++i)
    res.bag.vectors.row(static_cast<Eigen::Index>(i)) = found[i]->transpose();
  return res;
}

Vector AverageEncode(const VectorBag &bag) {
  if (bag.size() == 0)
    throw DataError("cannot average the empty bag of class " +
                    std::to_string(bag.class_id));
  Vector sum = Vector::Zero(bag.dim());
  for (Eigen::Index i = 0; i < bag.size(); ++i) sum += bag.vectors.row(i).transpose();
  return sum / static_cast<double>(bag.size());
}

Vector FisherEncode(const DiagGmm &gmm, const VectorBag &bag,
                    const FisherOptions &opts) {
  if (bag.size() == 0)
    throw DataError("cannot Fisher-encode the empty bag of class " +
                    std::to_string(bag.class_id));
  if (bag.dim() != gmm.dim())
    throw DataError("bag of class " + std::to_string(bag.class_id) +
                    " has dimension " + std::to_string(bag.dim()) +
                    ", GMM has " + std::to_string(gmm.dim()));
  const int k = gmm.num_components();
  const int dim = gmm.dim();
  const Matrix sigma = gmm.variances.cwiseSqrt();
  Matrix g_mu = Matrix::Zero(k, dim), g_sigma = Matrix::Zero(k, dim);
  for (Eigen::Index i = 0; i < bag.size(); ++i) {
    const Vector v = bag.vectors.row(i).transpose();
    const Vector gamma = GmmPosteriors(gmm, v);
    for (int c = 0; c < k; ++c) {
      for (int d = 0; d < dim; ++d) {
        double z = (v(d) - gmm.means(c, d)) / sigma(c, d);
        g_mu(c, d) += gamma(c) * z;
        g_sigma(c, d) += gamma(c) * (z * z - 1.0);
      }
    }
  }
  Vector fv(2 * k * dim);
  for (int c = 0; c < k; ++c) {
    double s_mu = 1.0 / std::sqrt(gmm.weights(c));
    double s_sigma = 1.0 / std::sqrt(2.0 * gmm.weights(c));
    for (int d = 0; d < dim; ++d) {
      fv(c * dim + d) = s_mu * g_mu(c, d);
      fv((k + c) * dim + d) = s_sigma * g_sigma(c, d);
    }
  }
  if (opts.power_normalize)
    fv = fv.unaryExpr([](double x) { return std::copysign(std::sqrt(std::abs(x)), x); });
  if (opts.l2_normalize) {
    double n = fv.norm();
    if (n > 0.0) fv /= n;
  }
  return fv;
}

int SemanticSpace::RowOf(ClassId id) const {
  for (size_t i = 0; i < class_ids.size(); ++i)
    if (class_ids[i] == id) return static_cast<int>(i);
  throw DataError("class " + std::to_string(id) + " not in semantic space");
}

void SaveSemanticSpace(const SemanticSpace &space, const fs::path &sidecar,
                       const std::string &extra_json) {
  fs::path matrix = sidecar;
  matrix.replace_extension(".zmat");
  SaveMatrix(space.reps, matrix);
  nlohmann::json j;
  j["matrix"] = matrix.filename().string();
  j["class_ids"] = space.class_ids;
  j["metric"] = MetricName(space.metric);
  j["method"] = space.method;
  j["dim"] = space.reps.cols();
  j["extra"] = nlohmann::json::parse(extra_json);
  WriteFileAtomic(sidecar, j.dump(2) + "\n");
}

SemanticSpace LoadSemanticSpace(const fs::path &sidecar) {
  SemanticSpace space;
  try {
    auto j = nlohmann::json::parse(ReadFile(sidecar));
    space.class_ids = j.at("class_ids").get<std::vector<ClassId>>();
    space.metric = ParseMetric(j.at("metric").get<std::string>());
    space.method = j.value("method", "");
    fs::path m(j.at("matrix").get<std::string>());
    space.reps = LoadMatrix(m.is_absolute() ? m : sidecar.parent_path() / m);
  } catch (const nlohmann::json::exception &e) {
    throw DataError(sidecar.string() + ": " + e.what());
  }
  if (space.reps.rows() != space.num_classes())
    throw DataError(sidecar.string() + ": " +
                    std::to_string(space.num_classes()) + " class ids for " +
                    std::to_string(space.reps.rows()) + " rows");
  return space;
}

SemanticSpace EncodeClassSet(const std::vector<VectorBag> &bags,
                             const EncodeOptions &opts, DiagGmm *fitted_gmm) {
  if (bags.empty()) throw DataError("no class bags to encode");
  SemanticSpace space;
  for (const auto &b : bags) {
    if (b.size() == 0)
      throw DataError("class " + std::to_string(b.class_id) + " has an empty bag");
    if (b.dim() != bags.front().dim())
      throw DataError("class " + std::to_string(b.class_id) +
                      " bag dimension " + std::to_string(b.dim()) +
                      " differs from " + std::to_string(bags.front().dim()));
    space.class_ids.push_back(b.class_id);
  }
  const Eigen::Index dim = bags.front().dim();
  if (opts.method == EncodeMethod::kAverage) {
    space.metric = Metric::kEuclidean;
    space.method = "average";
    space.reps.resize(static_cast<Eigen::Index>(bags.size()), dim);
    for (size_t j = 0; j < bags.size(); ++j)
      space.reps.row(static_cast<Eigen::Index>(j)) = AverageEncode(bags[j]).transpose();
    return space;
  }

  if (opts.num_components < 1)
    throw ConfigError("Fisher encoding needs K >= 1");
  Eigen::Index total = 0;
  for (const auto &b : bags) total += b.size();
  Matrix pool(total, dim);
  Eigen::Index row = 0;
  for (const auto &b : bags) {
    pool.middleRows(row, b.size()) = b.vectors;
    row += b.size();
  }
  if (opts.max_pool > 0 && total > opts.max_pool) {
    VectorBag all{0, std::move(pool)};
    pool = SubsampleBag(all, opts.max_pool, DeriveSeed(opts.seed, 1)).vectors;
  }
  GmmFit fit = FitDiagGmm(pool, opts.num_components, opts.gmm, opts.seed);
  space.metric = Metric::kCosine;
  space.method = "fisher";
  space.reps.resize(static_cast<Eigen::Index>(bags.size()),
                    2 * dim * opts.num_components);
  for (size_t j = 0; j < bags.size(); ++j) {
    try {
      space.reps.row(static_cast<Eigen::Index>(j)) =
          FisherEncode(fit.gmm, bags[j], opts.fisher).transpose();
    } catch (const DataError &e) {
      throw DataError("class " + std::to_string(bags[j].class_id) + ": " + e.what());
    }
  }
  if (fitted_gmm) *fitted_gmm = fit.gmm;
  return space;
}

SemanticSpace EncodeTermDoc(const TermDocMatrix &td) {
  if (td.counts.cols() == 0) throw DataError("term-document matrix has no columns");
  SemanticSpace space;
  space.class_ids = td.class_ids;
  space.reps = td.counts.transpose().cast<double>();
  space.metric = Metric::kCosine;
  space.method = "td";
  return space;
}

}  // namespace zsl
