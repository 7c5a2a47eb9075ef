// src/pipeline.cc

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


#include "zslkit/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "zslkit/corpus.h"
#include "zslkit/portable-rng.h"

namespace zsl {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

RepMethod ParseRepMethod(const std::string &name) {
  std::string n;
  for (char c : name) n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (n == "td") return RepMethod::kTd;
  if (n == "awv") return RepMethod::kAwv;
  if (n == "fwv") return RepMethod::kFwv;
  if (n == "afv") return RepMethod::kAfv;
  if (n == "ffv") return RepMethod::kFfv;
  throw ConfigError("unknown method '" + name + "' (expected td|awv|fwv|afv|ffv)");
}

bool IsFisher(RepMethod m) { return m == RepMethod::kFwv || m == RepMethod::kFfv; }

std::string RepMethodName(RepMethod method, int k) {
  switch (method) {
    case RepMethod::kTd: return "TD";
    case RepMethod::kAwv: return "AWV";
    case RepMethod::kAfv: return "AFV";
    case RepMethod::kFwv: return "FWV(K=" + std::to_string(k) + ")";
    case RepMethod::kFfv: return "FFV(K=" + std::to_string(k) + ")";
  }
  return "?";
}

std::string EncodeRequestJson(const EncodeRequest &req) {
  ojson j;
  j["method"] = RepMethodName(req.method, req.num_components);
  if (IsFisher(req.method)) {
    j["K"] = req.num_components;
    j["gmm"] = {{"max_iter", req.gmm.max_iter},
                {"tol", req.gmm.tol},
                {"var_floor", req.gmm.var_floor},
                {"max_pool", req.max_pool}};
    j["power_normalize"] = req.fisher.power_normalize;
    j["l2_normalize"] = req.fisher.l2_normalize;
  }
  if (req.method == RepMethod::kAfv || req.method == RepMethod::kFfv)
    j["images_per_class"] = req.images_per_class;
  if (req.word_table) j["word_table"] = req.word_table->string();
  if (req.stopwords) j["stopwords"] = req.stopwords->string();
  j["seed"] = req.seed;
  return j.dump();
}

namespace {

std::vector<TokenDoc> ReadDocs(const Dataset &ds, const StopWords &stop) {
  std::vector<TokenDoc> docs;
  for (const auto &c : ds.classes) {
    if (!c.doc)
      throw DataError("class " + std::to_string(c.id) + " (" + c.name +
                      ") has no description document");
    docs.push_back(Tokenize(ReadFile(*c.doc), stop, c.id));
  }
  return docs;
}

}  // namespace

EncodeOutcome EncodeDataset(const Dataset &ds, const EncodeRequest &req) {
  if (IsFisher(req.method) && (req.num_components < 1 || req.num_components > 5))
    throw ConfigError("Fisher encodings take K in 1..5, got " +
                      std::to_string(req.num_components));
  EncodeOutcome out;
  ojson details;
  EncodeOptions eo;
  eo.method = IsFisher(req.method) ? EncodeMethod::kFisher : EncodeMethod::kAverage;
  eo.num_components = req.num_components;
  eo.gmm = req.gmm;
  eo.fisher = req.fisher;
  eo.max_pool = req.max_pool;
  eo.seed = req.seed;

  std::vector<VectorBag> bags;
  if (req.method == RepMethod::kTd || req.method == RepMethod::kAwv ||
      req.method == RepMethod::kFwv) {
    const StopWords stop =
        req.stopwords ? LoadStopWords(*req.stopwords) : DefaultStopWords();
    std::vector<TokenDoc> docs = ReadDocs(ds, stop);
    if (req.method == RepMethod::kTd) {
      Vocabulary vocab = BuildVocabulary(docs);
      out.space = EncodeTermDoc(BuildTermDocMatrix(docs, vocab));
      details["vocabulary_size"] = vocab.size();
    } else {
      std::optional<fs::path> table_path = req.word_table ? req.word_table : ds.word_table;
      if (!table_path)
        throw ConfigError("method " + RepMethodName(req.method, req.num_components) +
                          " needs a word table (--word-table or manifest word_table)");
      std::unordered_set<std::string> needed;
      for (const auto &d : docs) needed.insert(d.tokens.begin(), d.tokens.end());
      WordTable table = LoadWordTable(*table_path, WordTableFormat::kAuto, &needed);
      ojson skipped = ojson::object();
      for (const auto &d : docs) {
        LookupResult r = LookupWordVectors(d, table);
        skipped[std::to_string(d.class_id)] = r.skipped;
        bags.push_back(std::move(r.bag));
      }
      details["skipped_tokens"] = skipped;
    }
  } else {
    std::vector<ClassId> full;
    for (const auto &c : ds.classes) {
      if (!c.image_bag)
        throw DataError("class " + std::to_string(c.id) + " (" + c.name +
                        ") has no image bag");
      VectorBag bag{c.id, LoadMatrix(*c.image_bag)};
      if (req.images_per_class > 0) {
        if (bag.size() < req.images_per_class) full.push_back(c.id);
        bag = SubsampleBag(bag, req.images_per_class,
                           DeriveSeed(req.seed, 1000 + static_cast<uint64_t>(c.id)));
      }
      bags.push_back(std::move(bag));
    }
    details["full_bag_classes"] = full;
  }
  if (req.method != RepMethod::kTd) out.space = EncodeClassSet(bags, eo);
  out.space.method = RepMethodName(req.method, req.num_components);
  details["dim"] = out.space.reps.cols();
  details["metric"] = MetricName(out.space.metric);
  out.details_json = details.dump();
  return out;
}

// ---------------------------------------------------------------------------

int ResolveThreads(int requested) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char *env = std::getenv("ZSLKIT_THREADS")) {
    int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(1, n);
}

void ParallelFor(int n, int threads, const std::function<void(int)> &fn) {
  std::vector<std::exception_ptr> errors(std::max(n, 0));
  threads = std::min(std::max(threads, 1), std::max(n, 1));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&]() {
        for (int i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto &th : pool) th.join();
  }
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

Matrix Rows(const Matrix &m, const std::vector<int> &idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(idx[i]);
  return out;
}

std::vector<ClassId> Labels(const Dataset &ds, const std::vector<int> &idx) {
  std::vector<ClassId> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(ds.video_labels[i]);
  return out;
}

std::vector<int> ExamplesOf(const Dataset &ds, const std::vector<ClassId> &classes) {
  std::vector<int> idx;
  for (size_t i = 0; i < ds.video_labels.size(); ++i)
    if (std::binary_search(classes.begin(), classes.end(), ds.video_labels[i]))
      idx.push_back(static_cast<int>(i));
  return idx;
}

ClassEmbeddings Concat(const ClassEmbeddings &a, const ClassEmbeddings &b) {
  ClassEmbeddings out;
  out.class_ids = a.class_ids;
  out.class_ids.insert(out.class_ids.end(), b.class_ids.begin(), b.class_ids.end());
  out.points.resize(a.points.rows() + b.points.rows(), a.points.cols());
  out.points << a.points, b.points;
  return out;
}

ojson ParamsJson(const ModelParams &p) {
  return {{"d_latent", p.latent_dim},
          {"k_g", p.num_neighbors},
          {"width_multiple", p.width_multiple}};
}

[[noreturn]] void Rethrow(const Error &e, int split, const std::string &stage) {
  throw Error(e.kind(), "split " + std::to_string(split) + ", stage " + stage + ": " +
                            e.what());
}

}  // namespace

LatentModel FitLatentModel(const Dataset &ds, const std::vector<int> &train,
                           const Matrix &semantic_dist,
                           const std::vector<ClassId> &semantic_ids,
                           const std::vector<ClassId> &unseen,
                           const ModelParams &params, const LsmConfig &lsm) {
  const Matrix x = Rows(ds.video_features, train);
  const std::vector<ClassId> labels = Labels(ds, train);
  SlppConfig sc;
  sc.latent_dim = params.latent_dim;
  sc.num_neighbors = params.num_neighbors;
  sc.width_multiple = params.width_multiple;
  LatentModel model;
  model.projection = SlppFit(x, labels, sc).projection;
  model.seen_landmarks = ClassLandmarks(Project(model.projection, x), labels);
  model.unseen_embeddings =
      LsmEmbed(model.seen_landmarks, semantic_dist, semantic_ids, unseen, lsm).unseen;
  return model;
}

ModelParams SelectParams(const Dataset &ds, const SemanticSpace &space,
                         const Matrix &semantic_dist, const ClassSplit &split,
                         const EvaluateOptions &opts, uint64_t seed) {
  const auto folds = CvFolds(split.seen, opts.grid.folds, seed);
  double best_score = -1.0;
  std::optional<ModelParams> best;
  for (int d : opts.grid.latent_dims)
    for (int k : opts.grid.num_neighbors)
      for (double w : opts.grid.width_multiples) {
        ModelParams p{d, k, w};
        double total = 0.0;
        bool feasible = true;
        for (size_t f = 0; f < folds.size() && feasible; ++f) {
          try {
            const auto train = ExamplesOf(ds, folds[f].pseudo_seen);
            const auto test = ExamplesOf(ds, folds[f].pseudo_unseen);
            LsmConfig lsm = opts.lsm;
            lsm.seed = DeriveSeed(seed, 100 + f);
            LatentModel m = FitLatentModel(ds, train, semantic_dist, space.class_ids,
                                           folds[f].pseudo_unseen, p, lsm);
            total += EvaluateCzsl(Project(m.projection, Rows(ds.video_features, test)),
                                  Labels(ds, test), m.unseen_embeddings);
          } catch (const Error &) {
            feasible = false;
          }
        }
        if (!feasible) continue;
        double score = total / static_cast<double>(folds.size());
        if (score > best_score) {
          best_score = score;
          best = p;
        }
      }
  if (!best) throw ConfigError("no feasible hyperparameter in the CV grid");
  return *best;
}

namespace {

SplitOutcome EvaluateSplit(const Dataset &ds, const SemanticSpace &space,
                           const Matrix &semantic_dist, const ClassSplit &split,
                           const EvaluateOptions &opts) {
  SplitOutcome out;
  out.split_index = split.split_index;
  out.seed = DeriveSeed(opts.seed, static_cast<uint64_t>(split.split_index));
  std::string stage = "cv";
  try {
    out.params = opts.cross_validate
                     ? SelectParams(ds, space, semantic_dist, split, opts,
                                    DeriveSeed(out.seed, 1))
                     : opts.params;
    LsmConfig lsm = opts.lsm;
    lsm.seed = DeriveSeed(out.seed, 2);
    const std::string config = ParamsJson(out.params).dump();

    if (opts.czsl) {
      stage = "czsl-fit";
      const auto train = ExamplesOf(ds, split.seen);
      LatentModel model = FitLatentModel(ds, train, semantic_dist, space.class_ids,
                                         split.unseen, out.params, lsm);
      stage = "czsl-eval";
      const auto test = ExamplesOf(ds, split.unseen);
      const Matrix latent = Project(model.projection, Rows(ds.video_features, test));
      const auto truth = Labels(ds, test);
      out.inductive.a_u_u = EvaluateCzsl(latent, truth, model.unseen_embeddings);
      if (opts.transductive) {
        stage = "czsl-transductive";
        auto pred = TransductivePredict(latent, model.unseen_embeddings,
                                        Metric::kEuclidean, DeriveSeed(out.seed, 3),
                                        opts.kmeans_restarts);
        out.transductive.a_u_u = PerClassAccuracy(pred, truth, split.unseen);
      }
      if (opts.model_dir)
        SaveLatentModel(model, *opts.model_dir,
                        "split" + std::to_string(split.split_index) + "_czsl", config,
                        out.seed);
    }
    if (opts.gzsl) {
      stage = "gzsl-holdout";
      GzslPartition part = GzslHoldout(ds.video_labels, split, opts.holdout_fraction,
                                       DeriveSeed(out.seed, 4));
      stage = "gzsl-fit";
      LatentModel model = FitLatentModel(ds, part.train, semantic_dist, space.class_ids,
                                         split.unseen, out.params, lsm);
      stage = "gzsl-eval";
      const ClassEmbeddings all = Concat(model.seen_landmarks, model.unseen_embeddings);
      const Matrix lu = Project(model.projection, Rows(ds.video_features, part.unseen_test));
      const Matrix ls = Project(model.projection, Rows(ds.video_features, part.seen_test));
      const auto tu = Labels(ds, part.unseen_test), ts = Labels(ds, part.seen_test);
      GzslScores g = EvaluateGzsl(lu, tu, ls, ts, all);
      out.inductive.a_u_t = g.a_u_t;
      out.inductive.a_s_t = g.a_s_t;
      out.inductive.h = g.h;
      if (opts.transductive) {
        stage = "gzsl-transductive";
        Matrix pts(lu.rows() + ls.rows(), lu.cols());
        pts << lu, ls;
        auto pred = TransductivePredict(pts, all, Metric::kEuclidean,
                                        DeriveSeed(out.seed, 5), opts.kmeans_restarts);
        std::vector<ClassId> pu(pred.begin(), pred.begin() + lu.rows());
        std::vector<ClassId> ps(pred.begin() + lu.rows(), pred.end());
        double au = PerClassAccuracy(pu, tu, split.unseen);
        double as = PerClassAccuracy(ps, ts, split.seen);
        out.transductive.a_u_t = au;
        out.transductive.a_s_t = as;
        out.transductive.h = HarmonicMean(au, as);
      }
      if (opts.model_dir)
        SaveLatentModel(model, *opts.model_dir,
                        "split" + std::to_string(split.split_index) + "_gzsl", config,
                        out.seed);
    }
  } catch (const Error &e) {
    Rethrow(e, split.split_index, stage);
  }
  return out;
}

}  // namespace

EvalReport Evaluate(const Dataset &ds, const SemanticSpace &space,
                    const std::vector<ClassSplit> &splits, const EvaluateOptions &opts) {
  if (splits.empty()) throw ConfigError("no splits to evaluate");
  if (!opts.czsl && !opts.gzsl) throw ConfigError("no setting requested (czsl, gzsl)");
  for (const auto &c : ds.classes) space.RowOf(c.id);
  const Matrix semantic_dist = SemanticDistanceMatrix(space);
  EvalReport report;
  report.dataset = ds.name;
  report.method = space.method;
  report.options = opts;
  report.splits.resize(splits.size());
  ParallelFor(static_cast<int>(splits.size()), ResolveThreads(opts.threads), [&](int i) {
    report.splits[i] = EvaluateSplit(ds, space, semantic_dist, splits[i], opts);
  });
  return report;
}

std::string EvaluateOptionsJson(const EvaluateOptions &o) {
  ojson j;
  j["params"] = ParamsJson(o.params);
  j["cross_validate"] = o.cross_validate;
  if (o.cross_validate)
    j["grid"] = {{"d_latent", o.grid.latent_dims},
                 {"k_g", o.grid.num_neighbors},
                 {"width_multiple", o.grid.width_multiples},
                 {"folds", o.grid.folds}};
  j["settings"] = {{"czsl", o.czsl}, {"gzsl", o.gzsl}, {"transductive", o.transductive}};
  j["holdout_fraction"] = o.holdout_fraction;
  j["lsm"] = {{"learning_rate", o.lsm.learning_rate},
              {"max_iter", o.lsm.max_iter},
              {"tol", o.lsm.tol},
              {"restarts", o.lsm.restarts},
              {"jitter", o.lsm.jitter}};
  j["kmeans_restarts"] = o.kmeans_restarts;
  j["latent_metric"] = "euclidean";
  j["seed"] = o.seed;
  return j.dump();
}

namespace {

ojson ScoresJson(const SplitScores &s) {
  ojson j = ojson::object();
  if (s.a_u_u) j["A_U->U"] = *s.a_u_u;
  if (s.a_u_t) j["A_U->T"] = *s.a_u_t;
  if (s.a_s_t) j["A_S->T"] = *s.a_s_t;
  if (s.h) j["H"] = *s.h;
  return j;
}

const char *const kMetricOrder[] = {"A_U->U", "A_U->T", "A_S->T", "H"};

ojson SettingJson(const EvalReport &r, bool transductive) {
  ojson block;
  block["setting"] = transductive ? "transductive" : "inductive";
  block["splits"] = ojson::array();
  std::vector<SplitScores> scores;
  for (const auto &s : r.splits) {
    const SplitScores &sc = transductive ? s.transductive : s.inductive;
    ojson js;
    js["split"] = s.split_index;
    const ojson values = ScoresJson(sc);
    for (const auto &[k, v] : values.items()) js[k] = v;
    if (r.options.cross_validate) js["params"] = ParamsJson(s.params);
    block["splits"].push_back(js);
    scores.push_back(sc);
  }
  auto summary = Summarize(scores);
  block["mean"] = ojson::object();
  block["stderr"] = ojson::object();
  for (const char *m : kMetricOrder) {
    auto it = summary.find(m);
    if (it == summary.end()) continue;
    block["mean"][m] = it->second.mean;
    block["stderr"][m] = it->second.stderr_;
  }
  return block;
}

}  // namespace

std::string ReportJson(const EvalReport &r) {
  ojson j;
  j["dataset"] = r.dataset;
  j["method"] = r.method;
  j["config"] = ojson::parse(EvaluateOptionsJson(r.options));
  ojson seeds;
  seeds["base"] = r.options.seed;
  seeds["splits"] = ojson::array();
  for (const auto &s : r.splits) seeds["splits"].push_back(s.seed);
  j["seeds"] = seeds;
  j["inductive"] = SettingJson(r, false);
  if (r.options.transductive) j["transductive"] = SettingJson(r, true);
  return j.dump(2) + "\n";
}

namespace {

std::string Num(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

void AppendCsvRows(const ojson &report, const std::string &prefix, std::string *out) {
  for (const char *setting : {"inductive", "transductive"}) {
    if (!report.contains(setting)) continue;
    const ojson &b = report[setting];
    for (const char *m : kMetricOrder) {
      if (!b["mean"].contains(m)) continue;
      *out += prefix + "," + setting + "," + m + "," + Num(b["mean"][m].get<double>()) +
              "," + Num(b["stderr"][m].get<double>()) + "\n";
    }
  }
}

}  // namespace

std::string ReportCsv(const EvalReport &r) {
  std::string out = "method,setting,metric,mean,stderr\n";
  AppendCsvRows(ojson::parse(ReportJson(r)), r.method, &out);
  return out;
}

std::string ReportTable(const std::string &report_json) {
  ojson j;
  try {
    j = ojson::parse(report_json);
  } catch (const ojson::exception &e) {
    throw DataError(std::string("report: ") + e.what());
  }
  std::ostringstream os;
  os << j.value("dataset", "?") << "  " << j.value("method", "?")
     << "  (mean +- standard error, %)\n";
  for (const char *setting : {"inductive", "transductive"}) {
    if (!j.contains(setting)) continue;
    const ojson &b = j[setting];
    os << "  " << std::left << std::setw(13) << setting;
    for (const char *m : kMetricOrder) {
      if (!b["mean"].contains(m)) continue;
      os << "  " << m << " " << std::fixed << std::setprecision(2)
         << 100.0 * b["mean"][m].get<double>() << " +- "
         << 100.0 * b["stderr"][m].get<double>();
    }
    os << "\n";
  }
  return os.str();
}

std::vector<SweepPoint> Sweep(const Dataset &ds, const std::vector<ClassSplit> &splits,
                              const EncodeRequest &base, SweepAxis axis,
                              const std::vector<int> &values,
                              const EvaluateOptions &opts) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (axis == SweepAxis::kComponents && !IsFisher(base.method))
    throw ConfigError("a K sweep needs a Fisher method (fwv or ffv)");
  if (axis == SweepAxis::kImagesPerClass && base.method != RepMethod::kAfv &&
      base.method != RepMethod::kFfv)
    throw ConfigError("an image-count sweep needs an image method (afv or ffv)");
  std::vector<SweepPoint> points;
  for (int v : values) {
    if (v < 1) throw ConfigError("sweep values must be positive");
    EncodeRequest req = base;
    if (axis == SweepAxis::kComponents)
      req.num_components = v;
    else
      req.images_per_class = v;
    EncodeOutcome enc = EncodeDataset(ds, req);
    SweepPoint p;
    p.value = v;
    auto details = nlohmann::json::parse(enc.details_json);
    if (details.contains("full_bag_classes"))
      p.full_bag_classes = details["full_bag_classes"].get<std::vector<ClassId>>();
    p.report = Evaluate(ds, enc.space, splits, opts);
    points.push_back(std::move(p));
  }
  return points;
}

std::string SweepCsv(const std::vector<SweepPoint> &points) {
  std::string out = "axis_value,setting,metric,mean,stderr\n";
  for (const auto &p : points)
    AppendCsvRows(ojson::parse(ReportJson(p.report)), std::to_string(p.value), &out);
  return out;
}

}  // namespace zsl
