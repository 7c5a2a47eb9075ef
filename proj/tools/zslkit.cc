// tools/zslkit.cc

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


// Command-line front end: encode, evaluate, sweep, synth, splits, report.
//
// Every subcommand accepts --config FILE, a JSON object whose keys are long
// option names without the dashes; flags given on the command line win.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zslkit/data-io.h"
#include "zslkit/pipeline.h"
#include "zslkit/synth.h"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

using namespace zsl;

int ExitCode(ErrorKind k) {
  switch (k) {
    case ErrorKind::kConfig: return 2;
    case ErrorKind::kData: return 3;
    case ErrorKind::kNumerical: return 4;
  }
  return 1;
}

int ReportError(const std::string &kind, int code, const std::string &message) {
  ojson j;
  j["error"] = kind;
  j["exit_code"] = code;
  j["message"] = message;
  std::cerr << j.dump() << std::endl;
  return code;
}

std::vector<std::string> SplitList(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// Turns a JSON config object into leading command-line arguments. Later
// (real) arguments override them because every option keeps its last value.
std::vector<std::string> ConfigArgs(const fs::path &path) {
  ojson j;
  try {
    j = ojson::parse(ReadFile(path));
  } catch (const ojson::exception &e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path.string() + ": config must be a JSON object");
  std::vector<std::string> args;
  for (const auto &[key, v] : j.items()) {
    const std::string flag = "--" + key;
    if (v.is_boolean()) {
      if (v.get<bool>()) args.push_back(flag);
    } else if (v.is_array()) {
      std::string joined;
      for (const auto &e : v) {
        if (!joined.empty()) joined += ",";
        joined += e.is_string() ? e.get<std::string>() : e.dump();
      }
      args.push_back(flag + "=" + joined);
    } else if (v.is_string()) {
      args.push_back(flag + "=" + v.get<std::string>());
    } else if (v.is_number()) {
      args.push_back(flag + "=" + v.dump());
    } else {
      throw ConfigError(path.string() + ": unsupported value for '" + key + "'");
    }
  }
  return args;
}

struct EncodeFlags {
  std::string manifest;
  std::string method = "afv";
  int k = 1;
  std::string word_table, stopwords;
  int images_per_class = 0;
  int max_pool = 0;
  int gmm_max_iter = 300;
  double gmm_tol = 1e-7;
  double var_floor = 1e-6;
  bool power_norm = false, l2_norm = false;
  uint64_t seed = 0;

  void Add(CLI::App *app, bool for_sweep) {
    app->add_option("--manifest", manifest, "Dataset manifest (JSON)")->required();
    app->add_option("--method", method, "td|awv|fwv|afv|ffv")->required(!for_sweep);
    app->add_option("--k", k, "Gaussian components for fwv/ffv (1..5)");
    app->add_option("--word-table", word_table, "Word vector table (text or binary)");
    app->add_option("--stopwords", stopwords, "Stop-word list, one per line");
    app->add_option("--images-per-class", images_per_class, "Images per class; 0 = all");
    app->add_option("--max-pool", max_pool, "Cap on vectors pooled for the GMM; 0 = all");
    app->add_option("--gmm-max-iter", gmm_max_iter, "EM iteration cap");
    app->add_option("--gmm-tol", gmm_tol, "EM relative tolerance");
    app->add_option("--var-floor", var_floor, "Variance floor relative to pool variance");
    app->add_flag("--power-norm", power_norm, "Signed square root on Fisher vectors");
    app->add_flag("--l2-norm", l2_norm, "L2-normalize Fisher vectors");
    if (!for_sweep) app->add_option("--seed", seed, "Encoding seed");
  }

  EncodeRequest Request(uint64_t s) const {
    EncodeRequest r;
    r.method = ParseRepMethod(method);
    r.num_components = k;
    if (!word_table.empty()) r.word_table = word_table;
    if (!stopwords.empty()) r.stopwords = stopwords;
    r.images_per_class = images_per_class;
    r.max_pool = max_pool;
    r.gmm.max_iter = gmm_max_iter;
    r.gmm.tol = gmm_tol;
    r.gmm.var_floor = var_floor;
    r.fisher.power_normalize = power_norm;
    r.fisher.l2_normalize = l2_norm;
    r.seed = s;
    return r;
  }
};

struct EvalFlags {
  std::string splits;
  std::string settings = "czsl,gzsl";
  bool transductive = false;
  uint64_t seed = 0;
  int d_latent = 10, k_g = 10;
  double width = 1.0;
  bool cv = false;
  int cv_folds = 5;
  std::string cv_d_latent = "20,50,100", cv_k_g = "5,10,20", cv_width = "0.5,1,2";
  double holdout = 0.2;
  int kmeans_restarts = 5;
  int lsm_restarts = 5, lsm_max_iter = 2000;
  double lsm_lr = 0.1;
  int threads = 0;
  std::string model_dir;

  void Add(CLI::App *app) {
    app->add_option("--splits", splits, "Split file (JSON)")->required();
    app->add_option("--settings", settings, "Comma list of czsl,gzsl");
    app->add_flag("--transductive", transductive, "Also run the transductive setting");
    app->add_option("--seed", seed, "Base seed");
    app->add_option("--d-latent", d_latent, "Latent dimension");
    app->add_option("--k-g", k_g, "Graph neighbours");
    app->add_option("--width", width, "Kernel width, multiple of median distance");
    app->add_flag("--cv", cv, "Select d_latent, k_g, width by class-wise CV");
    app->add_option("--cv-folds", cv_folds, "CV folds");
    app->add_option("--cv-d-latent", cv_d_latent, "CV grid for d_latent");
    app->add_option("--cv-k-g", cv_k_g, "CV grid for k_g");
    app->add_option("--cv-width", cv_width, "CV grid for the kernel width");
    app->add_option("--holdout", holdout, "Held-out fraction of each seen class");
    app->add_option("--kmeans-restarts", kmeans_restarts, "Kmeans restarts");
    app->add_option("--lsm-restarts", lsm_restarts, "LSM restarts");
    app->add_option("--lsm-max-iter", lsm_max_iter, "LSM iteration cap");
    app->add_option("--lsm-lr", lsm_lr, "LSM initial learning rate");
    app->add_option("--threads", threads, "Worker threads (ZSLKIT_THREADS caps)");
    app->add_option("--model-dir", model_dir, "Write fitted models here");
  }

  EvaluateOptions Options() const {
    EvaluateOptions o;
    o.czsl = o.gzsl = false;
    for (const auto &s : SplitList(settings)) {
      if (s == "czsl") o.czsl = true;
      else if (s == "gzsl") o.gzsl = true;
      else throw ConfigError("unknown setting '" + s + "' (expected czsl, gzsl)");
    }
    o.transductive = transductive;
    o.seed = seed;
    o.params = ModelParams{d_latent, k_g, width};
    o.cross_validate = cv;
    o.grid.folds = cv_folds;
    o.grid.latent_dims.clear();
    o.grid.num_neighbors.clear();
    o.grid.width_multiples.clear();
    try {
      for (const auto &v : SplitList(cv_d_latent)) o.grid.latent_dims.push_back(std::stoi(v));
      for (const auto &v : SplitList(cv_k_g)) o.grid.num_neighbors.push_back(std::stoi(v));
      for (const auto &v : SplitList(cv_width)) o.grid.width_multiples.push_back(std::stod(v));
    } catch (const std::exception &) {
      throw ConfigError("malformed CV grid list");
    }
    o.holdout_fraction = holdout;
    o.kmeans_restarts = kmeans_restarts;
    o.lsm.restarts = lsm_restarts;
    o.lsm.max_iter = lsm_max_iter;
    o.lsm.learning_rate = lsm_lr;
    o.threads = threads;
    if (!model_dir.empty()) {
      fs::create_directories(model_dir);
      o.model_dir = model_dir;
    }
    return o;
  }
};

void WriteOut(const fs::path &path, const std::string &text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  WriteFileAtomic(path, text);
}

int RunEncode(const EncodeFlags &f, const std::string &out_dir) {
  Dataset ds = LoadDataset(f.manifest);
  EncodeRequest req = f.Request(f.seed);
  EncodeOutcome res = EncodeDataset(ds, req);
  fs::create_directories(out_dir);
  ojson extra;
  extra["dataset"] = ds.name;
  extra["manifest"] = fs::absolute(f.manifest).lexically_normal().string();
  extra["request"] = ojson::parse(EncodeRequestJson(req));
  extra["details"] = ojson::parse(res.details_json);
  const fs::path sidecar = fs::path(out_dir) / "space.json";
  SaveSemanticSpace(res.space, sidecar, extra.dump());
  std::cout << sidecar.string() << "\n";
  return 0;
}

int RunEvaluate(const std::string &space_path, const std::string &manifest,
                const EvalFlags &f, const std::string &out_dir) {
  Dataset ds = LoadDataset(manifest);
  SemanticSpace space = LoadSemanticSpace(space_path);
  auto splits = LoadSplits(f.splits);
  EvalReport report = Evaluate(ds, space, splits, f.Options());
  const std::string json = ReportJson(report);
  const fs::path out = out_dir.empty() ? fs::path(space_path).parent_path() : fs::path(out_dir);
  WriteOut(out / "report.json", json);
  WriteOut(out / "report.csv", ReportCsv(report));
  std::cout << ReportTable(json);
  return 0;
}

int RunSweep(const EncodeFlags &ef, const EvalFlags &f, const std::string &axis,
             const std::string &values, const std::string &out_dir) {
  SweepAxis ax;
  if (axis == "k") ax = SweepAxis::kComponents;
  else if (axis == "images") ax = SweepAxis::kImagesPerClass;
  else throw ConfigError("unknown sweep axis '" + axis + "' (expected k|images)");
  std::vector<int> vals;
  try {
    for (const auto &v : SplitList(values)) vals.push_back(std::stoi(v));
  } catch (const std::exception &) {
    throw ConfigError("malformed --values list '" + values + "'");
  }
  EncodeFlags e = ef;
  if (e.method.empty()) e.method = ax == SweepAxis::kComponents ? "ffv" : "afv";
  Dataset ds = LoadDataset(e.manifest);
  auto splits = LoadSplits(f.splits);
  EvaluateOptions opts = f.Options();
  auto points = Sweep(ds, splits, e.Request(f.seed), ax, vals, opts);
  ojson j;
  j["dataset"] = ds.name;
  j["axis"] = axis;
  j["values"] = vals;
  j["encode"] = ojson::parse(EncodeRequestJson(e.Request(f.seed)));
  j["points"] = ojson::array();
  for (const auto &p : points) {
    ojson jp;
    jp["axis_value"] = p.value;
    jp["full_bag_classes"] = p.full_bag_classes;
    jp["report"] = ojson::parse(ReportJson(p.report));
    j["points"].push_back(jp);
  }
  const fs::path out(out_dir);
  WriteOut(out / "sweep.json", j.dump(2) + "\n");
  const std::string csv = SweepCsv(points);
  WriteOut(out / "sweep.csv", csv);
  std::cout << csv;
  return 0;
}

int RunSynth(const std::string &spec_path, uint64_t seed, const std::string &out_dir) {
  SynthSpec spec = spec_path.empty() ? SynthSpec{} : ParseSynthSpec(ReadFile(spec_path));
  std::cout << Synthesize(spec, seed, out_dir).string() << "\n";
  return 0;
}

int RunSplits(int classes, int n_seen, int n_splits, uint64_t seed, const std::string &out) {
  SaveSplits(GenerateClassSplits(classes, n_seen, n_splits, seed), classes, out);
  ojson echo;
  echo["num_classes"] = classes;
  echo["n_seen"] = n_seen;
  echo["n_splits"] = n_splits;
  echo["seed"] = seed;
  std::cout << echo.dump() << "\n";
  return 0;
}

int RunReport(const std::string &input, const std::string &format) {
  const std::string text = ReadFile(input);
  if (format == "table") {
    std::cout << ReportTable(text);
  } else if (format == "csv") {
    ojson j = ojson::parse(text);
    std::cout << "method,setting,metric,mean,stderr\n";
    for (const char *setting : {"inductive", "transductive"}) {
      if (!j.contains(setting)) continue;
      for (const auto &[m, v] : j[setting]["mean"].items())
        std::cout << j.value("method", "") << "," << setting << "," << m << ","
                  << v.get<double>() << "," << j[setting]["stderr"][m].get<double>() << "\n";
    }
  } else {
    throw ConfigError("unknown report format '" + format + "' (expected table|csv)");
  }
  return 0;
}

// Finds "--config FILE" / "--config=FILE" and removes it from `args`.
std::optional<std::string> TakeConfig(std::vector<std::string> *args) {
  for (size_t i = 0; i < args->size(); ++i) {
    const std::string &a = (*args)[i];
    if (a == "--config" && i + 1 < args->size()) {
      std::string v = (*args)[i + 1];
      args->erase(args->begin() + i, args->begin() + i + 2);
      return v;
    }
    if (a.rfind("--config=", 0) == 0) {
      std::string v = a.substr(9);
      args->erase(args->begin() + i);
      return v;
    }
  }
  return std::nullopt;
}

int Main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (auto cfg = TakeConfig(&args)) {
    // Config values go right after the subcommand name.
    std::vector<std::string> injected = ConfigArgs(*cfg);
    size_t at = args.empty() ? 0 : 1;
    args.insert(args.begin() + at, injected.begin(), injected.end());
  }

  CLI::App app{"zslkit: zero-shot action recognition with semantic representations"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_all_flag("--help-all");
  std::string config_note;
  app.add_option("--config", config_note, "JSON config; command-line flags override it");

  CLI::App *enc = app.add_subcommand("encode", "Encode per-class semantic representations");
  EncodeFlags enc_flags;
  std::string enc_out;
  enc_flags.Add(enc, false);
  enc->add_option("--out", enc_out, "Output directory")->required();

  CLI::App *ev = app.add_subcommand("evaluate", "Fit the latent embedding and score splits");
  EvalFlags ev_flags;
  std::string ev_space, ev_manifest, ev_out;
  ev->add_option("--space", ev_space, "Semantic space sidecar (space.json)")->required();
  ev->add_option("--manifest", ev_manifest, "Dataset manifest")->required();
  ev_flags.Add(ev);
  ev->add_option("--out", ev_out, "Output directory (default: the space's directory)");

  CLI::App *sw = app.add_subcommand("sweep", "Evaluate across K or images per class");
  EncodeFlags sw_enc;
  sw_enc.method.clear();
  EvalFlags sw_flags;
  std::string sw_axis, sw_values, sw_out;
  sw_enc.Add(sw, true);
  sw_flags.Add(sw);
  sw->add_option("--axis", sw_axis, "k|images")->required();
  sw->add_option("--values", sw_values, "Comma list of axis values")->required();
  sw->add_option("--out", sw_out, "Output directory")->required();

  CLI::App *sy = app.add_subcommand("synth", "Generate a synthetic dataset");
  std::string sy_spec, sy_out;
  uint64_t sy_seed = 0;
  sy->add_option("--spec", sy_spec, "Spec JSON (defaults when omitted)");
  sy->add_option("--seed", sy_seed, "Seed");
  sy->add_option("--out", sy_out, "Output directory")->required();

  CLI::App *sp = app.add_subcommand("splits", "Generate seen/unseen class splits");
  int sp_classes = 0, sp_seen = 0, sp_n = 5;
  uint64_t sp_seed = 0;
  std::string sp_out;
  sp->add_option("--classes", sp_classes, "Number of classes")->required();
  sp->add_option("--n-seen", sp_seen, "Seen classes per split")->required();
  sp->add_option("--n-splits", sp_n, "Number of splits");
  sp->add_option("--seed", sp_seed, "Seed");
  sp->add_option("--out", sp_out, "Output file")->required();

  CLI::App *rp = app.add_subcommand("report", "Print a report");
  std::string rp_in, rp_format = "table";
  rp->add_option("--input", rp_in, "report.json")->required();
  rp->add_option("--format", rp_format, "table|csv");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    return ReportError("config", 2, e.what());
  }

  if (enc->parsed()) return RunEncode(enc_flags, enc_out);
  if (ev->parsed()) return RunEvaluate(ev_space, ev_manifest, ev_flags, ev_out);
  if (sw->parsed()) return RunSweep(sw_enc, sw_flags, sw_axis, sw_values, sw_out);
  if (sy->parsed()) return RunSynth(sy_spec, sy_seed, sy_out);
  if (sp->parsed()) return RunSplits(sp_classes, sp_seen, sp_n, sp_seed, sp_out);
  if (rp->parsed()) return RunReport(rp_in, rp_format);
  return ReportError("config", 2, "no subcommand");
}

}  // namespace

int main(int argc, char **argv) {
  try {
    return Main(argc, argv);
  } catch (const zsl::Error &e) {
    return ReportError(zsl::ErrorKindName(e.kind()), ExitCode(e.kind()), e.what());
  } catch (const fs::filesystem_error &e) {
    return ReportError("data", 3, e.what());
  } catch (const nlohmann::json::exception &e) {
    return ReportError("data", 3, e.what());
  } catch (const std::exception &e) {
    return ReportError("internal", 1, e.what());
  }
}
