// tests/acceptance-test.cc

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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.h"
#include "zslkit/data-io.h"
#include "zslkit/diag-gmm.h"
#include "zslkit/embedding.h"
#include "zslkit/encoders.h"
#include "zslkit/zsl-eval.h"

using namespace zsl;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Criterion {
 public:
  void Expect(bool ok, const std::string &what) {
    if (!ok && out_.pass) {
      out_.pass = false;
      out_.detail = what;
    }
  }
  void Note(const std::string &s) {
    if (out_.pass) out_.detail = s;
  }
  const Outcome &outcome() const { return out_; }

 private:
  Outcome out_;
};

std::string Fmt(const char *f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

std::string Fmt(const char *f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a, b);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path Scratch(const std::string &name) {
  fs::path d = fs::temp_directory_path() / ("zslkit_acceptance_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// Runs the CLI with `args`; stdout and stderr go to `log`.
int RunCli(const std::string &env, const std::string &args, const fs::path &log) {
  std::string cmd = env + (env.empty() ? "" : " ") + "\"" + std::string(ZSLKIT_CLI) + "\" " +
                    args + " > \"" + log.string() + "\" 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void FisherOracle(Criterion *c) {
  auto t0 = std::chrono::steady_clock::now();
  PortableRng rng(101);
  double worst_direct = 0.0, worst_fd = 0.0;
  for (int t = 0; t < 100; ++t) {
    int k = 1 + static_cast<int>(rng.Below(3));
    int dim = 1 + static_cast<int>(rng.Below(5));
    DiagGmm g = oracle::RandomGmm(k, dim, &rng);
    Matrix bag = oracle::RandomBag(1 + static_cast<int>(rng.Below(20)), dim, &rng);
    Vector fv = FisherEncode(g, VectorBag{0, bag});
    worst_direct = std::max(worst_direct, oracle::MaxRelativeError(fv, oracle::NaiveFisher(g, bag)));
    worst_fd = std::max(worst_fd,
                        oracle::MaxRelativeError(fv, oracle::FiniteDifferenceFisher(g, bag)));
  }
  double secs = Seconds(t0);
  c->Expect(worst_direct < 1e-10, Fmt("direct evaluation rel err %.3g", worst_direct));
  c->Expect(worst_fd < 1e-4, Fmt("finite difference rel err %.3g", worst_fd));
  c->Expect(secs < 5.0, Fmt("runtime %.2f s", secs));
  c->Note(Fmt("max rel err direct %.2g, finite difference %.2g", worst_direct, worst_fd));
}

void HandValue(Criterion *c) {
  DiagGmm g;
  g.weights = Vector::Ones(1);
  g.means = Matrix::Zero(1, 1);
  g.variances = Matrix::Ones(1, 1);
  Matrix bag(2, 1);
  bag << 0.0, 1.0;
  Vector fv = FisherEncode(g, VectorBag{0, bag});
  c->Expect(fv.size() == 2, "length " + std::to_string(fv.size()));
  if (fv.size() != 2) return;
  double e0 = std::abs(fv(0) - 1.0), e1 = std::abs(fv(1) + 1.0 / std::sqrt(2.0));
  c->Expect(e0 < 1e-12 && e1 < 1e-12, Fmt("errors %.3g, %.3g", e0, e1));
  c->Note(Fmt("FV = (%.15g, %.15g)", fv(0), fv(1)));
}

void FisherDims(Criterion *c) {
  PortableRng rng(103);
  for (int dim : {2, 300, 1024})
    for (int k = 1; k <= 5; ++k) {
      DiagGmm g = oracle::RandomGmm(k, dim, &rng);
      Vector fv = FisherEncode(g, VectorBag{0, oracle::RandomBag(3, dim, &rng)});
      c->Expect(fv.size() == 2 * dim * k,
                "D=" + std::to_string(dim) + " K=" + std::to_string(k) + " gave " +
                    std::to_string(fv.size()));
    }
  c->Note("15 (D, K) pairs");
}

void EmMonotone(Criterion *c) {
  PortableRng rng(104);
  double worst_drop = 0.0, worst_sum = 0.0;
  for (int t = 0; t < 50; ++t) {
    int n = 20 + static_cast<int>(rng.Below(481));
    int dim = 1 + static_cast<int>(rng.Below(10));
    int k = 1 + static_cast<int>(rng.Below(5));
    Matrix pool = oracle::RandomBag(n, dim, &rng);
    // A few shifted groups so K > 1 has something to find.
    for (int i = 0; i < n; ++i) pool.row(i).array() += 3.0 * (i % k);
    GmmFit fit = FitDiagGmm(pool, k, {}, DeriveSeed(104, t));
    for (size_t i = 1; i < fit.log_likelihood.size(); ++i)
      worst_drop = std::max(worst_drop, fit.log_likelihood[i - 1] - fit.log_likelihood[i]);
    for (int i = 0; i < n; ++i)
      worst_sum = std::max(worst_sum, std::abs(GmmPosteriors(fit.gmm, pool.row(i).transpose()).sum() - 1.0));
  }
  c->Expect(worst_drop <= 1e-9, Fmt("log-likelihood drop %.3g", worst_drop));
  c->Expect(worst_sum <= 1e-12, Fmt("responsibility sum error %.3g", worst_sum));
  c->Note(Fmt("max drop %.2g, max |sum - 1| %.2g", std::max(worst_drop, 0.0), worst_sum));
}

void AssignmentExact(Criterion *c) {
  auto t0 = std::chrono::steady_clock::now();
  PortableRng rng(105);
  int exact = 0;
  for (int t = 0; t < 200; ++t) {
    int k = 1 + static_cast<int>(rng.Below(7));
    Matrix cost(k, k);
    for (Eigen::Index i = 0; i < cost.size(); ++i) cost.data()[i] = 10.0 * rng.Uniform01();
    if (OptimalAssignment(cost).cost == oracle::BruteForceAssignmentCost(cost)) ++exact;
  }
  double secs = Seconds(t0);
  c->Expect(exact == 200, std::to_string(exact) + "/200 exact");
  c->Expect(secs < 2.0, Fmt("runtime %.2f s", secs));
  c->Note("200/200 exact, " + Fmt("%.2f s", secs));
}

void KmeansToy(Criterion *c) {
  PortableRng rng(106);
  int optimal = 0;
  for (int t = 0; t < 50; ++t) {
    int n = 2 + static_cast<int>(rng.Below(7));
    Matrix pts = oracle::RandomBag(n, 1, &rng);
    double got = Kmeans(pts, 2, DeriveSeed(106, t), 300, 5).inertia;
    double best = oracle::ExhaustiveTwoClusterWcss(pts);
    if (std::abs(got - best) <= 1e-12 * (1.0 + best)) ++optimal;
  }
  c->Expect(optimal >= 45, std::to_string(optimal) + "/50 optimal");
  c->Note(std::to_string(optimal) + "/50 optimal");
}

void LsmChecks(Criterion *c) {
  ClassEmbeddings lm{{0, 1}, (Matrix(2, 2) << 0, 0, 2, 0).finished()};
  Matrix sem(3, 3);
  sem << 0, 2, 1, 2, 0, 1, 1, 1, 0;
  LsmConfig cfg;
  cfg.seed = 1;
  LsmResult r = LsmEmbed(lm, sem, {0, 1, 2}, {2}, cfg);
  RowVector y = r.unseen.points.row(0);
  double off = std::hypot(y(0) - 1.0, y(1));
  c->Expect(r.trace.final_stress < 1e-6, Fmt("two-landmark stress %.3g", r.trace.final_stress));
  c->Expect(off < 1e-3, Fmt("two-landmark point off by %.3g", off));

  PortableRng rng(107);
  int rises = 0;
  for (int t = 0; t < 100; ++t) {
    int ns = 2 + static_cast<int>(rng.Below(6));
    int nu = 1 + static_cast<int>(rng.Below(4));
    int total = ns + nu;
    SemanticSpace s;
    for (int i = 0; i < total; ++i) s.class_ids.push_back(i);
    s.reps = oracle::RandomBag(total, 1 + static_cast<int>(rng.Below(6)), &rng);
    std::vector<ClassId> seen, unseen;
    for (int i = 0; i < total; ++i) (i < ns ? seen : unseen).push_back(i);
    LsmConfig rc;
    rc.seed = DeriveSeed(107, t);
    ClassEmbeddings land{seen, oracle::RandomBag(ns, 2 + static_cast<int>(rng.Below(3)), &rng)};
    LsmResult res = LsmEmbed(land, SemanticDistanceMatrix(s), s.class_ids, unseen, rc);
    for (size_t i = 1; i < res.trace.values.size(); ++i)
      if (res.trace.values[i] > res.trace.values[i - 1]) ++rises;
  }
  c->Expect(rises == 0, std::to_string(rises) + " accepted steps raised the stress");
  c->Note(Fmt("stress %.2g, offset %.2g; 100 traces non-increasing", r.trace.final_stress, off));
}

void SlppChecks(Criterion *c) {
  PortableRng rng(108);
  double worst = 0.0;
  int separated = 0;
  for (int t = 0; t < 20; ++t) {
    int classes = 2 + static_cast<int>(rng.Below(4));
    int per = 10 + static_cast<int>(rng.Below(15));
    int dim = 4 + static_cast<int>(rng.Below(8));
    Matrix centres = oracle::RandomBag(classes, dim, &rng, 4.0);
    Matrix x(classes * per, dim);
    std::vector<ClassId> labels;
    for (int k = 0; k < classes; ++k)
      for (int i = 0; i < per; ++i) {
        x.row(k * per + i) = centres.row(k) + oracle::RandomBag(1, dim, &rng, 1.0);
        labels.push_back(k);
      }
    SlppConfig cfg;
    cfg.num_neighbors = 5;
    cfg.latent_dim = std::min(dim - 1, 3);
    SlppResult r = SlppFit(x, labels, cfg);

    // Rebuild both operators from the graph.
    Matrix w(KnnAffinity(x, labels, cfg.num_neighbors, r.width).weights);
    Vector deg = w.rowwise().sum();
    Matrix a = x.transpose() * (Matrix(deg.asDiagonal()) - w) * x;
    Matrix b = x.transpose() * deg.asDiagonal() * x;
    b.diagonal().array() += r.regularization;
    for (Eigen::Index col = 0; col < r.projection.cols(); ++col) {
      Vector p = r.projection.col(col);
      worst = std::max(worst, (a * p - r.eigenvalues(col) * b * p).norm() / p.norm());
    }

    Matrix y = Project(r.projection, x);
    double within = 0.0, between = 0.0;
    long nw = 0, nb = 0;
    for (Eigen::Index i = 0; i < y.rows(); ++i)
      for (Eigen::Index j = i + 1; j < y.rows(); ++j) {
        double d = (y.row(i) - y.row(j)).norm();
        if (labels[i] == labels[j]) within += d, ++nw;
        else between += d, ++nb;
      }
    if (within / nw < between / nb) ++separated;
  }
  c->Expect(worst < 1e-8, Fmt("eigen residual %.3g", worst));
  c->Expect(separated == 20, std::to_string(separated) + "/20 separated");
  c->Note(Fmt("max residual %.2g; 20/20 separated", worst));
}

// Shared with the metric bookkeeping check.
json g_synth_report;

void SyntheticZsl(Criterion *c) {
  auto t0 = std::chrono::steady_clock::now();
  fs::path dir = Scratch("synth");
  {
    std::ofstream spec(dir / "spec.json");
    spec << R"({"num_classes": 12, "n_seen": 6, "examples_per_class": 40,)"
         << R"( "visual_dim": 20, "noise": 0.05, "n_splits": 5})";
  }
  const std::string d = "\"" + dir.string() + "\"";
  int rc = RunCli("", "synth --spec " + d + "/spec.json --seed 1 --out " + d + "/ds",
                  dir / "synth.log");
  c->Expect(rc == 0, "synth exit " + std::to_string(rc));
  if (rc != 0) return;
  rc = RunCli("", "encode --manifest " + d + "/ds/manifest.json --method afv --out " + d + "/sp",
              dir / "encode.log");
  c->Expect(rc == 0, "encode exit " + std::to_string(rc));
  if (rc != 0) return;
  rc = RunCli("", "evaluate --space " + d + "/sp/space.json --manifest " + d +
                      "/ds/manifest.json --splits " + d +
                      "/ds/splits.json --settings czsl,gzsl --transductive --d-latent 4 --seed 1",
              dir / "evaluate.log");
  c->Expect(rc == 0, "evaluate exit " + std::to_string(rc));
  if (rc != 0) return;
  double secs = Seconds(t0);
  g_synth_report = json::parse(ReadFile(dir / "sp" / "report.json"));
  double ind = g_synth_report["inductive"]["mean"]["A_U->U"].get<double>();
  double tr = g_synth_report["transductive"]["mean"]["A_U->U"].get<double>();
  c->Expect(ind >= 0.80, Fmt("inductive cZSL %.4f < 0.80", ind));
  c->Expect(tr >= ind - 0.02, Fmt("transductive %.4f < inductive %.4f - 0.02", tr, ind));
  c->Expect(secs < 60.0, Fmt("runtime %.1f s", secs));
  c->Note(Fmt("cZSL inductive %.4f, transductive %.4f", ind, tr) + Fmt(", %.1f s", secs));
}

void MetricBookkeeping(Criterion *c) {
  for (double x : {0.0, 0.1, 0.3, 1.0 / 3.0, 0.7, 0.99, 1.0})
    c->Expect(HarmonicMean(x, x) == x, Fmt("H(x, x) != x at %.17g", x));
  c->Expect(HarmonicMean(0.0, 0.7) == 0.0 && HarmonicMean(0.7, 0.0) == 0.0, "H(0, a) != 0");
  c->Expect(HarmonicMean(0.2, 0.8) == 0.32, Fmt("H(0.2, 0.8) = %.17g", HarmonicMean(0.2, 0.8)));
  double h = 100.0 * HarmonicMean(0.1655, 0.8238);
  c->Expect(std::round(h * 100.0) / 100.0 == 27.56, Fmt("H(16.55, 82.38) = %.4f", h));
  c->Expect(std::abs(h - 27.49) > 0.005, "H(16.55, 82.38) matches 27.49");

  // Report-level recomputation: H is averaged over splits, which differs
  // from H of the averaged accuracies.
  if (g_synth_report.is_null()) {
    c->Expect(false, "no synthetic report to recompute");
    return;
  }
  const json &ind = g_synth_report["inductive"];
  double sum_h = 0.0, sum_u = 0.0, sum_s = 0.0;
  int n = 0;
  for (const json &s : ind["splits"]) {
    const json &m = s;
    double au = m["A_U->T"].get<double>(), as = m["A_S->T"].get<double>();
    c->Expect(std::abs(m["H"].get<double>() - HarmonicMean(au, as)) < 1e-12,
              "split H is not the harmonic mean of its accuracies");
    sum_h += m["H"].get<double>();
    sum_u += au;
    sum_s += as;
    ++n;
  }
  c->Expect(n == 5, "expected 5 splits, got " + std::to_string(n));
  if (n == 0) return;
  double mean_h = ind["mean"]["H"].get<double>();
  c->Expect(std::abs(mean_h - sum_h / n) < 1e-12, "report H is not the per-split average");
  double pooled = HarmonicMean(sum_u / n, sum_s / n);
  c->Note(Fmt("H(16.55, 82.38) = %.2f; report H %.4f", h, mean_h) +
          Fmt(" vs H(means) %.4f", pooled));
}

void ProtocolCounts(Criterion *c) {
  for (auto [classes, seen] : {std::pair{101, 51}, std::pair{51, 26}})
    for (const ClassSplit &s : GenerateClassSplits(classes, seen, 5, 7)) {
      c->Expect(static_cast<int>(s.seen.size()) == seen &&
                    static_cast<int>(s.unseen.size()) == classes - seen,
                "split sizes " + std::to_string(s.seen.size()) + "/" +
                    std::to_string(s.unseen.size()));
    }
  std::vector<ClassId> labels(30);
  for (int i = 0; i < 30; ++i) labels[i] = i / 10;
  GzslPartition p = GzslHoldout(labels, ClassSplit{{0, 1}, {2}, 0, 0}, 0.2, 5);
  for (ClassId cls : {0, 1}) {
    long held = std::count_if(p.seen_test.begin(), p.seen_test.end(),
                              [&](int i) { return labels[i] == cls; });
    c->Expect(held == 2, "held out " + std::to_string(held) + " of 10");
  }
  c->Note("51/50, 26/25, 2 of 10 held out");
}

std::map<std::string, std::string> Snapshot(const fs::path &root) {
  std::map<std::string, std::string> files;
  for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator();
       ++it) {
    if (!it->is_regular_file()) continue;
    std::string ext = it->path().extension().string();
    if (ext == ".json" || ext == ".csv" || ext == ".zmat" || ext == ".txt")
      files[fs::relative(it->path(), root).string()] = ReadFile(it->path());
  }
  return files;
}

void Determinism(Criterion *c) {
  std::vector<std::map<std::string, std::string>> runs;
  const char *envs[] = {"ZSLKIT_THREADS=1", "ZSLKIT_THREADS=1", "ZSLKIT_THREADS=4"};
  const char *threads[] = {"1", "1", "3"};
  for (int r = 0; r < 3; ++r) {
    fs::path dir = Scratch("det");
    const std::string d = "\"" + dir.string() + "\"";
    std::ofstream(dir / "spec.json") << R"({"num_classes": 8, "n_seen": 4, "n_splits": 3})";
    const std::string eval = " --splits " + d + "/ds/splits.json --settings czsl,gzsl"
                             " --transductive --d-latent 3 --k-g 5 --seed 9 --threads " +
                             std::string(threads[r]);
    std::vector<std::string> steps = {
        "synth --spec " + d + "/spec.json --seed 4 --out " + d + "/ds",
        "splits --classes 8 --n-seen 4 --n-splits 3 --seed 2 --out " + d + "/splits.json",
        "encode --manifest " + d + "/ds/manifest.json --method ffv --k 2 --seed 3 --out " + d +
            "/ffv",
        "encode --manifest " + d + "/ds/manifest.json --method td --out " + d + "/td",
        "evaluate --space " + d + "/ffv/space.json --manifest " + d + "/ds/manifest.json" + eval,
        "evaluate --space " + d + "/td/space.json --manifest " + d + "/ds/manifest.json" + eval,
        "sweep --axis k --values 1,2 --method ffv --manifest " + d + "/ds/manifest.json --out " +
            d + "/sweep_k" + eval,
        "sweep --axis images --values 3,100 --method afv --manifest " + d +
            "/ds/manifest.json --out " + d + "/sweep_img" + eval,
        "report --input " + d + "/ffv/report.json --format csv",
    };
    for (size_t i = 0; i < steps.size(); ++i) {
      fs::path log = dir / ("step" + std::to_string(i) + ".txt");
      int rc = RunCli(envs[r], steps[i], log);
      c->Expect(rc == 0, "exit " + std::to_string(rc) + " from: " + steps[i]);
      if (rc != 0) return;
    }
    runs.push_back(Snapshot(dir));
    // Paths printed by the CLI differ only if the scratch dir did; it does not.
  }
  for (int r = 1; r < 3; ++r) {
    c->Expect(runs[r].size() == runs[0].size(), "different file sets");
    for (const auto &[name, bytes] : runs[0]) {
      auto it = runs[r].find(name);
      c->Expect(it != runs[r].end() && it->second == bytes,
                name + " differs in run " + std::to_string(r + 1));
    }
  }
  c->Note(std::to_string(runs[0].size()) + " files byte-identical over 3 runs");
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char *name;
    std::function<void(Criterion *)> run;
  };
  const std::vector<Entry> entries = {
      {1, "fisher vector oracle equivalence", FisherOracle},
      {2, "fisher vector hand value", HandValue},
      {3, "fisher vector dimensionality", FisherDims},
      {4, "EM monotonicity", EmMonotone},
      {5, "assignment exactness", AssignmentExact},
      {6, "kmeans toy optimality", KmeansToy},
      {7, "LSM feasible instance and stress trace", LsmChecks},
      {8, "SLPP residuals and separation", SlppChecks},
      {9, "end-to-end synthetic ZSL", SyntheticZsl},
      {10, "metric bookkeeping", MetricBookkeeping},
      {11, "protocol counts", ProtocolCounts},
      {12, "determinism", Determinism},
  };
  int failed = 0;
  for (const Entry &e : entries) {
    Criterion c;
    auto t0 = std::chrono::steady_clock::now();
    try {
      e.run(&c);
    } catch (const std::exception &ex) {
      c.Expect(false, std::string("exception: ") + ex.what());
    }
    const Outcome &o = c.outcome();
    if (!o.pass) ++failed;
    std::printf("%s %2d %-40s %7.2f s  %s\n", o.pass ? "PASS" : "FAIL", e.id, e.name,
                Seconds(t0), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(entries.size()) - failed,
              entries.size());
  return failed == 0 ? 0 : 1;
}
