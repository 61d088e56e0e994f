// Acceptance runner: one PASS/FAIL line per criterion. With no argument every
// criterion runs; otherwise only the named ones. Exit status is nonzero if
// any selected criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "cgmi/embeddings/sgns.hpp"
#include "cgmi/estimators/causal.hpp"
#include "cgmi/estimators/information.hpp"
#include "cgmi/model/classifier.hpp"
#include "cgmi/pipeline/commands.hpp"
#include "cgmi/permtest/report.hpp"
#include "support.hpp"

namespace {

using namespace cgmi;
using nlohmann::json;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, x);
  return buf;
}

double entropy2(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log2(x);
  return h;
}

/// Kolmogorov–Smirnov distance of a sample from Uniform(0, 1).
double ks_uniform(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - x[i], x[i] - static_cast<double>(i) / n});
  }
  return d;
}

// ---------------------------------------------------------------------------

Outcome js_entropy_identity() {
  Stopwatch sw;
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t G = 2 + rng() % 2;
    const auto vocab = testkit::random_vocab(rng, 2 + rng() % 9, 1 + rng() % 4);
    const auto params = testkit::random_params(rng, 1 + rng() % 6, vocab.dim(), 3, G);
    const model::Classifier clf(params, vocab);
    const auto data = testkit::random_dataset(rng, 1 + rng() % 12, 3, G, vocab.size());
    const auto nouns = estimate::noun_points(data);
    const auto pi = testkit::random_simplex(rng, G);
    const double js = estimate::mi_do(clf, nouns, pi);
    // entropy-difference form, summed directly from the classifier outputs
    std::vector<double> m(vocab.size(), 0.0);
    double h_cond = 0.0;
    for (std::size_t g = 0; g < G; ++g) {
      std::vector<double> pg(vocab.size(), 0.0);
      for (const auto& e : data.entries) {
        const auto p = clf.predict(e.noun.meaning, g);
        for (std::size_t a = 0; a < p.size(); ++a) pg[a] += p[a] / static_cast<double>(data.size());
      }
      for (std::size_t a = 0; a < pg.size(); ++a) m[a] += pi[g] * pg[a];
      h_cond += pi[g] * entropy2(pg);
    }
    worst = std::max(worst, std::abs(js - (entropy2(m) - h_cond)));
  }
  const double t = sw.seconds();
  return {worst < 1e-10 && t < 10.0, "max |JS - (H_do(A) - H_do(A|G))| = " + fmt("%.3g", worst) + ", " + fmt("%.2f", t) + " s"};
}

treebank::PairCorpus table_corpus(const std::vector<std::vector<std::uint64_t>>& counts) {
  treebank::PairCorpus pc;
  for (std::size_t g = 0; g < counts[0].size(); ++g) pc.noun_gender["n" + std::to_string(g)] = "G" + std::to_string(g);
  for (std::size_t a = 0; a < counts.size(); ++a)
    for (std::size_t g = 0; g < counts[a].size(); ++g)
      if (counts[a][g] > 0) pc.add("n" + std::to_string(g), "a" + std::to_string(a), counts[a][g]);
  return pc;
}

Outcome plugin_mi() {
  Stopwatch sw;
  Rng rng(102);
  std::uniform_int_distribution<std::uint64_t> count(0, 50);
  double worst = 0.0, worst_product = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<std::uint64_t>> c(10, std::vector<std::uint64_t>(3));
    for (auto& row : c)
      for (auto& x : row) x = count(rng);
    for (std::size_t g = 0; g < 3; ++g) c[0][g] += 1;
    double total = 0.0;
    for (const auto& row : c)
      for (auto x : row) total += static_cast<double>(x);
    double want = 0.0;
    for (std::size_t a = 0; a < 10; ++a) {
      for (std::size_t g = 0; g < 3; ++g) {
        if (c[a][g] == 0) continue;
        double ra = 0.0, cg = 0.0;
        for (std::size_t h = 0; h < 3; ++h) ra += static_cast<double>(c[a][h]);
        for (std::size_t b = 0; b < 10; ++b) cg += static_cast<double>(c[b][g]);
        const double p = static_cast<double>(c[a][g]) / total;
        want += p * std::log2(p * total * total / (ra * cg));
      }
    }
    worst = std::max(worst, std::abs(estimate::plugin_mi(table_corpus(c)) - want));

    // outer product of two count vectors
    std::vector<std::vector<std::uint64_t>> prod(10, std::vector<std::uint64_t>(3));
    std::vector<std::uint64_t> u(10), v(3);
    for (auto& x : u) x = 1 + rng() % 20;
    for (auto& x : v) x = 1 + rng() % 20;
    for (std::size_t a = 0; a < 10; ++a)
      for (std::size_t g = 0; g < 3; ++g) prod[a][g] = u[a] * v[g];
    worst_product = std::max(worst_product, estimate::plugin_mi(table_corpus(prod)));
  }
  const double t = sw.seconds();
  return {worst < 1e-12 && worst_product < 1e-12 && t < 5.0,
          "max |MI - naive| = " + fmt("%.3g", worst) + ", max product-table MI = " + fmt("%.3g", worst_product) + ", " +
              fmt("%.2f", t) + " s"};
}

embed::VectorTable read_table(const std::string& path) {
  std::ifstream in(path);
  return embed::read_vectors(in);
}

Outcome case1_independent_gender() {
  testkit::TempDir dir("acc-case1");
  pipeline::RunConfig c;
  c.world.world_case = synth::WorldCase::kIndependentGender;
  c.seed = 7;
  c.out = dir / "world";
  const json truth = pipeline::cmd_synth(c);
  const auto ck = pipeline::load_checkpoint(dir / "world/teacher.json");
  const auto nouns_table = read_table(dir / "world/noun_vectors.txt");
  const auto adjs = read_table(dir / "world/adjective_vectors.txt");
  const auto vocab = model::vocab_from_lemmas(ck.vocab, adjs);
  const model::Classifier oracle(ck.params, vocab);
  // Ñ enumerates every (gender, noun) pair with weight p(n) p(g)
  const auto p_gender = truth["population"]["p_gender"].get<std::vector<double>>();
  std::vector<estimate::NounPoint> pairs;
  for (std::size_t n = 0; n < nouns_table.size(); ++n) {
    for (std::size_t g = 0; g < p_gender.size(); ++g) pairs.push_back({nouns_table.row(n), g, p_gender[g]});
  }
  const double mi = estimate::model_mi(oracle, pairs);
  const double mido = estimate::mi_do(oracle, pairs, p_gender);
  const double diff = std::abs(mi - mido);
  const double truth_gap = std::abs(mido - truth["population"]["mi_do"].get<double>());
  return {diff < 1e-8 && truth_gap < 1e-8, "|model_mi - mi_do| = " + fmt("%.3g", diff) + " (mi_do " + fmt("%.4f", mido) +
                                               ", brute force " + fmt("%.4f", truth["population"]["mi_do"].get<double>()) + ")"};
}

Outcome case2_ablated_gender() {
  Rng rng(104);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t G = 2 + rng() % 2;
    const auto vocab = testkit::random_vocab(rng, 1 + rng() % 15, 1 + rng() % 5);
    auto params = testkit::random_params(rng, 1 + rng() % 8, vocab.dim(), 1 + rng() % 4, G,
                                         trial % 2 ? model::Activation::kRelu : model::Activation::kTanh);
    for (double& w : params.weights) w *= 1.0 + static_cast<double>(rng() % 10);
    const auto ablated = model::ablate_gender(params);
    const model::Classifier clf(ablated, vocab);
    const auto data = testkit::random_dataset(rng, 1 + rng() % 20, params.noun_dim, G, vocab.size());
    const auto weighting = trial % 3 ? model::NounWeighting::kType : model::NounWeighting::kToken;
    worst = std::max(worst, estimate::mi_do(clf, estimate::noun_points(data, weighting), testkit::random_simplex(rng, G, true)));
  }
  return {worst < 1e-12, "max mi_do over 200 fuzzed instances = " + fmt("%.3g", worst)};
}

Outcome gradient() {
  Stopwatch sw;
  Rng rng(105);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto act = trial % 2 ? model::Activation::kRelu : model::Activation::kTanh;
    const auto vocab = testkit::random_vocab(rng, 2 + rng() % 4, 1 + rng() % 4);
    const std::size_t D = 1 + rng() % 4;
    const auto data = testkit::random_dataset(rng, 1 + rng() % 5, D, 2 + rng() % 2, vocab.size());
    auto p = testkit::random_params(rng, 1 + rng() % 4, vocab.dim(), D, data.genders.size(), act);
    const model::Regularization reg{0.001, 0.001};
    std::vector<double> grad;
    model::regularized_objective(p, vocab, data, reg, &grad);
    const double h = 1e-6;
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double keep = p.weights[i];
      p.weights[i] = keep + h;
      const double up = model::regularized_objective(p, vocab, data, reg);
      p.weights[i] = keep - h;
      const double down = model::regularized_objective(p, vocab, data, reg);
      p.weights[i] = keep;
      const double fd = (up - down) / (2.0 * h);
      diff += (fd - grad[i]) * (fd - grad[i]);
      norm += fd * fd;
    }
    worst = std::max(worst, std::sqrt(diff / std::max(norm, 1e-300)));
  }
  const double t = sw.seconds();
  return {worst < 1e-4 && t < 30.0, "max relative error = " + fmt("%.3g", worst) + ", " + fmt("%.2f", t) + " s"};
}

pipeline::RunConfig synth_and_extract(const testkit::TempDir& dir, const std::string& tag, synth::WorldCase wc,
                                      std::uint64_t seed) {
  pipeline::RunConfig c;
  c.language = "es";
  c.seed = seed;
  c.world.world_case = wc;
  c.out = dir / tag;
  pipeline::cmd_synth(c);
  c.treebank = dir / (tag + "/treebank.conllu");
  c.lexicon = dir / (tag + "/lexicon.txt");
  pipeline::cmd_extract(c);
  c.pairs = dir / (tag + "/pairs.tsv");
  c.vectors = dir / (tag + "/noun_vectors.txt");
  c.adjective_vectors = dir / (tag + "/adjective_vectors.txt");
  return c;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

Outcome end_to_end() {
  Stopwatch sw;
  testkit::TempDir dir("acc-e2e");
  std::ostringstream detail;
  bool recovered = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const std::string tag = "w" + std::to_string(seed);
    auto c = synth_and_extract(dir, tag, synth::WorldCase::kFull, seed);
    const double truth = read_json(dir / (tag + "/truth.json"))["realized"]["mi_do"].get<double>();
    c.train.hidden = 16;
    c.train.batch_size = 4;
    c.train.patience = 20;
    c.train.max_epochs = 300;
    c.out = dir / (tag + "/fit");
    const double est = pipeline::cmd_estimate(c)["mi_do"].get<double>();
    const double rel = (est - truth) / truth;
    recovered &= truth >= 0.1 && truth <= 0.5 && std::abs(rel) <= 0.2;
    detail << (seed == 1 ? "" : " ") << fmt("%+.3f", rel);
  }
  int kept = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::string tag = "null" + std::to_string(seed);
    auto c = synth_and_extract(dir, tag, synth::WorldCase::kNoGenderEffect, seed);
    c.train.hidden = 8;
    c.perm.permutations = 200;
    c.perm.folds = 5;
    c.out = dir / (tag + "/pt");
    kept += pipeline::cmd_permtest(c)["p_value"].get<double>() >= 0.05 ? 1 : 0;
  }
  const double t = sw.seconds();
  return {recovered && kept >= 18 && t < 900.0, "relative MI_do errors [" + detail.str() + "], null not rejected in " +
                                                     std::to_string(kept) + "/20, " + fmt("%.0f", t) + " s"};
}

Outcome permutation_calibration() {
  Stopwatch sw;
  testkit::TempDir dir("acc-calib");
  std::vector<double> pooled, per_fold;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const std::string tag = "null" + std::to_string(seed);
    auto c = synth_and_extract(dir, tag, synth::WorldCase::kNoGenderEffect, seed);
    c.train.hidden = 8;
    c.perm.permutations = 200;
    c.perm.folds = 2;
    c.out = dir / (tag + "/pt");
    const json r = pipeline::cmd_permtest(c);
    pooled.push_back(r["p_value"].get<double>());
    const auto obs = r["observed_mi_do"].get<std::vector<double>>();
    const auto perm = r["permuted_mi_do"].get<std::vector<double>>();
    for (std::size_t f = 0; f < obs.size(); ++f) {
      double b = 0.0;
      for (std::size_t j = 0; j < 200; ++j) b += perm[f * 200 + j] > obs[f] ? 1.0 : 0.0;
      per_fold.push_back(b / 200.0);
    }
    std::filesystem::remove_all(dir / tag);
  }
  const double d = ks_uniform(pooled);
  const double critical = 1.36 / std::sqrt(50.0);
  const double d_fold = ks_uniform(per_fold);
  return {d < critical, "KS D = " + fmt("%.3f", d) + " vs critical " + fmt("%.3f", critical) +
                            " (per-fold p-values: D = " + fmt("%.3f", d_fold) + " vs " +
                            fmt("%.3f", 1.36 / std::sqrt(static_cast<double>(per_fold.size()))) + "), " +
                            fmt("%.0f", sw.seconds()) + " s"};
}

Outcome sgns_topics() {
  Stopwatch sw;
  Rng rng(108);
  std::vector<std::vector<std::string>> stream;
  for (int s = 0; s < 3000; ++s) {
    const char topic = s % 2 ? 'x' : 'y';
    std::vector<std::string> sent;
    for (int i = 0; i < 10; ++i) sent.push_back(std::string(1, topic) + std::to_string(rng() % 10));
    stream.push_back(std::move(sent));
  }
  embed::SgnsConfig cfg;
  cfg.dim = 20;
  cfg.window = 5;
  cfg.min_count = 1;
  cfg.negatives = 5;
  cfg.epochs = 3;
  cfg.seed = 42;
  const auto vt = embed::train_sgns(stream, cfg);
  double intra = 0.0, inter = 0.0;
  int n_intra = 0, n_inter = 0;
  for (std::size_t i = 0; i < vt.size(); ++i) {
    for (std::size_t j = i + 1; j < vt.size(); ++j) {
      const double c = embed::cosine(vt.row(i), vt.row(j));
      if (vt.token(i)[0] == vt.token(j)[0]) {
        intra += c;
        ++n_intra;
      } else {
        inter += c;
        ++n_inter;
      }
    }
  }
  intra /= n_intra;
  inter /= n_inter;
  std::ostringstream a, b;
  embed::write_vectors(a, vt);
  embed::write_vectors(b, embed::train_sgns(stream, cfg));
  const bool identical = a.str() == b.str();
  const double t = sw.seconds();
  return {intra - inter >= 0.2 && identical && t < 120.0,
          "intra " + fmt("%.3f", intra) + " vs inter " + fmt("%.3f", inter) + ", rerun " +
              (identical ? "bit-identical" : "DIFFERENT") + ", " + fmt("%.1f", t) + " s"};
}

Outcome estimate_determinism() {
  testkit::TempDir dir("acc-det");
  auto c = synth_and_extract(dir, "w", synth::WorldCase::kFull, 3);
  c.out = dir / "a";
  pipeline::cmd_estimate(c);
  c.out = dir / "b";
  pipeline::cmd_estimate(c);
  const std::string a = testkit::read_text(dir / "a/estimates.json");
  const std::string b = testkit::read_text(dir / "b/estimates.json");
  return {!a.empty() && a == b, a == b ? std::to_string(a.size()) + " bytes, identical" : "outputs differ"};
}

Outcome report_fixture() {
  permtest::ReportRow row;
  row.language = "German";
  row.representation = "word2vec";
  row.model_mi = 0.526;
  row.mi_do = 1.24e-4;
  row.mean_difference = 3.12e-4;
  row.p_value = 0.001;
  row.significant = true;
  const std::string table = permtest::summarize({row});
  const std::string want =
      "          word2vec                                  \n"
      "Language         MI(A;G)    MI_do(A;G)  MeanDiffPerm\n"
      "German             0.526       1.24e-4      3.12e-4*\n";
  return {table == want, table == want ? "German row rendered as 0.526 | 1.24e-4 | 3.12e-4*" : "got:\n" + table};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"js_entropy_identity", js_entropy_identity},
      {"plugin_mi", plugin_mi},
      {"case1_independent_gender", case1_independent_gender},
      {"case2_ablated_gender", case2_ablated_gender},
      {"gradient", gradient},
      {"end_to_end", end_to_end},
      {"permutation_calibration", permutation_calibration},
      {"sgns_topics", sgns_topics},
      {"estimate_determinism", estimate_determinism},
      {"report_fixture", report_fixture},
  };
  std::vector<std::string> selected(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), name) == selected.end()) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s (%s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
