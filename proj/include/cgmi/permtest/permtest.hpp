#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "cgmi/core/error.hpp"
#include "cgmi/core/numeric.hpp"
#include "cgmi/core/parallel.hpp"
#include "cgmi/core/random.hpp"
#include "cgmi/estimators/causal.hpp"
#include "cgmi/model/dataset_ops.hpp"
#include "cgmi/model/trainer.hpp"

namespace cgmi::permtest {

struct PermTestConfig {
  std::size_t permutations = 200;  ///< k
  std::size_t folds = 5;
  std::size_t subset = 100;  ///< adjectives kept, by frequency
  double alpha = 0.05;
  std::uint64_t seed = 1;
  /// (b + 1) / (k·folds + 1) instead of the raw proportion b / (k·folds).
  bool smoothed = false;
  std::size_t threads = 1;
  model::NounWeighting noun_weighting = model::NounWeighting::kType;
  model::NounWeighting gender_weighting = model::NounWeighting::kToken;

  void validate() const {
    if (permutations < 1) throw ConfigError("permutation count k must be >= 1");
    if (folds < 2) throw ConfigError("permutation test needs >= 2 folds");
    if (subset < 1) throw ConfigError("adjective subset must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  }
};

struct PermTestResult {
  PermTestConfig config;
  std::vector<double> observed_mi_do;     ///< per fold
  std::vector<double> observed_model_mi;  ///< per fold
  std::vector<double> permuted_mi_do;     ///< fold-major: fold f, draw j at f·k + j
  std::uint64_t exceed_count = 0;         ///< permuted draws strictly above their fold's observed value
  double p_value = 1.0;
  double mean_difference = 0.0;  ///< mean over draws of (observed of its fold − permuted)
  bool reject = false;
  std::uint64_t retried_runs = 0;
};

/// Counts permuted draws exceeding the observed statistic of their own fold.
inline std::uint64_t count_exceeding(const std::vector<double>& observed, const std::vector<double>& permuted,
                                     std::size_t k) {
  if (permuted.size() != observed.size() * k) throw DomainError("permuted sample count is not folds × k");
  std::uint64_t b = 0;
  for (std::size_t f = 0; f < observed.size(); ++f) {
    for (std::size_t j = 0; j < k; ++j) b += permuted[f * k + j] > observed[f] ? 1 : 0;
  }
  return b;
}

inline double p_value_from_samples(const std::vector<double>& observed, const std::vector<double>& permuted,
                                   std::size_t k, bool smoothed) {
  const double b = static_cast<double>(count_exceeding(observed, permuted, k));
  const double n = static_cast<double>(permuted.size());
  return smoothed ? (b + 1.0) / (n + 1.0) : b / n;
}

inline double mean_difference(const std::vector<double>& observed, const std::vector<double>& permuted, std::size_t k) {
  KahanSum s;
  for (std::size_t f = 0; f < observed.size(); ++f) {
    for (std::size_t j = 0; j < k; ++j) s += observed[f] - permuted[f * k + j];
  }
  return s.value() / static_cast<double>(permuted.size());
}

struct RunEstimate {
  double mi_do = 0.0;
  double model_mi = 0.0;
};

/// Trains one model and evaluates MI_do and model-based MI on its own
/// training nouns. A diverged run is retried once with a fresh seed.
inline RunEstimate fit_and_estimate(const model::Dataset& train, const model::AdjectiveVocab& vocab,
                                    model::TrainConfig tc, const PermTestConfig& cfg,
                                    std::initializer_list<std::uint64_t> run_id, bool* retried = nullptr) {
  const std::vector<std::uint64_t> ids(run_id);
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::uint64_t s = derive_seed(cfg.seed, "init");
    for (std::uint64_t i : ids) s = derive_seed(s, "run", {i});
    tc.seed = derive_seed(s, "attempt", {attempt});
    try {
      const model::ClassifierParams params = model::train_classifier(train, vocab, tc);
      const model::Classifier clf(params, vocab);
      const auto nouns = estimate::noun_points(train, cfg.noun_weighting);
      const auto pi = model::empirical_gender_marginal(train, cfg.gender_weighting);
      return {estimate::mi_do(clf, nouns, pi.probs), estimate::model_mi(clf, nouns)};
    } catch (const TrainingError&) {
      if (attempt >= 1) throw;
      if (retried) *retried = true;
    }
  }
}

/// For each fold: train on the fold's training nouns and record MI_do; then
/// retrain from scratch k times on gender-permuted copies of the same
/// training nouns. p = (# permuted MI_do > observed MI_do of the fold) / (k·folds).
inline PermTestResult run_permutation_test(const model::Dataset& data, const model::AdjectiveVocab& vocab,
                                           const model::TrainConfig& train_cfg, const PermTestConfig& cfg) {
  cfg.validate();
  if (cfg.subset > vocab.size()) {
    throw ConfigError("adjective subset " + std::to_string(cfg.subset) + " exceeds vocabulary size " +
                      std::to_string(vocab.size()));
  }
  const auto [sub_data, sub_vocab] = model::restrict_vocab(data, vocab, cfg.subset);
  const auto folds = model::split_folds(sub_data, cfg.folds, derive_seed(cfg.seed, "folds"));
  const std::size_t k = cfg.permutations;
  const std::size_t per_fold = k + 1;

  std::vector<RunEstimate> runs(cfg.folds * per_fold);
  std::vector<char> retried(runs.size(), 0);
  parallel_for(runs.size(), cfg.threads, [&](std::size_t task) {
    const std::size_t f = task / per_fold;
    const std::size_t j = task % per_fold;
    bool r = false;
    if (j == 0) {
      runs[task] = fit_and_estimate(folds[f].train, sub_vocab, train_cfg, cfg, {f, 0}, &r);
    } else {
      const model::Dataset permuted =
          model::permute_genders(folds[f].train, derive_seed(cfg.seed, "permutations", {f, j - 1}));
      runs[task] = fit_and_estimate(permuted, sub_vocab, train_cfg, cfg, {f, j}, &r);
    }
    retried[task] = r ? 1 : 0;
  });

  PermTestResult res;
  res.config = cfg;
  for (std::size_t f = 0; f < cfg.folds; ++f) {
    res.observed_mi_do.push_back(runs[f * per_fold].mi_do);
    res.observed_model_mi.push_back(runs[f * per_fold].model_mi);
    for (std::size_t j = 1; j < per_fold; ++j) res.permuted_mi_do.push_back(runs[f * per_fold + j].mi_do);
  }
  for (char r : retried) res.retried_runs += static_cast<std::uint64_t>(r);
  res.exceed_count = count_exceeding(res.observed_mi_do, res.permuted_mi_do, k);
  res.p_value = p_value_from_samples(res.observed_mi_do, res.permuted_mi_do, k, cfg.smoothed);
  res.mean_difference = mean_difference(res.observed_mi_do, res.permuted_mi_do, k);
  res.reject = res.p_value < cfg.alpha;
  return res;
}

}  // namespace cgmi::permtest
