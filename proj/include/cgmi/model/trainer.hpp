#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <tuple>
#include <vector>

#include "cgmi/core/error.hpp"
#include "cgmi/core/random.hpp"
#include "cgmi/model/classifier.hpp"

namespace cgmi::model {

struct TrainConfig {
  std::size_t hidden = 128;
  Activation activation = Activation::kTanh;
  Regularization reg;
  std::size_t max_epochs = 100;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 1;  ///< nouns per Adam step
  /// Fraction of each noun's adjective tokens held out for early stopping; 0 disables it.
  double validation_fraction = 0.1;
  std::size_t patience = 5;
  std::uint64_t seed = 1;

  void validate() const {
    if (hidden == 0) throw ConfigError("hidden width must be >= 1");
    if (batch_size == 0) throw ConfigError("batch size must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (reg.l1 < 0.0 || reg.l2 < 0.0) throw ConfigError("regularization coefficients must be >= 0");
    if (validation_fraction < 0.0 || validation_fraction >= 1.0) {
      throw ConfigError("validation fraction must be in [0, 1)");
    }
  }
};

struct TrainReport {
  std::vector<double> train_objective;  ///< per epoch, summed over minibatches
  std::vector<double> validation_nll;   ///< per epoch, empty without validation
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;  ///< 0 = initialization
  bool early_stopped = false;
};

/// Splits every noun's adjective tokens into train and held-out parts with
/// independent binomial draws.
inline std::pair<Dataset, Dataset> holdout_tokens(const Dataset& data, double fraction, std::uint64_t seed) {
  Dataset train{data.genders, data.noun_dim, {}};
  Dataset valid{data.genders, data.noun_dim, {}};
  Rng rng(seed);
  for (const auto& e : data.entries) {
    DatasetEntry t = e, v = e;
    t.adjectives.clear();
    v.adjectives.clear();
    for (const auto& a : e.adjectives) {
      std::binomial_distribution<std::uint64_t> draw(a.count, fraction);
      const std::uint64_t held = draw(rng);
      if (held < a.count) t.adjectives.push_back({a.adjective, a.count - held});
      if (held > 0) v.adjectives.push_back({a.adjective, held});
    }
    if (!t.adjectives.empty()) train.entries.push_back(std::move(t));
    if (!v.adjectives.empty()) valid.entries.push_back(std::move(v));
  }
  return {std::move(train), std::move(valid)};
}

/// Regularized maximum likelihood by minibatch Adam over nouns. With
/// validation enabled, training stops after `patience` epochs without
/// held-out improvement and the best-validation weights are returned.
/// Deterministic for a fixed seed.
inline ClassifierParams train_classifier(const Dataset& data, const AdjectiveVocab& vocab, const TrainConfig& cfg,
                                         TrainReport* report = nullptr) {
  cfg.validate();
  if (data.empty()) throw ConfigError("training set is empty");
  data.validate(vocab.size());
  ClassifierParams params = init_params(cfg.hidden, vocab.dim(), data.noun_dim, data.genders.size(),
                                        cfg.activation, derive_seed(cfg.seed, "init"));
  TrainReport rep;
  if (cfg.max_epochs == 0) {
    if (report) *report = rep;
    return params;
  }

  Dataset train_part, valid_part;
  const bool use_validation = cfg.validation_fraction > 0.0;
  if (use_validation) {
    std::tie(train_part, valid_part) = holdout_tokens(data, cfg.validation_fraction, derive_seed(cfg.seed, "holdout"));
    if (train_part.empty()) throw ConfigError("no training tokens left after validation holdout");
  }
  const Dataset& train = use_validation ? train_part : data;
  const bool track_validation = use_validation && !valid_part.empty();

  const std::size_t P = params.size();
  std::vector<double> m(P, 0.0), v(P, 0.0), grad(P);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(derive_seed(cfg.seed, "shuffle"));
  const double n_entries = static_cast<double>(train.size());

  ClassifierParams best = params;
  double best_valid = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::uint64_t step = 0;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_obj = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, stop - start);
      const Classifier clf(params, vocab);
      const double scale = static_cast<double>(batch.size()) / n_entries;
      const double obj = objective_and_gradient(clf, train, batch, cfg.reg, scale, grad);
      if (!std::isfinite(obj) || !all_finite(grad)) {
        throw TrainingError("training diverged (non-finite objective) in epoch " + std::to_string(epoch));
      }
      epoch_obj += obj;
      ++step;
      const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      for (std::size_t i = 0; i < P; ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        params.weights[i] -= cfg.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.epsilon);
      }
    }
    rep.train_objective.push_back(epoch_obj);
    rep.epochs_run = epoch;
    if (!track_validation) continue;
    const double valid_nll = -log_likelihood(params, vocab, valid_part);
    if (!std::isfinite(valid_nll)) throw TrainingError("validation loss became non-finite");
    rep.validation_nll.push_back(valid_nll);
    if (valid_nll < best_valid) {
      best_valid = valid_nll;
      best = params;
      rep.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      rep.early_stopped = true;
      break;
    }
  }
  if (track_validation) params = std::move(best);
  else rep.best_epoch = rep.epochs_run;
  if (report) *report = std::move(rep);
  return params;
}

}  // namespace cgmi::model
