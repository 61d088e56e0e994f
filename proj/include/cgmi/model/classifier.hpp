#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cgmi/core/distribution.hpp"
#include "cgmi/core/error.hpp"
#include "cgmi/core/numeric.hpp"
#include "cgmi/core/random.hpp"
#include "cgmi/model/types.hpp"

namespace cgmi::model {

enum class Activation { kTanh, kRelu };

inline const char* to_string(Activation a) { return a == Activation::kTanh ? "tanh" : "relu"; }

inline Activation parse_activation(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  throw ConfigError("unknown activation '" + s + "' (expected tanh or relu)");
}

/// Weights of p(a | g, n) ∝ exp(wᵀ act(W [e(a); n; e(g)])) with one-hot e(g).
/// Stored flat: W row-major (hidden × input_dim), then w (hidden).
struct ClassifierParams {
  std::size_t hidden = 0;
  std::size_t adjective_dim = 0;
  std::size_t noun_dim = 0;
  std::size_t genders = 0;
  Activation activation = Activation::kTanh;
  std::vector<double> weights;

  std::size_t input_dim() const noexcept { return adjective_dim + noun_dim + genders; }
  std::size_t size() const noexcept { return hidden * input_dim() + hidden; }

  double& W(std::size_t h, std::size_t i) { return weights[h * input_dim() + i]; }
  double W(std::size_t h, std::size_t i) const { return weights[h * input_dim() + i]; }
  double& w(std::size_t h) { return weights[hidden * input_dim() + h]; }
  double w(std::size_t h) const { return weights[hidden * input_dim() + h]; }

  void validate() const {
    if (hidden == 0 || genders == 0) throw ConfigError("classifier needs hidden >= 1 and at least one gender");
    if (weights.size() != size()) throw ConfigError("classifier weight count does not match its shape");
    if (!all_finite(weights)) throw ConfigError("classifier weights are not finite");
  }
};

/// Symmetric uniform initialization scaled by fan-in.
inline ClassifierParams init_params(std::size_t hidden, std::size_t adjective_dim, std::size_t noun_dim,
                                    std::size_t genders, Activation act, std::uint64_t seed) {
  ClassifierParams p{hidden, adjective_dim, noun_dim, genders, act, {}};
  p.weights.resize(p.size());
  Rng rng(seed);
  const double wb = 1.0 / std::sqrt(static_cast<double>(p.input_dim()));
  const double vb = 1.0 / std::sqrt(static_cast<double>(hidden));
  std::uniform_real_distribution<double> uw(-wb, wb), uv(-vb, vb);
  for (std::size_t i = 0; i < hidden * p.input_dim(); ++i) p.weights[i] = uw(rng);
  for (std::size_t h = 0; h < hidden; ++h) p.w(h) = uv(rng);
  return p;
}

/// Zeroes the gender columns of W: the model then has no G → A edge.
inline ClassifierParams ablate_gender(ClassifierParams p) {
  for (std::size_t h = 0; h < p.hidden; ++h) {
    for (std::size_t g = 0; g < p.genders; ++g) p.W(h, p.adjective_dim + p.noun_dim + g) = 0.0;
  }
  return p;
}

/// Anything that yields a conditional adjective distribution p(· | n, g).
template <class M>
concept AdjectiveModel = requires(const M& m, std::span<const double> meaning, std::size_t gender,
                                  std::span<double> out) {
  { m.vocab_size() } -> std::convertible_to<std::size_t>;
  { m.genders() } -> std::convertible_to<std::size_t>;
  m.predict(meaning, gender, out);
};

/// Evaluates the classifier against a fixed vocabulary. The adjective half of
/// the first layer is precomputed once. Holds references: params and vocab
/// must outlive it.
class Classifier {
 public:
  Classifier(ClassifierParams&&, const AdjectiveVocab&) = delete;
  Classifier(const ClassifierParams&, AdjectiveVocab&&) = delete;
  Classifier(const ClassifierParams& params, const AdjectiveVocab& vocab) : p_(&params), vocab_(&vocab) {
    params.validate();
    if (vocab.dim() != params.adjective_dim) {
      throw ConfigError("adjective vectors have dim " + std::to_string(vocab.dim()) + ", classifier expects " +
                        std::to_string(params.adjective_dim));
    }
    if (vocab.size() == 0) throw ConfigError("empty adjective vocabulary");
    const std::size_t H = params.hidden;
    adj_proj_.assign(vocab.size() * H, 0.0);
    for (std::size_t a = 0; a < vocab.size(); ++a) {
      const auto& e = vocab[a].vector;
      for (std::size_t h = 0; h < H; ++h) {
        double s = 0.0;
        for (std::size_t j = 0; j < params.adjective_dim; ++j) s += params.W(h, j) * e[j];
        adj_proj_[a * H + h] = s;
      }
    }
  }

  std::size_t vocab_size() const noexcept { return vocab_->size(); }
  std::size_t genders() const noexcept { return p_->genders; }
  const ClassifierParams& params() const noexcept { return *p_; }
  const AdjectiveVocab& vocab() const noexcept { return *vocab_; }
  std::span<const double> adjective_projection() const noexcept { return adj_proj_; }

  /// Noun-and-gender part of the hidden pre-activation.
  void noun_projection(std::span<const double> meaning, std::size_t gender, std::span<double> base) const {
    const ClassifierParams& p = *p_;
    const std::size_t off = p.adjective_dim;
    for (std::size_t h = 0; h < p.hidden; ++h) {
      double s = 0.0;
      for (std::size_t j = 0; j < p.noun_dim; ++j) s += p.W(h, off + j) * meaning[j];
      base[h] = s + p.W(h, off + p.noun_dim + gender);
    }
  }

  /// Unnormalized scores wᵀ act(W x) for every adjective.
  void scores(std::span<const double> meaning, std::size_t gender, std::span<double> out) const {
    const ClassifierParams& p = *p_;
    check_inputs(meaning, gender);
    const std::size_t H = p.hidden;
    std::vector<double> base(H);
    noun_projection(meaning, gender, base);
    for (std::size_t a = 0; a < vocab_->size(); ++a) {
      const double* proj = adj_proj_.data() + a * H;
      double s = 0.0;
      for (std::size_t h = 0; h < H; ++h) s += p.w(h) * activate(proj[h] + base[h]);
      out[a] = s;
    }
  }

  void predict(std::span<const double> meaning, std::size_t gender, std::span<double> out) const {
    scores(meaning, gender, out);
    softmax_inplace(out);
  }

  std::vector<double> predict(std::span<const double> meaning, std::size_t gender) const {
    std::vector<double> out(vocab_size());
    predict(meaning, gender, out);
    return out;
  }

  double activate(double x) const noexcept {
    return p_->activation == Activation::kTanh ? std::tanh(x) : (x > 0.0 ? x : 0.0);
  }

  /// Derivative of the activation expressed through its input and output.
  double activate_grad(double pre, double post) const noexcept {
    return p_->activation == Activation::kTanh ? 1.0 - post * post : (pre > 0.0 ? 1.0 : 0.0);
  }

  static void softmax_inplace(std::span<double> s) {
    const double mx = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (double& x : s) {
      x = std::exp(x - mx);
      z += x;
    }
    for (double& x : s) x /= z;
  }

 private:
  void check_inputs(std::span<const double> meaning, std::size_t gender) const {
    if (meaning.size() != p_->noun_dim) {
      throw ConfigError("noun vector has dim " + std::to_string(meaning.size()) + ", classifier expects " +
                        std::to_string(p_->noun_dim));
    }
    if (gender >= p_->genders) throw ConfigError("gender index out of range");
    if (!all_finite(meaning)) throw DomainError("NaN or infinite component in noun vector");
  }

  const ClassifierParams* p_;
  const AdjectiveVocab* vocab_;
  std::vector<double> adj_proj_;
};

static_assert(AdjectiveModel<Classifier>);

inline CategoricalDistribution predict_adjective_distribution(const ClassifierParams& params,
                                                              const AdjectiveVocab& vocab,
                                                              std::span<const double> meaning, std::size_t gender) {
  const Classifier clf(params, vocab);
  return make_distribution(clf.predict(meaning, gender), vocab.lemmas());
}

namespace detail {

inline double log_softmax_at(std::span<const double> s, std::size_t a) {
  const double mx = *std::max_element(s.begin(), s.end());
  double z = 0.0;
  for (double x : s) z += std::exp(x - mx);
  return s[a] - mx - std::log(z);
}

}  // namespace detail

/// Σ_n Σ_{a ∈ A_n} count · log p(a | g_n, n) (natural log).
inline double log_likelihood(const ClassifierParams& params, const AdjectiveVocab& vocab, const Dataset& data) {
  if (data.empty()) throw ConfigError("log-likelihood of an empty dataset");
  const Classifier clf(params, vocab);
  std::vector<double> s(vocab.size());
  KahanSum ll;
  for (const auto& e : data.entries) {
    clf.scores(e.noun.meaning, e.noun.gender, s);
    const double mx = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (double x : s) z += std::exp(x - mx);
    const double lz = mx + std::log(z);
    for (const auto& a : e.adjectives) ll += static_cast<double>(a.count) * (s[a.adjective] - lz);
  }
  return ll.value();
}

struct Regularization {
  double l1 = 0.001;
  double l2 = 0.001;
};

inline double penalty(std::span<const double> theta, const Regularization& reg) {
  double s1 = 0.0, s2 = 0.0;
  for (double t : theta) {
    s1 += std::abs(t);
    s2 += t * t;
  }
  return reg.l1 * s1 + reg.l2 * s2;
}

/// Negative log-likelihood of `entries` plus `penalty_scale` × the penalty,
/// accumulating its gradient into `grad` (same layout as params.weights).
/// This is the quantity minimized during training.
inline double objective_and_gradient(const Classifier& clf, const Dataset& data, std::span<const std::size_t> entries,
                                     const Regularization& reg, double penalty_scale, std::span<double> grad) {
  const ClassifierParams& p = clf.params();
  const AdjectiveVocab& vocab = clf.vocab();
  const std::size_t H = p.hidden;
  const std::size_t A = vocab.size();
  const std::size_t I = p.input_dim();
  const std::size_t noun_off = p.adjective_dim;
  const std::size_t gender_off = p.adjective_dim + p.noun_dim;
  const std::size_t w_off = H * I;
  std::fill(grad.begin(), grad.end(), 0.0);

  std::vector<double> base(H), post(A * H), s(A), delta(A), dpre_sum(H);
  std::vector<double> dadj(A * H, 0.0);  // Σ over nouns of ∂/∂pre for each adjective row
  std::vector<double> counts(A);
  const auto proj = clf.adjective_projection();
  double nll = 0.0;

  for (std::size_t idx : entries) {
    const DatasetEntry& e = data.entries[idx];
    clf.noun_projection(e.noun.meaning, e.noun.gender, base);
    for (std::size_t a = 0; a < A; ++a) {
      double sc = 0.0;
      for (std::size_t h = 0; h < H; ++h) {
        const double v = clf.activate(proj[a * H + h] + base[h]);
        post[a * H + h] = v;
        sc += p.w(h) * v;
      }
      s[a] = sc;
    }
    const double mx = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (std::size_t a = 0; a < A; ++a) z += std::exp(s[a] - mx);
    const double lz = mx + std::log(z);
    std::fill(counts.begin(), counts.end(), 0.0);
    double total = 0.0;
    for (const auto& c : e.adjectives) {
      counts[c.adjective] += static_cast<double>(c.count);
      total += static_cast<double>(c.count);
      nll -= static_cast<double>(c.count) * (s[c.adjective] - lz);
    }
    std::fill(dpre_sum.begin(), dpre_sum.end(), 0.0);
    for (std::size_t a = 0; a < A; ++a) {
      const double d = total * std::exp(s[a] - lz) - counts[a];
      if (d == 0.0) continue;
      for (std::size_t h = 0; h < H; ++h) {
        const double v = post[a * H + h];
        grad[w_off + h] += d * v;
        const double dp = d * p.w(h) * clf.activate_grad(proj[a * H + h] + base[h], v);
        dadj[a * H + h] += dp;
        dpre_sum[h] += dp;
      }
    }
    for (std::size_t h = 0; h < H; ++h) {
      double* row = grad.data() + h * I;
      for (std::size_t j = 0; j < p.noun_dim; ++j) row[noun_off + j] += dpre_sum[h] * e.noun.meaning[j];
      row[gender_off + e.noun.gender] += dpre_sum[h];
    }
  }
  for (std::size_t a = 0; a < A; ++a) {
    const auto& ev = vocab[a].vector;
    for (std::size_t h = 0; h < H; ++h) {
      const double dp = dadj[a * H + h];
      if (dp == 0.0) continue;
      double* row = grad.data() + h * I;
      for (std::size_t j = 0; j < p.adjective_dim; ++j) row[j] += dp * ev[j];
    }
  }
  double pen = 0.0;
  if (penalty_scale > 0.0 && (reg.l1 > 0.0 || reg.l2 > 0.0)) {
    for (std::size_t i = 0; i < p.weights.size(); ++i) {
      const double t = p.weights[i];
      grad[i] += penalty_scale * (reg.l1 * (t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0)) + 2.0 * reg.l2 * t);
    }
    pen = penalty_scale * penalty(p.weights, reg);
  }
  return nll + pen;
}

/// −(log-likelihood − l1‖θ‖₁ − l2‖θ‖₂²) over the whole dataset, with gradient.
inline double regularized_objective(const ClassifierParams& params, const AdjectiveVocab& vocab, const Dataset& data,
                                    const Regularization& reg, std::vector<double>* grad = nullptr) {
  const Classifier clf(params, vocab);
  std::vector<std::size_t> all(data.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::vector<double> g(params.size());
  const double f = objective_and_gradient(clf, data, all, reg, 1.0, g);
  if (grad) *grad = std::move(g);
  return f;
}

}  // namespace cgmi::model
