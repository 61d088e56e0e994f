#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cgmi/core/distribution.hpp"
#include "cgmi/core/error.hpp"
#include "cgmi/core/numeric.hpp"
#include "cgmi/treebank/extract.hpp"

namespace cgmi::estimate {

// All quantities are in bits.

inline double entropy(std::span<const double> p) {
  KahanSum s;
  for (double x : p) s += -xlog2x(x);
  return s.value();
}

inline double entropy(const CategoricalDistribution& p) {
  p.validate();
  return entropy(p.probs);
}

/// KL(p ‖ q). Throws DomainError if some q(x) = 0 while p(x) > 0.
inline double kl(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DomainError("KL between distributions of different support size");
  KahanSum s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) throw DomainError("KL undefined: q assigns zero mass where p does not");
    s += p[i] * (std::log2(p[i]) - std::log2(q[i]));
  }
  return s.value();
}

inline double kl(const CategoricalDistribution& p, const CategoricalDistribution& q) {
  p.validate();
  q.validate();
  if (p.support != q.support) throw DomainError("KL between distributions over different supports");
  return kl(p.probs, q.probs);
}

/// Mixture m = Σ_n π_n p_n.
inline std::vector<double> mixture(const std::vector<std::vector<double>>& dists, std::span<const double> weights) {
  std::vector<KahanSum> acc(dists.front().size());
  for (std::size_t n = 0; n < dists.size(); ++n) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weights[n] * dists[n][i];
  }
  std::vector<double> m(acc.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = acc[i].value();
  return m;
}

namespace detail {

inline void check_weights(std::span<const double> weights, std::size_t n) {
  if (n == 0) throw DomainError("weighted JS needs at least one distribution");
  if (weights.size() != n) {
    throw DomainError("weighted JS got " + std::to_string(n) + " distributions but " +
                      std::to_string(weights.size()) + " weights");
  }
  KahanSum total;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("JS weights must be non-negative");
    total += w;
  }
  if (std::abs(total.value() - 1.0) > 1e-12) throw DomainError("JS weights must sum to one");
}

}  // namespace detail

/// Σ_n π_n KL(p_n ‖ m) with m = Σ_n π_n p_n. Components with π_n = 0 contribute nothing.
inline double weighted_js(const std::vector<std::vector<double>>& dists, std::span<const double> weights) {
  detail::check_weights(weights, dists.size());
  for (const auto& d : dists) {
    if (d.size() != dists.front().size()) throw DomainError("JS distributions differ in support size");
  }
  const std::vector<double> m = mixture(dists, weights);
  KahanSum s;
  for (std::size_t n = 0; n < dists.size(); ++n) {
    if (weights[n] == 0.0) continue;
    s += weights[n] * kl(dists[n], m);
  }
  return std::max(0.0, s.value());
}

inline double weighted_js(const std::vector<CategoricalDistribution>& dists, const CategoricalDistribution& pi) {
  pi.validate();
  if (dists.size() != pi.size()) throw DomainError("weight/distribution count mismatch");
  std::vector<std::vector<double>> raw;
  for (const auto& d : dists) {
    d.validate();
    if (d.support != dists.front().support) throw DomainError("JS distributions over different supports");
    raw.push_back(d.probs);
  }
  return weighted_js(raw, pi.probs);
}

/// Joint distribution over (adjective, gender), row-major by adjective.
struct JointAG {
  std::size_t adjectives = 0;
  std::size_t genders = 0;
  std::vector<double> probs;
  std::vector<std::string> adjective_labels;
  std::vector<std::string> gender_labels;

  double operator()(std::size_t a, std::size_t g) const { return probs[a * genders + g]; }

  void validate(double tolerance = 1e-12) const {
    if (probs.size() != adjectives * genders || probs.empty()) throw DomainError("joint has inconsistent shape");
    for (double p : probs) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("joint has a negative or non-finite entry");
    }
    if (std::abs(compensated_sum(probs) - 1.0) > tolerance) throw DomainError("joint does not sum to one");
  }
};

/// Σ_a Σ_g p(a,g) log₂ p(a,g)/(p(a)p(g)); zero-mass cells contribute nothing.
inline double mutual_information(const JointAG& j) {
  std::vector<KahanSum> pa(j.adjectives), pg(j.genders);
  for (std::size_t a = 0; a < j.adjectives; ++a) {
    for (std::size_t g = 0; g < j.genders; ++g) {
      pa[a] += j(a, g);
      pg[g] += j(a, g);
    }
  }
  KahanSum mi;
  for (std::size_t a = 0; a < j.adjectives; ++a) {
    for (std::size_t g = 0; g < j.genders; ++g) {
      const double p = j(a, g);
      if (p == 0.0) continue;
      mi += p * (std::log2(p) - std::log2(pa[a].value()) - std::log2(pg[g].value()));
    }
  }
  // clamp the rounding residue of an exactly independent joint
  return std::max(0.0, mi.value());
}

/// Empirical (maximum-likelihood) joint of adjective and gender from token counts.
inline JointAG plugin_joint(const treebank::PairCorpus& pc) {
  if (pc.entries.empty()) throw DomainError("plug-in estimate of an empty pair corpus");
  std::map<std::string, std::size_t> adj_index, gender_index;
  for (const auto& [key, count] : pc.entries) {
    adj_index.emplace(key.second, 0);
    gender_index.emplace(pc.noun_gender.at(key.first), 0);
  }
  JointAG j;
  for (auto& [label, idx] : adj_index) {
    idx = j.adjective_labels.size();
    j.adjective_labels.push_back(label);
  }
  for (auto& [label, idx] : gender_index) {
    idx = j.gender_labels.size();
    j.gender_labels.push_back(label);
  }
  j.adjectives = adj_index.size();
  j.genders = gender_index.size();
  std::vector<double> counts(j.adjectives * j.genders, 0.0);
  double total = 0.0;
  for (const auto& [key, count] : pc.entries) {
    counts[adj_index[key.second] * j.genders + gender_index[pc.noun_gender.at(key.first)]] +=
        static_cast<double>(count);
    total += static_cast<double>(count);
  }
  for (double& c : counts) c /= total;
  j.probs = std::move(counts);
  return j;
}

inline double plugin_mi(const treebank::PairCorpus& pc) { return mutual_information(plugin_joint(pc)); }

}  // namespace cgmi::estimate
