#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cgmi/core/error.hpp"
#include "cgmi/core/numeric.hpp"

namespace cgmi {

/// Normalized probabilities over a finite, ordered, labelled support.
struct CategoricalDistribution {
  std::vector<std::string> support;
  std::vector<double> probs;

  std::size_t size() const noexcept { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }

  /// Throws DomainError unless probs are finite, non-negative, sum to one
  /// within `tolerance`, and the support labels are unique.
  void validate(double tolerance = 1e-12) const {
    if (!support.empty() && support.size() != probs.size()) {
      throw DomainError("distribution support and probability vector differ in length");
    }
    if (probs.empty()) throw DomainError("empty distribution");
    for (double p : probs) {
      if (!std::isfinite(p) || p < 0.0) throw DomainError("negative or non-finite probability");
    }
    const double total = compensated_sum(probs);
    if (std::abs(total - 1.0) > tolerance) {
      throw DomainError("probabilities sum to " + std::to_string(total));
    }
    if (std::set<std::string>(support.begin(), support.end()).size() != support.size()) {
      throw DomainError("duplicate support label");
    }
  }
};

/// Builds a distribution over indices "0".."n-1" from raw probabilities.
inline CategoricalDistribution make_distribution(std::vector<double> probs,
                                                 std::vector<std::string> support = {}) {
  if (support.empty()) {
    support.reserve(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) support.push_back(std::to_string(i));
  }
  return CategoricalDistribution{std::move(support), std::move(probs)};
}

/// Normalizes non-negative weights into a distribution.
inline CategoricalDistribution normalized(std::vector<double> weights,
                                          std::vector<std::string> support = {}) {
  const double total = compensated_sum(weights);
  if (!(total > 0.0)) throw DomainError("cannot normalize zero total mass");
  for (double& w : weights) w /= total;
  return make_distribution(std::move(weights), std::move(support));
}

}  // namespace cgmi
