#pragma once

#include <span>
#include <vector>

#include "cgmi/core/distribution.hpp"
#include "cgmi/core/error.hpp"
#include "cgmi/core/numeric.hpp"
#include "cgmi/estimators/information.hpp"
#include "cgmi/model/classifier.hpp"
#include "cgmi/model/dataset_ops.hpp"

namespace cgmi::estimate {

/// A (gender, noun meaning) pair of the estimation noun set, with its
/// averaging weight (1 for type-uniform averaging).
struct NounPoint {
  std::span<const double> meaning;
  std::size_t gender = 0;
  double weight = 1.0;
};

/// Views over the dataset's nouns; the dataset must outlive the result.
inline std::vector<NounPoint> noun_points(const model::Dataset& data,
                                          model::NounWeighting weighting = model::NounWeighting::kType) {
  std::vector<NounPoint> out;
  out.reserve(data.size());
  for (const auto& e : data.entries) {
    out.push_back({e.noun.meaning, e.noun.gender, model::noun_weight(e.noun, weighting)});
  }
  return out;
}

namespace detail {

inline double total_weight(std::span<const NounPoint> nouns) {
  if (nouns.empty()) throw DomainError("estimation noun set is empty");
  KahanSum t;
  for (const auto& n : nouns) {
    if (!(n.weight >= 0.0)) throw DomainError("negative noun weight");
    t += n.weight;
  }
  if (!(t.value() > 0.0)) throw DomainError("noun weights sum to zero");
  return t.value();
}

}  // namespace detail

/// p̃(a, g) = Σ_{(h,m)} ω(m) p(a | h, m) 1{g = h} with ω normalized weights
/// (1/|Ñ| for type-uniform weights).
template <model::AdjectiveModel M>
JointAG model_joint(const M& model, std::span<const NounPoint> nouns) {
  const double total = detail::total_weight(nouns);
  const std::size_t A = model.vocab_size();
  const std::size_t G = model.genders();
  std::vector<KahanSum> acc(A * G);
  std::vector<double> p(A);
  for (const auto& n : nouns) {
    if (n.gender >= G) throw DomainError("noun gender outside the model's inventory");
    model.predict(n.meaning, n.gender, p);
    const double w = n.weight / total;
    for (std::size_t a = 0; a < A; ++a) acc[a * G + n.gender] += w * p[a];
  }
  JointAG j;
  j.adjectives = A;
  j.genders = G;
  j.probs.resize(A * G);
  for (std::size_t i = 0; i < acc.size(); ++i) j.probs[i] = acc[i].value();
  return j;
}

/// Associational MI(A; G) of the model-based joint.
template <model::AdjectiveModel M>
double model_mi(const M& model, std::span<const NounPoint> nouns) {
  return mutual_information(model_joint(model, nouns));
}

/// p̃(a | do(G = g)) = Σ_m ω(m) p(a | g, m): every noun's gender is forced to g.
template <model::AdjectiveModel M>
std::vector<double> intervention_distribution(const M& model, std::span<const NounPoint> nouns, std::size_t gender) {
  const double total = detail::total_weight(nouns);
  if (gender >= model.genders()) throw DomainError("intervention gender outside the model's inventory");
  const std::size_t A = model.vocab_size();
  std::vector<KahanSum> acc(A);
  std::vector<double> p(A);
  for (const auto& n : nouns) {
    model.predict(n.meaning, gender, p);
    const double w = n.weight / total;
    for (std::size_t a = 0; a < A; ++a) acc[a] += w * p[a];
  }
  std::vector<double> out(A);
  for (std::size_t a = 0; a < A; ++a) out[a] = acc[a].value();
  return out;
}

/// Per-gender intervention distributions with gender weights π.
struct InterventionFamily {
  std::vector<std::vector<double>> distributions;
  std::vector<double> weights;
};

template <model::AdjectiveModel M>
InterventionFamily intervention_family(const M& model, std::span<const NounPoint> nouns,
                                       std::span<const double> gender_weights) {
  if (gender_weights.size() != model.genders()) {
    throw DomainError("gender weights do not match the model's gender count");
  }
  InterventionFamily fam;
  fam.weights.assign(gender_weights.begin(), gender_weights.end());
  for (std::size_t g = 0; g < model.genders(); ++g) {
    fam.distributions.push_back(intervention_distribution(model, nouns, g));
  }
  return fam;
}

/// MI_do(A; G) as the π-weighted Jensen–Shannon divergence of the intervention family.
inline double mi_do(const InterventionFamily& fam) { return weighted_js(fam.distributions, fam.weights); }

template <model::AdjectiveModel M>
double mi_do(const M& model, std::span<const NounPoint> nouns, std::span<const double> gender_weights) {
  return mi_do(intervention_family(model, nouns, gender_weights));
}

/// H_do(A) = H(m) and H_do(A | G) = Σ_g π_g H(p(· | do(g))); their difference
/// is MI_do by the JS/MI identity.
struct DoEntropies {
  double h_do_a = 0.0;
  double h_do_a_given_g = 0.0;
  double mi() const { return h_do_a - h_do_a_given_g; }
};

inline DoEntropies do_entropies(const InterventionFamily& fam) {
  detail::check_weights(fam.weights, fam.distributions.size());
  DoEntropies out;
  out.h_do_a = entropy(mixture(fam.distributions, fam.weights));
  KahanSum cond;
  for (std::size_t g = 0; g < fam.distributions.size(); ++g) cond += fam.weights[g] * entropy(fam.distributions[g]);
  out.h_do_a_given_g = cond.value();
  return out;
}

}  // namespace cgmi::estimate
