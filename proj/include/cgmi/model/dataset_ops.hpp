#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "cgmi/core/distribution.hpp"
#include "cgmi/core/error.hpp"
#include "cgmi/core/random.hpp"
#include "cgmi/model/types.hpp"

namespace cgmi::model {

/// How nouns are weighted when averaging over them.
enum class NounWeighting {
  kType,   ///< every noun type counts once
  kToken,  ///< nouns weighted by their adjective-token count
};

inline const char* to_string(NounWeighting w) { return w == NounWeighting::kType ? "type" : "token"; }

inline NounWeighting parse_noun_weighting(const std::string& s) {
  if (s == "type") return NounWeighting::kType;
  if (s == "token") return NounWeighting::kToken;
  throw ConfigError("unknown noun weighting '" + s + "' (expected type or token)");
}

inline double noun_weight(const NounEntry& n, NounWeighting w) { return w == NounWeighting::kType ? 1.0 : n.weight; }

/// Maximum-likelihood p(g) over the dataset's nouns. Genders with no nouns
/// stay in the support with probability 0.
inline CategoricalDistribution empirical_gender_marginal(const Dataset& data,
                                                         NounWeighting weighting = NounWeighting::kToken) {
  if (data.empty()) throw ConfigError("gender marginal of an empty dataset");
  std::vector<double> mass(data.genders.size(), 0.0);
  for (const auto& e : data.entries) mass.at(e.noun.gender) += noun_weight(e.noun, weighting);
  return normalized(std::move(mass), data.genders);
}

/// Uniformly random reassignment of the gender labels across nouns; every
/// other field is untouched and the gender multiset is preserved.
inline Dataset permute_genders(Dataset data, std::uint64_t seed) {
  std::vector<std::size_t> genders;
  genders.reserve(data.size());
  for (const auto& e : data.entries) genders.push_back(e.noun.gender);
  Rng rng(seed);
  std::shuffle(genders.begin(), genders.end(), rng);
  for (std::size_t i = 0; i < data.size(); ++i) data.entries[i].noun.gender = genders[i];
  return data;
}

struct FoldSplit {
  Dataset train;
  Dataset test;
};

/// Partitions nouns into `folds` test sets of near-equal size; fold f trains
/// on every noun outside test fold f.
inline std::vector<FoldSplit> split_folds(const Dataset& data, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("need at least 2 folds");
  if (data.size() < folds) {
    throw ConfigError("cannot split " + std::to_string(data.size()) + " nouns into " + std::to_string(folds) +
                      " folds");
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold_of(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) fold_of[order[i]] = static_cast<int>(i % folds);

  std::vector<FoldSplit> out(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < data.size(); ++i) {
      (fold_of[i] == static_cast<int>(f) ? test_idx : train_idx).push_back(i);
    }
    out[f].train = data.subset(train_idx);
    out[f].test = data.subset(test_idx);
    for (auto& e : out[f].train.entries) {
      e.split = Split::kTrain;
      e.fold = static_cast<int>(f);
    }
    for (auto& e : out[f].test.entries) {
      e.split = Split::kTest;
      e.fold = static_cast<int>(f);
    }
  }
  return out;
}

/// Keeps the `keep` most frequent adjectives of the vocabulary (vocabulary
/// order is frequency order) and re-indexes the dataset onto them.
inline std::pair<Dataset, AdjectiveVocab> restrict_vocab(const Dataset& data, const AdjectiveVocab& vocab,
                                                         std::size_t keep) {
  if (keep == 0 || keep > vocab.size()) {
    throw ConfigError("adjective subset " + std::to_string(keep) + " exceeds vocabulary size " +
                      std::to_string(vocab.size()));
  }
  std::vector<AdjectiveVocab::Item> items(vocab.items().begin(), vocab.items().begin() + static_cast<long>(keep));
  AdjectiveVocab sub(vocab.dim(), std::move(items));
  Dataset out{data.genders, data.noun_dim, {}};
  for (const auto& e : data.entries) {
    DatasetEntry r = e;
    r.adjectives.clear();
    for (const auto& a : e.adjectives) {
      if (a.adjective < keep) r.adjectives.push_back(a);
    }
    if (r.adjectives.empty()) continue;
    r.noun.weight = static_cast<double>(r.tokens());
    out.entries.push_back(std::move(r));
  }
  return {std::move(out), std::move(sub)};
}

}  // namespace cgmi::model
