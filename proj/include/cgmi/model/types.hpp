#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "cgmi/core/error.hpp"
#include "cgmi/core/random.hpp"
#include "cgmi/embeddings/vector_table.hpp"
#include "cgmi/treebank/extract.hpp"

namespace cgmi::model {

/// A noun type: lemma, gender index into the inventory, meaning vector, and
/// its token weight for the empirical noun distribution.
struct NounEntry {
  std::string lemma;
  std::size_t gender = 0;
  std::vector<double> meaning;
  double weight = 1.0;
};

/// Ordered adjective support of the softmax. The order is part of the model.
class AdjectiveVocab {
 public:
  struct Item {
    std::string lemma;
    std::vector<double> vector;
    std::uint64_t frequency = 0;
  };

  AdjectiveVocab() = default;
  AdjectiveVocab(std::size_t dim, std::vector<Item> items) : dim_(dim), items_(std::move(items)) {
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (items_[i].vector.size() != dim_) throw ConfigError("adjective vector has wrong length");
      if (!index_.emplace(items_[i].lemma, i).second) throw ConfigError("duplicate adjective " + items_[i].lemma);
    }
  }

  std::size_t size() const noexcept { return items_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const Item& operator[](std::size_t i) const { return items_[i]; }
  const std::vector<Item>& items() const noexcept { return items_; }

  std::optional<std::size_t> find(const std::string& lemma) const {
    const auto it = index_.find(lemma);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::string> lemmas() const {
    std::vector<std::string> out;
    for (const auto& it : items_) out.push_back(it.lemma);
    return out;
  }

  /// Hash of the ordered lemma list; identifies the softmax support.
  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& it : items_) h = fnv1a64(it.lemma + '\n', h);
    return h;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<Item> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct AdjectiveCount {
  std::uint32_t adjective = 0;
  std::uint64_t count = 0;
};

enum class Split { kTrain, kTest };

struct DatasetEntry {
  NounEntry noun;
  std::vector<AdjectiveCount> adjectives;  ///< the multiset A_n as index → count
  Split split = Split::kTrain;
  int fold = -1;

  std::uint64_t tokens() const {
    std::uint64_t t = 0;
    for (const auto& a : adjectives) t += a.count;
    return t;
  }
};

/// Noun entries with their adjective multisets; each lemma occurs once.
struct Dataset {
  std::vector<std::string> genders;
  std::size_t noun_dim = 0;
  std::vector<DatasetEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }

  void validate(std::size_t vocab_size) const {
    std::set<std::string> seen;
    for (const auto& e : entries) {
      if (!seen.insert(e.noun.lemma).second) throw ConfigError("noun '" + e.noun.lemma + "' occurs twice");
      if (e.noun.meaning.size() != noun_dim) throw ConfigError("noun '" + e.noun.lemma + "' has wrong dim");
      if (e.noun.gender >= genders.size()) throw ConfigError("noun '" + e.noun.lemma + "' has gender out of range");
      for (const auto& a : e.adjectives) {
        if (a.adjective >= vocab_size) throw ConfigError("adjective index out of vocabulary");
        if (a.count == 0) throw ConfigError("zero adjective count");
      }
    }
  }

  /// Entries selected by index, in the given order.
  Dataset subset(const std::vector<std::size_t>& idx) const {
    Dataset out{genders, noun_dim, {}};
    out.entries.reserve(idx.size());
    for (std::size_t i : idx) out.entries.push_back(entries.at(i));
    return out;
  }
};

struct DatasetDiagnostics {
  std::size_t nouns_without_vector = 0;
  std::size_t nouns_gender_outside_inventory = 0;
  std::size_t adjectives_without_vector = 0;
  std::uint64_t tokens_outside_vocab = 0;
  std::size_t nouns_without_tokens = 0;
};

/// Adjectives with vectors, ranked by frequency among usable nouns (ties by
/// lemma), truncated to `cap` (0 = no cap).
inline AdjectiveVocab make_vocab(const treebank::PairCorpus& pc, const treebank::GenderInventory& inventory,
                                 const embed::VectorTable& noun_vectors, const embed::VectorTable& adj_vectors,
                                 std::size_t cap, DatasetDiagnostics* diag = nullptr) {
  std::map<std::string, std::uint64_t> freq;
  for (const auto& [key, count] : pc.entries) {
    if (!noun_vectors.contains(key.first)) continue;
    if (!inventory.index_of(pc.noun_gender.at(key.first))) continue;
    freq[key.second] += count;
  }
  std::vector<AdjectiveVocab::Item> items;
  for (const auto& [lemma, f] : freq) {
    const auto row = adj_vectors.find(lemma);
    if (!row) {
      if (diag) ++diag->adjectives_without_vector;
      continue;
    }
    const auto v = adj_vectors.row(*row);
    items.push_back({lemma, std::vector<double>(v.begin(), v.end()), f});
  }
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.frequency > b.frequency; });
  if (cap > 0 && items.size() > cap) items.resize(cap);
  return AdjectiveVocab(adj_vectors.dim(), std::move(items));
}

/// Vocabulary in a fixed, externally given order (e.g. from a checkpoint).
inline AdjectiveVocab vocab_from_lemmas(const std::vector<std::string>& lemmas, const embed::VectorTable& adj_vectors) {
  std::vector<AdjectiveVocab::Item> items;
  for (const auto& lemma : lemmas) {
    const auto v = adj_vectors.row(lemma);
    items.push_back({lemma, std::vector<double>(v.begin(), v.end()), 0});
  }
  return AdjectiveVocab(adj_vectors.dim(), std::move(items));
}

/// Joins the pair corpus with noun vectors and the adjective vocabulary.
/// Nouns need a vector and an in-inventory gender; pairs whose adjective is
/// outside the vocabulary are dropped; nouns left without tokens are dropped.
inline Dataset build_dataset(const treebank::PairCorpus& pc, const treebank::GenderInventory& inventory,
                             const embed::VectorTable& noun_vectors, const AdjectiveVocab& vocab,
                             DatasetDiagnostics* diag = nullptr) {
  Dataset data{inventory.labels, noun_vectors.dim(), {}};
  std::map<std::string, std::size_t> noun_slot;
  std::set<std::string> rejected;
  for (const auto& [key, count] : pc.entries) {
    const std::string& noun = key.first;
    if (rejected.count(noun)) continue;
    auto slot = noun_slot.find(noun);
    if (slot == noun_slot.end()) {
      const auto g = inventory.index_of(pc.noun_gender.at(noun));
      const auto row = noun_vectors.find(noun);
      if (!row || !g) {
        if (diag) ++(row ? diag->nouns_gender_outside_inventory : diag->nouns_without_vector);
        rejected.insert(noun);
        continue;
      }
      const auto v = noun_vectors.row(*row);
      DatasetEntry e;
      e.noun = NounEntry{noun, *g, std::vector<double>(v.begin(), v.end()), 0.0};
      slot = noun_slot.emplace(noun, data.entries.size()).first;
      data.entries.push_back(std::move(e));
    }
    const auto a = vocab.find(key.second);
    if (!a) {
      if (diag) diag->tokens_outside_vocab += count;
      continue;
    }
    data.entries[slot->second].adjectives.push_back({static_cast<std::uint32_t>(*a), count});
  }
  std::vector<DatasetEntry> kept;
  for (auto& e : data.entries) {
    if (e.adjectives.empty()) {
      if (diag) ++diag->nouns_without_tokens;
      continue;
    }
    std::sort(e.adjectives.begin(), e.adjectives.end(),
              [](const auto& x, const auto& y) { return x.adjective < y.adjective; });
    e.noun.weight = static_cast<double>(e.tokens());
    kept.push_back(std::move(e));
  }
  data.entries = std::move(kept);
  return data;
}

}  // namespace cgmi::model
