#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cgmi/core/error.hpp"
#include "cgmi/treebank/conllu.hpp"
#include "cgmi/treebank/unicode.hpp"

namespace cgmi::treebank {

/// Ordered gender label set of one language.
struct GenderInventory {
  std::string language;
  std::vector<std::string> labels;

  std::optional<std::size_t> index_of(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) return i;
    }
    return std::nullopt;
  }

  void validate() const {
    if (labels.empty()) throw ConfigError("gender inventory is empty");
    if (std::set<std::string>(labels.begin(), labels.end()).size() != labels.size()) {
      throw ConfigError("gender inventory has duplicate labels");
    }
  }

  /// Two genders for es/he/pt, three for de/pl.
  static GenderInventory for_language(const std::string& lang) {
    if (lang == "de" || lang == "pl") return {lang, {"FEM", "MSC", "NEU"}};
    if (lang == "es" || lang == "he" || lang == "pt") return {lang, {"FEM", "MSC"}};
    throw ConfigError("no default gender inventory for language '" + lang + "'; pass the labels explicitly");
  }
};

/// Maps a UD `Gender` feature value onto an inventory label (Masc→MSC,
/// Fem→FEM, Neut→NEU, anything else uppercased).
inline std::string gender_label(std::string_view ud_value) {
  if (ud_value == "Masc") return "MSC";
  if (ud_value == "Fem") return "FEM";
  if (ud_value == "Neut") return "NEU";
  std::string out(ud_value);
  for (char& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return out;
}

class InanimateLexicon {
 public:
  InanimateLexicon() = default;
  explicit InanimateLexicon(std::unordered_set<std::string> lemmas) : lemmas_(std::move(lemmas)) {}

  /// One lemma per line; `#` starts a comment line. Lemmas are normalized.
  static InanimateLexicon read(std::istream& in) {
    std::unordered_set<std::string> lemmas;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      const auto last = line.find_last_not_of(" \t");
      lemmas.insert(normalize_lemma(std::string_view(line).substr(first, last - first + 1)));
    }
    if (lemmas.empty()) throw ConfigError("inanimate lexicon is empty");
    return InanimateLexicon(std::move(lemmas));
  }

  bool contains(const std::string& lemma) const { return lemmas_.count(lemma) > 0; }
  std::size_t size() const noexcept { return lemmas_.size(); }

 private:
  std::unordered_set<std::string> lemmas_;
};

/// Multiset of (noun, adjective) lemma pairs with one gender per noun.
struct PairCorpus {
  std::map<std::pair<std::string, std::string>, std::uint64_t> entries;
  std::map<std::string, std::string> noun_gender;

  void add(const std::string& noun, const std::string& adjective, std::uint64_t count = 1) {
    entries[{noun, adjective}] += count;
  }

  bool operator==(const PairCorpus&) const = default;
};

struct ExtractionDiagnostics {
  std::uint64_t amod_pairs = 0;
  std::uint64_t dropped_not_inanimate = 0;
  std::uint64_t dropped_no_gender = 0;
  std::uint64_t dropped_gender_outside_inventory = 0;
  std::uint64_t ambiguous_gender_observations = 0;
};

struct ExtractionResult {
  PairCorpus corpus;
  ExtractionDiagnostics diagnostics;
};

/// Accumulates amod pairs and per-noun gender votes over sentences. Shards
/// can be collected independently and merged by count addition; finalize()
/// is a deterministic function of the merged counts.
class PairCollector {
 public:
  explicit PairCollector(const InanimateLexicon& lexicon) : lexicon_(&lexicon) {}

  void add(const Sentence& s) {
    std::vector<std::string> lemmas(s.tokens.size());
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      const Token& t = s.tokens[i];
      if (t.upos != "NOUN" && t.upos != "ADJ") continue;
      lemmas[i] = normalize_lemma(t.lemma);
      if (t.upos != "NOUN" || !lexicon_->contains(lemmas[i])) continue;
      const auto it = t.feats.find("Gender");
      if (it == t.feats.end()) continue;
      if (it->second.find(',') != std::string::npos) {
        ++ambiguous_;
        continue;
      }
      ++votes_[lemmas[i]][gender_label(it->second)];
    }
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      const Token& t = s.tokens[i];
      if (t.upos != "ADJ" || t.deprel != "amod" || t.head == 0) continue;
      const auto h = static_cast<std::size_t>(t.head - 1);
      if (s.tokens[h].upos != "NOUN") continue;
      ++amod_;
      if (!lexicon_->contains(lemmas[h])) {
        ++not_inanimate_;
        continue;
      }
      ++pairs_[{lemmas[h], lemmas[i]}];
    }
  }

  void merge(const PairCollector& other) {
    for (const auto& [k, c] : other.pairs_) pairs_[k] += c;
    for (const auto& [noun, tally] : other.votes_) {
      for (const auto& [g, c] : tally) votes_[noun][g] += c;
    }
    amod_ += other.amod_;
    not_inanimate_ += other.not_inanimate_;
    ambiguous_ += other.ambiguous_;
  }

  /// Majority vote per noun; ties go to the label earliest in the inventory,
  /// labels outside the inventory lose ties to labels inside it.
  ExtractionResult finalize(const GenderInventory& inventory) const {
    inventory.validate();
    ExtractionResult out;
    auto& diag = out.diagnostics;
    diag.amod_pairs = amod_;
    diag.dropped_not_inanimate = not_inanimate_;
    diag.ambiguous_gender_observations = ambiguous_;

    std::map<std::string, std::optional<std::string>> decided;
    for (const auto& [noun, tally] : votes_) {
      const std::string* best = nullptr;
      std::uint64_t best_count = 0;
      std::size_t best_rank = 0;
      for (const auto& [label, count] : tally) {
        const std::size_t rank = inventory.index_of(label).value_or(inventory.labels.size());
        if (best == nullptr || count > best_count || (count == best_count && rank < best_rank)) {
          best = &label;
          best_count = count;
          best_rank = rank;
        }
      }
      if (best_rank < inventory.labels.size()) {
        decided[noun] = *best;
      } else {
        decided[noun] = std::nullopt;
      }
    }

    for (const auto& [key, count] : pairs_) {
      const auto it = decided.find(key.first);
      if (it == decided.end()) {
        diag.dropped_no_gender += count;
        continue;
      }
      if (!it->second) {
        diag.dropped_gender_outside_inventory += count;
        continue;
      }
      out.corpus.entries[key] += count;
      out.corpus.noun_gender[key.first] = *it->second;
    }
    return out;
  }

 private:
  const InanimateLexicon* lexicon_;
  std::map<std::pair<std::string, std::string>, std::uint64_t> pairs_;
  std::map<std::string, std::map<std::string, std::uint64_t>> votes_;
  std::uint64_t amod_ = 0;
  std::uint64_t not_inanimate_ = 0;
  std::uint64_t ambiguous_ = 0;
};

inline ExtractionResult extract_pairs(const std::vector<Sentence>& sentences, const InanimateLexicon& lexicon,
                                      const GenderInventory& inventory) {
  PairCollector collector(lexicon);
  for (const Sentence& s : sentences) collector.add(s);
  return collector.finalize(inventory);
}

/// Lowercased lemmas per sentence with every ADJ token removed
/// (or kept, for the adjective-vector corpus).
inline std::vector<std::string> lemma_line(const Sentence& s, bool keep_adjectives = false) {
  std::vector<std::string> out;
  out.reserve(s.tokens.size());
  for (const Token& t : s.tokens) {
    if (!keep_adjectives && t.upos == "ADJ") continue;
    if (t.lemma.empty()) continue;
    out.push_back(normalize_lemma(t.lemma));
  }
  return out;
}

inline std::vector<std::vector<std::string>> strip_adjectives(const std::vector<Sentence>& sentences) {
  std::vector<std::vector<std::string>> stream;
  stream.reserve(sentences.size());
  for (const Sentence& s : sentences) stream.push_back(lemma_line(s));
  return stream;
}

inline void write_lemma_stream(std::ostream& out, const std::vector<std::vector<std::string>>& stream) {
  for (const auto& sentence : stream) {
    for (std::size_t i = 0; i < sentence.size(); ++i) out << (i ? " " : "") << sentence[i];
    out << '\n';
  }
}

inline std::vector<std::vector<std::string>> read_lemma_stream(std::istream& in) {
  std::vector<std::vector<std::string>> stream;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::vector<std::string> sentence;
    for (std::string w; words >> w;) sentence.push_back(std::move(w));
    stream.push_back(std::move(sentence));
  }
  return stream;
}

struct CorpusStats {
  std::size_t noun_types = 0;
  std::size_t adjective_types = 0;
  std::size_t pair_types = 0;
  std::uint64_t pair_tokens = 0;

  bool operator==(const CorpusStats&) const = default;
};

inline CorpusStats corpus_stats(const PairCorpus& pc) {
  std::set<std::string> nouns, adjectives;
  CorpusStats stats;
  for (const auto& [key, count] : pc.entries) {
    nouns.insert(key.first);
    adjectives.insert(key.second);
    stats.pair_tokens += count;
  }
  stats.noun_types = nouns.size();
  stats.adjective_types = adjectives.size();
  stats.pair_types = pc.entries.size();
  return stats;
}

/// `noun<TAB>gender<TAB>adjective<TAB>count`, sorted by (noun, adjective).
inline void write_pairs_tsv(std::ostream& out, const PairCorpus& pc) {
  for (const auto& [key, count] : pc.entries) {
    out << key.first << '\t' << pc.noun_gender.at(key.first) << '\t' << key.second << '\t' << count << '\n';
  }
}

inline PairCorpus read_pairs_tsv(std::istream& in) {
  PairCorpus pc;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = detail::split(line, '\t');
    if (cols.size() != 4) throw ParseError("pairs TSV needs 4 columns", line_no);
    std::uint64_t count = 0;
    const auto [ptr, ec] = std::from_chars(cols[3].data(), cols[3].data() + cols[3].size(), count);
    if (ec != std::errc{} || ptr != cols[3].data() + cols[3].size() || count == 0) {
      throw ParseError("pair count must be a positive integer", line_no);
    }
    const std::string noun(cols[0]);
    const std::string gender(cols[1]);
    const auto [it, inserted] = pc.noun_gender.emplace(noun, gender);
    if (!inserted && it->second != gender) throw ParseError("noun '" + noun + "' has two genders", line_no);
    pc.entries[{noun, std::string(cols[2])}] += count;
  }
  return pc;
}

}  // namespace cgmi::treebank
