#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "cgmi/estimators/causal.hpp"
#include "cgmi/model/classifier.hpp"
#include "cgmi/synth/world.hpp"
#include "cgmi/treebank/conllu.hpp"
#include "cgmi/treebank/extract.hpp"

namespace {

using namespace cgmi;
using namespace cgmi::synth;

WorldConfig small(WorldCase c, std::uint64_t seed) {
  WorldConfig cfg;
  cfg.world_case = c;
  cfg.nouns = 8;
  cfg.adjectives = 6;
  cfg.tokens_per_noun = 50;
  cfg.seed = seed;
  return cfg;
}

model::AdjectiveVocab vocab_of(const World& w) {
  std::vector<model::AdjectiveVocab::Item> items;
  for (std::size_t a = 0; a < w.adjective_lemmas.size(); ++a) {
    items.push_back({w.adjective_lemmas[a], w.adjective_vectors[a], 1});
  }
  return model::AdjectiveVocab(w.config.adjective_dim, std::move(items));
}

TEST(World, TablesMatchTheTeacherClassifier) {
  const World w = make_world(small(WorldCase::kFull, 1));
  const auto vocab = vocab_of(w);
  const model::Classifier clf(w.teacher, vocab);
  const auto table = adjective_tables(w);
  for (std::size_t n = 0; n < w.noun_meanings.size(); ++n) {
    for (std::size_t g = 0; g < w.gender_labels.size(); ++g) {
      const auto p = clf.predict(w.noun_meanings[n], g);
      for (std::size_t a = 0; a < vocab.size(); ++a) EXPECT_NEAR(p[a], table[n][g][a], 1e-12);
    }
  }
}

// Property: without an N → G edge, association and intervention coincide.
TEST(World, IndependentGenderHasEqualMiAndMiDo) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const World w = make_world(small(WorldCase::kIndependentGender, seed));
    for (const auto& pg : w.p_gender_given_noun) EXPECT_EQ(pg, w.p_gender_given_noun[0]);
    const auto t = brute_force_truth(w, false);
    EXPECT_NEAR(t.mi, t.mi_do, 1e-12);
    EXPECT_GT(t.mi_do, 0.0);
  }
}

// Property: without a G → A edge, MI_do vanishes while confounded MI need not.
TEST(World, NoGenderEffectHasZeroMiDo) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const World w = make_world(small(WorldCase::kNoGenderEffect, seed));
    EXPECT_EQ(w.gender_effect, 0.0);
    for (const bool realized : {false, true}) {
      const auto t = brute_force_truth(w, realized);
      EXPECT_LT(t.mi_do, 1e-12);
      EXPECT_GT(t.mi, 1e-6);
    }
  }
}

TEST(World, FullCaseHitsTargetAndSeparatesMiFromMiDo) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const World w = make_world(small(WorldCase::kFull, seed));
    const auto t = brute_force_truth(w, true);
    EXPECT_NEAR(t.mi_do, 0.25, 1e-9);
    EXPECT_GT(std::abs(t.mi - t.mi_do), 1e-6);
    EXPECT_GT(w.gender_effect, 0.0);
  }
}

TEST(World, TeacherEstimatorsReproduceRealizedTruth) {
  const World w = make_world(small(WorldCase::kFull, 4));
  const auto vocab = vocab_of(w);
  const model::Classifier clf(w.teacher, vocab);
  std::vector<estimate::NounPoint> nouns;
  for (std::size_t n = 0; n < w.noun_meanings.size(); ++n) nouns.push_back({w.noun_meanings[n], w.realized_gender[n], 1.0});
  const auto t = brute_force_truth(w, true);
  EXPECT_NEAR(estimate::mi_do(clf, nouns, t.p_gender), t.mi_do, 1e-10);
  EXPECT_NEAR(estimate::model_mi(clf, nouns), t.mi, 1e-10);
}

TEST(World, DeterministicForSeed) {
  const World a = make_world(small(WorldCase::kFull, 9));
  const World b = make_world(small(WorldCase::kFull, 9));
  const World c = make_world(small(WorldCase::kFull, 10));
  EXPECT_EQ(a.teacher.weights, b.teacher.weights);
  EXPECT_EQ(a.realized_gender, b.realized_gender);
  EXPECT_NE(a.teacher.weights, c.teacher.weights);
}

TEST(World, ConfigValidation) {
  auto cfg = small(WorldCase::kFull, 1);
  cfg.genders = 4;
  EXPECT_THROW(make_world(cfg), ConfigError);
  cfg = small(WorldCase::kFull, 1);
  cfg.nouns = 1;
  EXPECT_THROW(make_world(cfg), ConfigError);
}

TEST(Treebank, ExtractionRecoversEveryToken) {
  const World w = make_world(small(WorldCase::kFull, 5));
  std::ostringstream os;
  write_treebank(w, os);
  const auto parsed = treebank::parse_conllu(os.str());
  EXPECT_EQ(parsed.skipped_sentences, 0u);
  const treebank::InanimateLexicon lex({w.noun_lemmas.begin(), w.noun_lemmas.end()});
  const auto res = treebank::extract_pairs(parsed.sentences, lex, treebank::GenderInventory::for_language("es"));
  std::map<std::string, std::uint64_t> per_noun;
  for (const auto& [key, count] : res.corpus.entries) per_noun[key.first] += count;
  ASSERT_EQ(per_noun.size(), w.noun_lemmas.size());
  for (std::size_t n = 0; n < w.noun_lemmas.size(); ++n) {
    EXPECT_EQ(per_noun[w.noun_lemmas[n]], w.config.tokens_per_noun);
    EXPECT_EQ(res.corpus.noun_gender.at(w.noun_lemmas[n]), w.gender_labels[w.realized_gender[n]]);
  }
  std::ostringstream again;
  write_treebank(w, again);
  EXPECT_EQ(again.str(), os.str());
}

}  // namespace
