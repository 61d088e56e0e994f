#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "cgmi/core/error.hpp"
#include "cgmi/core/random.hpp"
#include "cgmi/model/classifier.hpp"

namespace cgmi::synth {

/// Which edges of N → G, N → A, G → A the world has.
enum class WorldCase {
  kIndependentGender = 1,  ///< p(g | n) = p(g): no N → G edge
  kNoGenderEffect = 2,     ///< p(a | n, g) ignores g: no G → A edge
  kFull = 3,               ///< all edges
};

struct WorldConfig {
  WorldCase world_case = WorldCase::kFull;
  std::size_t nouns = 20;
  std::size_t adjectives = 20;
  std::size_t genders = 2;
  std::size_t noun_dim = 3;
  std::size_t adjective_dim = 4;
  std::size_t hidden = 8;
  std::uint64_t tokens_per_noun = 2000;
  /// Target MI_do in bits (realized genders); unused without a G → A edge.
  double target_mi_do = 0.25;
  /// Inverse temperature of p(g | n) = softmax(β U n) for worlds with an N → G edge.
  double gender_sharpness = 0.5;
  /// Scale of the output weights; larger values give peakier adjective distributions.
  double output_scale = 1.0;
  std::size_t max_adjectives_per_sentence = 8;
  std::uint64_t seed = 1;

  void validate() const {
    if (nouns < 2 || adjectives < 2) throw ConfigError("synthetic world needs >= 2 nouns and >= 2 adjectives");
    if (genders < 2 || genders > 3) throw ConfigError("synthetic world supports 2 or 3 genders");
    if (nouns < 2 * genders) throw ConfigError("synthetic world needs at least two nouns per gender");
    if (noun_dim == 0 || adjective_dim == 0 || hidden == 0) throw ConfigError("synthetic dims must be positive");
    if (tokens_per_noun == 0 || max_adjectives_per_sentence == 0) throw ConfigError("synthetic corpus is empty");
    if (!(target_mi_do > 0.0)) throw ConfigError("target MI_do must be positive");
  }
};

/// A finite instance of the generative model: uniform p(n) over noun
/// meanings, p(g | n), and a teacher network for p(a | n, g).
struct World {
  WorldConfig config;
  std::vector<std::string> gender_labels;
  std::vector<std::string> noun_lemmas;
  std::vector<std::vector<double>> noun_meanings;
  std::vector<std::string> adjective_lemmas;
  std::vector<std::vector<double>> adjective_vectors;
  model::ClassifierParams teacher;
  double gender_effect = 0.0;  ///< scale of the gender-sensitive units' output weights
  std::vector<double> p_noun;
  std::vector<std::vector<double>> p_gender_given_noun;
  std::vector<std::size_t> realized_gender;  ///< g_n drawn once per noun
};

struct GroundTruth {
  double mi = 0.0;
  double mi_do = 0.0;
  std::vector<double> p_gender;
};

inline const char* ud_gender_value(const std::string& label) {
  if (label == "MSC") return "Masc";
  if (label == "FEM") return "Fem";
  if (label == "NEU") return "Neut";
  return "X";
}

/// p(a | n, g) for every noun and gender, evaluated by direct summation of
/// the teacher formula: [noun][gender][adjective].
inline std::vector<std::vector<std::vector<double>>> adjective_tables(const World& w) {
  const auto& p = w.teacher;
  const std::size_t N = w.noun_meanings.size(), G = w.gender_labels.size(), A = w.adjective_lemmas.size();
  std::vector<std::vector<std::vector<double>>> out(N, std::vector<std::vector<double>>(G, std::vector<double>(A)));
  std::vector<double> x(p.input_dim());
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t g = 0; g < G; ++g) {
      auto& row = out[n][g];
      for (std::size_t a = 0; a < A; ++a) {
        std::fill(x.begin(), x.end(), 0.0);
        std::copy(w.adjective_vectors[a].begin(), w.adjective_vectors[a].end(), x.begin());
        std::copy(w.noun_meanings[n].begin(), w.noun_meanings[n].end(), x.begin() + static_cast<long>(p.adjective_dim));
        x[p.adjective_dim + p.noun_dim + g] = 1.0;
        double score = 0.0;
        for (std::size_t h = 0; h < p.hidden; ++h) {
          double pre = 0.0;
          for (std::size_t i = 0; i < x.size(); ++i) pre += p.W(h, i) * x[i];
          score += p.w(h) * (p.activation == model::Activation::kTanh ? std::tanh(pre) : std::max(0.0, pre));
        }
        row[a] = score;
      }
      const double mx = *std::max_element(row.begin(), row.end());
      double z = 0.0;
      for (double& s : row) z += (s = std::exp(s - mx));
      for (double& s : row) s /= z;
    }
  }
  return out;
}

/// Exact MI(A; G) and MI_do(A; G) of the world by exhaustive summation over
/// nouns, genders, and adjectives. `realized` replaces p(g | n) by the point
/// mass on each noun's drawn gender, i.e. the world the corpus was sampled from.
inline GroundTruth brute_force_truth(const World& w, bool realized) {
  const auto table = adjective_tables(w);
  const std::size_t N = w.noun_meanings.size(), G = w.gender_labels.size(), A = w.adjective_lemmas.size();
  const auto pg_given_n = [&](std::size_t n, std::size_t g) {
    return realized ? (w.realized_gender[n] == g ? 1.0 : 0.0) : w.p_gender_given_noun[n][g];
  };
  GroundTruth t;
  t.p_gender.assign(G, 0.0);
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t g = 0; g < G; ++g) t.p_gender[g] += w.p_noun[n] * pg_given_n(n, g);
  }
  const auto mi_of = [&](const std::vector<std::vector<double>>& joint) {
    std::vector<double> pa(A, 0.0), pg(G, 0.0);
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t g = 0; g < G; ++g) {
        pa[a] += joint[a][g];
        pg[g] += joint[a][g];
      }
    }
    double mi = 0.0;
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t g = 0; g < G; ++g) {
        if (joint[a][g] > 0.0) mi += joint[a][g] * std::log2(joint[a][g] / (pa[a] * pg[g]));
      }
    }
    return mi;
  };
  std::vector<std::vector<double>> joint(A, std::vector<double>(G, 0.0)), joint_do(A, std::vector<double>(G, 0.0));
  for (std::size_t a = 0; a < A; ++a) {
    for (std::size_t g = 0; g < G; ++g) {
      double obs = 0.0, backdoor = 0.0;
      for (std::size_t n = 0; n < N; ++n) {
        obs += w.p_noun[n] * pg_given_n(n, g) * table[n][g][a];
        backdoor += w.p_noun[n] * table[n][g][a];
      }
      joint[a][g] = obs;
      joint_do[a][g] = backdoor * t.p_gender[g];
    }
  }
  t.mi = mi_of(joint);
  t.mi_do = mi_of(joint_do);
  return t;
}

namespace detail {

/// Gender-sensitive units are the upper half of the hidden layer; their
/// output weights carry the planted effect.
inline std::size_t first_gender_unit(const model::ClassifierParams& p) { return p.hidden - std::max<std::size_t>(1, p.hidden / 2); }

inline void set_gender_effect(World& w, const std::vector<double>& base_output, double scale) {
  auto& p = w.teacher;
  for (std::size_t h = first_gender_unit(p); h < p.hidden; ++h) p.w(h) = scale * base_output[h];
  w.gender_effect = scale;
}

}  // namespace detail

namespace detail {

inline constexpr double kMaxGenderEffect = 16.0;

inline std::optional<World> try_make_world(const WorldConfig& cfg, std::uint64_t attempt) {
  World w;
  w.config = cfg;
  w.gender_labels = cfg.genders == 2 ? std::vector<std::string>{"FEM", "MSC"}
                                     : std::vector<std::string>{"FEM", "MSC", "NEU"};
  Rng rng(derive_seed(cfg.seed, "synth", {attempt}));
  std::normal_distribution<double> normal(0.0, 1.0);
  char name[32];
  for (std::size_t n = 0; n < cfg.nouns; ++n) {
    std::snprintf(name, sizeof(name), "noun%02zu", n);
    w.noun_lemmas.push_back(name);
    std::vector<double> v(cfg.noun_dim);
    for (double& x : v) x = normal(rng);
    w.noun_meanings.push_back(std::move(v));
  }
  for (std::size_t a = 0; a < cfg.adjectives; ++a) {
    std::snprintf(name, sizeof(name), "adj%02zu", a);
    w.adjective_lemmas.push_back(name);
    std::vector<double> v(cfg.adjective_dim);
    for (double& x : v) x = normal(rng);
    w.adjective_vectors.push_back(std::move(v));
  }

  auto& p = w.teacher;
  p = model::ClassifierParams{cfg.hidden, cfg.adjective_dim, cfg.noun_dim, cfg.genders, model::Activation::kTanh, {}};
  p.weights.assign(p.size(), 0.0);
  const std::size_t gender_from = first_gender_unit(p);
  const double in_scale = 1.5 / std::sqrt(static_cast<double>(cfg.adjective_dim + cfg.noun_dim));
  std::vector<double> base_output(cfg.hidden);
  for (std::size_t h = 0; h < cfg.hidden; ++h) {
    // gender-sensitive units read the adjective and the gender only
    for (std::size_t i = 0; i < cfg.adjective_dim; ++i) p.W(h, i) = in_scale * normal(rng);
    for (std::size_t i = cfg.adjective_dim; i < cfg.adjective_dim + cfg.noun_dim; ++i) {
      p.W(h, i) = h >= gender_from ? 0.0 : in_scale * normal(rng);
    }
    for (std::size_t g = 0; g < cfg.genders; ++g) {
      p.W(h, cfg.adjective_dim + cfg.noun_dim + g) = h >= gender_from ? 1.5 * normal(rng) : 0.0;
    }
    base_output[h] = cfg.output_scale * normal(rng);
    p.w(h) = base_output[h];
  }

  w.p_noun.assign(cfg.nouns, 1.0 / static_cast<double>(cfg.nouns));
  std::vector<std::vector<double>> u(cfg.genders, std::vector<double>(cfg.noun_dim));
  for (auto& row : u) {
    for (double& x : row) x = normal(rng);
  }
  for (std::size_t n = 0; n < cfg.nouns; ++n) {
    std::vector<double> pg(cfg.genders, 1.0 / static_cast<double>(cfg.genders));
    if (cfg.world_case != WorldCase::kIndependentGender) {
      double mx = -1e300;
      for (std::size_t g = 0; g < cfg.genders; ++g) {
        double s = 0.0;
        for (std::size_t j = 0; j < cfg.noun_dim; ++j) s += u[g][j] * w.noun_meanings[n][j];
        pg[g] = cfg.gender_sharpness * s;
        mx = std::max(mx, pg[g]);
      }
      double z = 0.0;
      for (double& x : pg) z += (x = std::exp(x - mx));
      for (double& x : pg) x /= z;
    }
    w.p_gender_given_noun.push_back(std::move(pg));
  }

  // every gender realized on at least two nouns
  for (int draw = 0;; ++draw) {
    if (draw == 1000) return std::nullopt;
    w.realized_gender.clear();
    std::vector<std::size_t> counts(cfg.genders, 0);
    for (std::size_t n = 0; n < cfg.nouns; ++n) {
      std::discrete_distribution<std::size_t> d(w.p_gender_given_noun[n].begin(), w.p_gender_given_noun[n].end());
      w.realized_gender.push_back(d(rng));
      ++counts[w.realized_gender.back()];
    }
    if (*std::min_element(counts.begin(), counts.end()) >= 2) break;
  }

  if (cfg.world_case == WorldCase::kNoGenderEffect) {
    set_gender_effect(w, base_output, 0.0);
    return w;
  }
  const auto mi_do_at = [&](double scale) {
    set_gender_effect(w, base_output, scale);
    return brute_force_truth(w, true).mi_do;
  };
  // MI_do(0) = 0 < target; double until the target is bracketed, then bisect
  double lo = 0.0, hi = 1.0;
  while (mi_do_at(hi) < cfg.target_mi_do) {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxGenderEffect) return std::nullopt;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mi_do_at(mid) < cfg.target_mi_do ? lo : hi) = mid;
  }
  set_gender_effect(w, base_output, hi);
  return w;
}

}  // namespace detail

/// Builds a world for the configured case. The teacher's gender-sensitive
/// hidden units enter the scores through output weights scaled by a common
/// factor; with a G → A edge the factor is found by bisection so that the
/// realized MI_do hits the target, and without one it is zero. Teachers are
/// redrawn until the target is reached with a moderate factor (very large
/// ones make p(a | n, g) nearly deterministic).
inline World make_world(const WorldConfig& cfg) {
  cfg.validate();
  for (std::uint64_t attempt = 0; attempt < 200; ++attempt) {
    if (auto w = detail::try_make_world(cfg, attempt)) return std::move(*w);
  }
  throw ConfigError("no synthetic world reaches the target MI_do; lower target_mi_do or gender_sharpness");
}

/// Samples the world's corpus as CoNLL-U: every noun gets exactly
/// tokens_per_noun amod adjectives drawn from p(a | n, g_n), grouped into
/// sentences of 1..max_adjectives_per_sentence modifiers.
inline void write_treebank(const World& w, std::ostream& out) {
  const auto table = adjective_tables(w);
  Rng rng(derive_seed(w.config.seed, "synth-corpus"));
  std::uniform_int_distribution<std::size_t> group(1, w.config.max_adjectives_per_sentence);
  std::size_t sent_id = 0;
  for (std::size_t n = 0; n < w.noun_lemmas.size(); ++n) {
    const std::size_t g = w.realized_gender[n];
    std::discrete_distribution<std::size_t> draw(table[n][g].begin(), table[n][g].end());
    std::uint64_t remaining = w.config.tokens_per_noun;
    while (remaining > 0) {
      const std::size_t k = std::min<std::uint64_t>(remaining, group(rng));
      remaining -= k;
      out << "# sent_id = synth-" << ++sent_id << '\n';
      const std::size_t noun_index = k + 1;
      for (std::size_t i = 0; i < k; ++i) {
        const std::string& adj = w.adjective_lemmas[draw(rng)];
        out << i + 1 << '\t' << adj << '\t' << adj << "\tADJ\t_\t_\t" << noun_index << "\tamod\t_\t_\n";
      }
      const std::string& noun = w.noun_lemmas[n];
      out << noun_index << '\t' << noun << '\t' << noun << "\tNOUN\t_\tGender="
          << ud_gender_value(w.gender_labels[g]) << "|Number=Sing\t0\troot\t_\t_\n";
      out << noun_index + 1 << "\t.\t.\tPUNCT\t_\t_\t" << noun_index << "\tpunct\t_\t_\n\n";
    }
  }
}

}  // namespace cgmi::synth
