#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cgmi/core/error.hpp"
#include "cgmi/core/parallel.hpp"
#include "cgmi/core/random.hpp"
#include "cgmi/embeddings/vector_table.hpp"

namespace cgmi::embed {

struct SgnsConfig {
  std::size_t dim = 200;
  std::size_t window = 5;
  std::uint64_t min_count = 5;
  std::size_t negatives = 10;
  std::size_t epochs = 5;
  double lr_start = 0.025;
  double lr_end = 1e-4;
  /// Frequent-word subsampling threshold; 0 disables it.
  double subsample = 0.0;
  std::uint64_t seed = 1;
  /// 1 = deterministic single-threaded mode. >1 = hogwild updates.
  std::size_t threads = 1;

  void validate() const {
    if (dim == 0) throw ConfigError("sgns dim must be positive");
    if (window == 0) throw ConfigError("sgns window must be >= 1");
    if (negatives == 0) throw ConfigError("sgns negatives must be >= 1");
    if (min_count == 0) throw ConfigError("sgns min_count must be >= 1");
    if (threads == 0) throw ConfigError("sgns threads must be >= 1");
  }

  std::string hash() const {
    std::ostringstream os;
    os << "sgns:" << dim << ':' << window << ':' << min_count << ':' << negatives << ':' << epochs << ':'
       << lr_start << ':' << lr_end << ':' << subsample << ':' << seed;
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(os.str())));
    return buf;
  }
};

struct SgnsReport {
  std::vector<double> epoch_loss;  ///< mean per-pair loss of each epoch
  std::size_t vocab_size = 0;
  std::uint64_t training_words = 0;
};

struct Vocabulary {
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  std::unordered_map<std::string, std::uint32_t> index;
};

/// Words with count >= min_count, by descending count then lexicographically.
inline Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& stream, std::uint64_t min_count) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& sentence : stream) {
    for (const auto& w : sentence) ++counts[w];
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [w, c] : counts) {
    if (c >= min_count) kept.emplace_back(w, c);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary v;
  for (auto& [w, c] : kept) {
    v.index.emplace(w, static_cast<std::uint32_t>(v.words.size()));
    v.words.push_back(w);
    v.counts.push_back(c);
  }
  return v;
}

/// Draws word ids from the unigram distribution raised to the 0.75 power.
class UnigramSampler {
 public:
  explicit UnigramSampler(const std::vector<std::uint64_t>& counts, double power = 0.75) {
    cumulative_.reserve(counts.size());
    double total = 0.0;
    for (std::uint64_t c : counts) {
      total += std::pow(static_cast<double>(c), power);
      cumulative_.push_back(total);
    }
  }

  std::uint32_t operator()(Rng& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, cumulative_.back())(rng);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return static_cast<std::uint32_t>(std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1));
  }

 private:
  std::vector<double> cumulative_;
};

inline double log_sigmoid(double x) noexcept {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

inline double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct SgnsPairGradient {
  std::vector<double> d_input;
  std::vector<double> d_positive;
  std::vector<std::vector<double>> d_negatives;
};

/// Loss of one (input, positive context) pair with noise contexts:
///   -log σ(pos·in) - Σ_k log σ(-neg_k·in)
/// Fills the gradient with respect to every vector involved when requested.
inline double sgns_pair_loss(std::span<const double> input, std::span<const double> positive,
                             const std::vector<std::span<const double>>& negatives,
                             SgnsPairGradient* grad = nullptr) {
  const std::size_t d = input.size();
  if (grad) {
    grad->d_input.assign(d, 0.0);
    grad->d_positive.assign(d, 0.0);
    grad->d_negatives.assign(negatives.size(), std::vector<double>(d, 0.0));
  }
  double loss = 0.0;
  const auto term = [&](std::span<const double> out, double label, std::vector<double>* d_out) {
    const double f = dot(input, out);
    loss -= label > 0.5 ? log_sigmoid(f) : log_sigmoid(-f);
    if (!grad) return;
    const double coef = sigmoid(f) - label;
    for (std::size_t j = 0; j < d; ++j) {
      grad->d_input[j] += coef * out[j];
      (*d_out)[j] += coef * input[j];
    }
  };
  term(positive, 1.0, grad ? &grad->d_positive : nullptr);
  for (std::size_t k = 0; k < negatives.size(); ++k) term(negatives[k], 0.0, grad ? &grad->d_negatives[k] : nullptr);
  return loss;
}

namespace detail {

/// In-place SGD step for one pair; same gradient as sgns_pair_loss. Returns the loss.
inline double sgns_update(double* in, double* const* outs, const double* labels, std::size_t n_outs, std::size_t d,
                          double lr, double* scratch) {
  std::fill(scratch, scratch + d, 0.0);
  double loss = 0.0;
  for (std::size_t t = 0; t < n_outs; ++t) {
    double* out = outs[t];
    double f = 0.0;
    for (std::size_t j = 0; j < d; ++j) f += in[j] * out[j];
    loss -= labels[t] > 0.5 ? log_sigmoid(f) : log_sigmoid(-f);
    const double g = -lr * (sigmoid(f) - labels[t]);
    for (std::size_t j = 0; j < d; ++j) {
      scratch[j] += g * out[j];
      out[j] += g * in[j];
    }
  }
  for (std::size_t j = 0; j < d; ++j) in[j] += scratch[j];
  return loss;
}

}  // namespace detail

/// Trains skip-gram with negative sampling on a sentence-delimited lemma
/// stream and returns the input vectors of every word with count >= min_count.
/// Windows are symmetric, fixed-width, and never cross sentence boundaries.
/// threads > 1 runs lock-free hogwild updates over sentence shards; outputs
/// then depend on scheduling.
inline VectorTable train_sgns(const std::vector<std::vector<std::string>>& stream, const SgnsConfig& cfg,
                              SgnsReport* report = nullptr) {
  cfg.validate();
  const Vocabulary vocab = build_vocabulary(stream, cfg.min_count);
  if (vocab.words.empty()) throw ConfigError("empty vocabulary after min_count filter");
  const std::size_t V = vocab.words.size();
  const std::size_t d = cfg.dim;

  std::vector<std::vector<std::uint32_t>> corpus;
  corpus.reserve(stream.size());
  std::uint64_t total_words = 0;
  for (const auto& sentence : stream) {
    std::vector<std::uint32_t> ids;
    for (const auto& w : sentence) {
      const auto it = vocab.index.find(w);
      if (it != vocab.index.end()) ids.push_back(it->second);
    }
    total_words += ids.size();
    corpus.push_back(std::move(ids));
  }

  std::vector<double> in_vecs(V * d), out_vecs(V * d, 0.0);
  {
    Rng init(derive_seed(cfg.seed, "embedding-init"));
    std::uniform_real_distribution<double> u(-0.5 / static_cast<double>(d), 0.5 / static_cast<double>(d));
    for (double& x : in_vecs) x = u(init);
  }
  std::vector<double> keep_prob(V, 1.0);
  if (cfg.subsample > 0.0) {
    const double threshold = cfg.subsample * static_cast<double>(total_words);
    for (std::size_t i = 0; i < V; ++i) {
      const double f = static_cast<double>(vocab.counts[i]);
      keep_prob[i] = std::min(1.0, (std::sqrt(f / threshold) + 1.0) * threshold / f);
    }
  }
  const UnigramSampler sampler(vocab.counts);
  const double planned = static_cast<double>(std::max<std::uint64_t>(1, total_words * cfg.epochs));
  std::atomic<std::uint64_t> processed{0};

  SgnsReport local_report;
  local_report.vocab_size = V;
  local_report.training_words = total_words;

  const std::size_t threads = std::min(cfg.threads, std::max<std::size_t>(1, corpus.size()));
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<double> shard_loss(threads, 0.0);
    std::vector<std::uint64_t> shard_pairs(threads, 0);
    parallel_for(threads, threads, [&](std::size_t shard) {
      Rng rng(derive_seed(cfg.seed, "embedding", {epoch, shard}));
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      std::vector<double*> outs(cfg.negatives + 1);
      std::vector<double> labels(cfg.negatives + 1, 0.0);
      labels[0] = 1.0;
      std::vector<double> scratch(d);
      std::vector<std::uint32_t> kept;
      const std::size_t begin = corpus.size() * shard / threads;
      const std::size_t end = corpus.size() * (shard + 1) / threads;
      for (std::size_t s = begin; s < end; ++s) {
        const auto& ids = corpus[s];
        kept.clear();
        for (std::uint32_t id : ids) {
          if (keep_prob[id] >= 1.0 || coin(rng) < keep_prob[id]) kept.push_back(id);
        }
        const double progress = static_cast<double>(processed.fetch_add(ids.size())) / planned;
        const double lr = std::max(cfg.lr_end, cfg.lr_start - (cfg.lr_start - cfg.lr_end) * progress);
        for (std::size_t pos = 0; pos < kept.size(); ++pos) {
          const std::size_t lo = pos >= cfg.window ? pos - cfg.window : 0;
          const std::size_t hi = std::min(kept.size() - 1, pos + cfg.window);
          for (std::size_t c = lo; c <= hi; ++c) {
            if (c == pos) continue;
            // the context word's input vector predicts the centre word
            const std::uint32_t target = kept[pos];
            outs[0] = out_vecs.data() + static_cast<std::size_t>(target) * d;
            std::size_t n = 1;
            for (std::size_t k = 0; k < cfg.negatives; ++k) {
              const std::uint32_t neg = sampler(rng);
              if (neg == target) continue;
              outs[n++] = out_vecs.data() + static_cast<std::size_t>(neg) * d;
            }
            shard_loss[shard] += detail::sgns_update(in_vecs.data() + static_cast<std::size_t>(kept[c]) * d,
                                                     outs.data(), labels.data(), n, d, lr, scratch.data());
            ++shard_pairs[shard];
          }
        }
      }
    });
    double loss = 0.0;
    std::uint64_t pairs = 0;
    for (std::size_t t = 0; t < threads; ++t) {
      loss += shard_loss[t];
      pairs += shard_pairs[t];
    }
    const double mean = pairs ? loss / static_cast<double>(pairs) : 0.0;
    if (!std::isfinite(mean)) {
      throw TrainingError("SGNS loss became non-finite in epoch " + std::to_string(epoch + 1));
    }
    local_report.epoch_loss.push_back(mean);
  }

  VectorTable table(d);
  for (std::size_t i = 0; i < V; ++i) table.add(vocab.words[i], std::span<const double>(in_vecs.data() + i * d, d));
  table.metadata.source = VectorSource::kSgns;
  table.metadata.config_hash = cfg.hash();
  if (report) *report = std::move(local_report);
  return table;
}

}  // namespace cgmi::embed
