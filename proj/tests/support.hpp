#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cgmi/core/random.hpp"
#include "cgmi/model/classifier.hpp"
#include "cgmi/model/types.hpp"

namespace cgmi::testkit {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("cgmi-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::vector<double> random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

/// Random probability vector; some entries may be exactly zero.
inline std::vector<double> random_simplex(Rng& rng, std::size_t n, bool allow_zeros = false) {
  std::exponential_distribution<double> e(1.0);
  std::bernoulli_distribution zero(allow_zeros ? 0.2 : 0.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (double& x : p) s += (x = zero(rng) ? 0.0 : e(rng));
  if (s == 0.0) {
    p[0] = s = 1.0;
  }
  for (double& x : p) x /= s;
  return p;
}

inline model::AdjectiveVocab random_vocab(Rng& rng, std::size_t n, std::size_t dim) {
  std::vector<model::AdjectiveVocab::Item> items;
  for (std::size_t i = 0; i < n; ++i) items.push_back({"adj" + std::to_string(i), random_vector(rng, dim), 1});
  return model::AdjectiveVocab(dim, std::move(items));
}

inline model::ClassifierParams random_params(Rng& rng, std::size_t hidden, std::size_t adim, std::size_t ndim,
                                             std::size_t genders,
                                             model::Activation act = model::Activation::kTanh) {
  model::ClassifierParams p{hidden, adim, ndim, genders, act, {}};
  p.weights = random_vector(rng, p.size());
  return p;
}

/// Dataset with random meanings, genders and adjective counts.
inline model::Dataset random_dataset(Rng& rng, std::size_t nouns, std::size_t ndim, std::size_t genders,
                                     std::size_t vocab_size, std::uint64_t max_count = 5) {
  model::Dataset d;
  for (std::size_t g = 0; g < genders; ++g) d.genders.push_back("G" + std::to_string(g));
  d.noun_dim = ndim;
  std::uniform_int_distribution<std::size_t> gender(0, genders - 1);
  std::uniform_int_distribution<std::uint64_t> count(0, max_count);
  for (std::size_t n = 0; n < nouns; ++n) {
    model::DatasetEntry e;
    e.noun = {"noun" + std::to_string(n), gender(rng), random_vector(rng, ndim), 0.0};
    for (std::uint32_t a = 0; a < vocab_size; ++a) {
      if (const auto c = count(rng); c > 0) e.adjectives.push_back({a, c});
    }
    if (e.adjectives.empty()) e.adjectives.push_back({0, 1});
    e.noun.weight = static_cast<double>(e.tokens());
    d.entries.push_back(std::move(e));
  }
  return d;
}

}  // namespace cgmi::testkit
