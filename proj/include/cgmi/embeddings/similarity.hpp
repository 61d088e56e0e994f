#pragma once

#include <algorithm>
#include <cmath>
#include <charconv>
#include <istream>
#include <numeric>
#include <string>
#include <vector>

#include "cgmi/core/error.hpp"
#include "cgmi/embeddings/vector_table.hpp"
#include "cgmi/treebank/conllu.hpp"

namespace cgmi::embed {

struct SimilarityPair {
  std::string first;
  std::string second;
  double score = 0.0;
};

struct SimilarityReport {
  double rho = 0.0;
  double coverage = 0.0;  ///< kept pairs / all pairs
  std::size_t kept = 0;
  std::size_t total = 0;
};

/// 1-based ranks; tied values share the average of their ranks.
inline std::vector<double> average_ranks(const std::vector<double>& xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DomainError("correlation undefined for constant input");
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(average_ranks(x), average_ranks(y));
}

/// Spearman correlation between human scores and vector cosines over the pairs
/// whose words both have vectors.
inline SimilarityReport evaluate_similarity(const VectorTable& vt, const std::vector<SimilarityPair>& pairs) {
  if (pairs.empty()) throw ConfigError("similarity data is empty");
  std::vector<double> human, model;
  for (const auto& p : pairs) {
    const auto a = vt.find(p.first);
    const auto b = vt.find(p.second);
    if (!a || !b) continue;
    human.push_back(p.score);
    model.push_back(cosine(vt.row(*a), vt.row(*b)));
  }
  if (human.empty()) throw DomainError("no similarity pair is covered by the vectors; rho undefined");
  SimilarityReport r;
  r.kept = human.size();
  r.total = pairs.size();
  r.coverage = static_cast<double>(r.kept) / static_cast<double>(r.total);
  r.rho = spearman(human, model);
  return r;
}

/// TSV `word1<TAB>word2<TAB>score`.
inline std::vector<SimilarityPair> read_similarity_tsv(std::istream& in) {
  std::vector<SimilarityPair> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto cols = treebank::detail::split(line, '\t');
    if (cols.size() != 3) throw ParseError("similarity TSV needs 3 columns", line_no);
    SimilarityPair p{std::string(cols[0]), std::string(cols[1]), 0.0};
    const auto r = std::from_chars(cols[2].data(), cols[2].data() + cols[2].size(), p.score);
    if (r.ec != std::errc{}) throw ParseError("non-numeric similarity score", line_no);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace cgmi::embed
