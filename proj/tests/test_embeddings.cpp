#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "cgmi/embeddings/graph_vectors.hpp"
#include "cgmi/embeddings/sgns.hpp"
#include "cgmi/embeddings/similarity.hpp"
#include "cgmi/embeddings/vector_table.hpp"
#include "support.hpp"

namespace {

using namespace cgmi;
using namespace cgmi::embed;

TEST(VectorTable, RejectsBadRows) {
  VectorTable t(2);
  t.add("a", std::vector<double>{1.0, 2.0});
  EXPECT_THROW(t.add("b", std::vector<double>{1.0}), ConfigError);
  EXPECT_THROW(t.add("a", std::vector<double>{1.0, 2.0}), ConfigError);
  EXPECT_THROW(t.add("c", std::vector<double>{1.0, std::nan("")}), ConfigError);
  EXPECT_THROW(t.add("d", std::vector<double>{INFINITY, 0.0}), ConfigError);
  EXPECT_EQ(t.size(), 1u);
}

// Property: text serialization is bit-exact.
TEST(VectorTable, TextRoundTripIsBitExact) {
  Rng rng(1);
  VectorTable t(7);
  for (int i = 0; i < 50; ++i) {
    auto v = testkit::random_vector(rng, 7, std::pow(10.0, static_cast<double>(i % 9) - 4.0));
    v[0] = std::nextafter(v[0], 1.0);
    t.add("tok" + std::to_string(i) + (i % 5 == 0 ? "ü" : ""), v);
  }
  std::ostringstream os;
  write_vectors(os, t);
  std::istringstream in(os.str());
  const auto back = read_vectors(in);
  ASSERT_EQ(back.size(), t.size());
  ASSERT_EQ(back.dim(), t.dim());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(back.token(i), t.token(i));
    for (std::size_t j = 0; j < t.dim(); ++j) EXPECT_EQ(back.row(i)[j], t.row(i)[j]);
  }
}

TEST(VectorTable, ReadRejectsMalformedFiles) {
  std::istringstream empty("");
  EXPECT_THROW(read_vectors(empty), ParseError);
  std::istringstream short_row("1 3\nword 1 2\n");
  EXPECT_THROW(read_vectors(short_row), ParseError);
  std::istringstream bad_header("x 3\n");
  EXPECT_THROW(read_vectors(bad_header), ParseError);
}

TEST(Sgns, PairGradientMatchesCentralDifferences) {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 1 + trial % 6;
    auto input = testkit::random_vector(rng, d);
    auto positive = testkit::random_vector(rng, d);
    std::vector<std::vector<double>> neg(1 + trial % 4);
    for (auto& n : neg) n = testkit::random_vector(rng, d);
    const auto loss = [&] {
      std::vector<std::span<const double>> spans(neg.begin(), neg.end());
      return sgns_pair_loss(input, positive, spans);
    };
    std::vector<std::span<const double>> spans(neg.begin(), neg.end());
    SgnsPairGradient g;
    sgns_pair_loss(input, positive, spans, &g);
    const double h = 1e-6;
    const auto check = [&](std::vector<double>& x, const std::vector<double>& analytic) {
      for (std::size_t j = 0; j < d; ++j) {
        const double keep = x[j];
        x[j] = keep + h;
        const double up = loss();
        x[j] = keep - h;
        const double down = loss();
        x[j] = keep;
        const double fd = (up - down) / (2 * h);
        EXPECT_LE(std::abs(fd - analytic[j]), 1e-4 * std::max(1.0, std::abs(fd)));
      }
    };
    check(input, g.d_input);
    check(positive, g.d_positive);
    for (std::size_t k = 0; k < neg.size(); ++k) check(neg[k], g.d_negatives[k]);
  }
}

TEST(Sgns, LogSigmoidIsStableForLargeArguments) {
  EXPECT_NEAR(log_sigmoid(-800.0), -800.0, 1e-9);
  EXPECT_NEAR(log_sigmoid(800.0), 0.0, 1e-300);
  EXPECT_NEAR(sigmoid(0.0), 0.5, 1e-15);
}

TEST(Sgns, MinCountFiltersRareTokens) {
  const std::vector<std::vector<std::string>> stream = {{"a", "b", "a"}, {"a", "c", "b"}};
  const auto v = build_vocabulary(stream, 2);
  EXPECT_EQ(v.words, (std::vector<std::string>{"a", "b"}));
  SgnsConfig cfg;
  cfg.dim = 4;
  cfg.min_count = 2;
  const auto t = train_sgns(stream, cfg);
  EXPECT_TRUE(t.contains("a"));
  EXPECT_FALSE(t.contains("c"));
  cfg.min_count = 100;
  EXPECT_THROW(train_sgns(stream, cfg), ConfigError);
}

TEST(Sgns, RepeatedSentenceLossDecreases) {
  const std::vector<std::vector<std::string>> stream(200, std::vector<std::string>{"a", "b"});
  SgnsConfig cfg;
  cfg.dim = 10;
  cfg.min_count = 1;
  cfg.negatives = 1;
  cfg.epochs = 5;
  SgnsReport report;
  train_sgns(stream, cfg, &report);
  ASSERT_EQ(report.epoch_loss.size(), 5u);
  EXPECT_LT(report.epoch_loss.back(), report.epoch_loss.front());
}

TEST(Sgns, UnigramSamplerFollowsPowerLaw) {
  const UnigramSampler s({16, 1});
  Rng rng(3);
  std::size_t first = 0;
  const std::size_t n = 200000;
  for (std::size_t i = 0; i < n; ++i) first += s(rng) == 0;
  // 16^0.75 = 8, so p(first) = 8/9
  EXPECT_NEAR(static_cast<double>(first) / n, 8.0 / 9.0, 0.005);
}

TEST(Sgns, ConfigValidation) {
  SgnsConfig cfg;
  cfg.window = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.negatives = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.dim = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

/// Σ_k α^k A^k by repeated naive matrix products, then unit rows.
std::vector<std::vector<double>> naive_relatedness(const std::vector<std::vector<double>>& a, double alpha, int hops) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> term(n, std::vector<double>(n, 0.0)), sum(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) term[i][i] = sum[i][i] = 1.0;
  for (int k = 1; k <= hops; ++k) {
    std::vector<std::vector<double>> next(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l) next[i][j] += alpha * term[i][l] * a[l][j];
    term = next;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) sum[i][j] += term[i][j];
  }
  for (auto& row : sum) {
    double norm = 0.0;
    for (double x : row) norm += x * x;
    for (double& x : row) x /= std::sqrt(norm);
  }
  return sum;
}

TEST(GraphVectors, RelatednessMatchesNaiveSeries) {
  RelationGraph g;
  g.add_edge("a", "b", "hyper");
  g.add_edge("b", "c", "hyper");
  g.add_edge("c", "d", "mero");
  g.add_node("e");
  const Eigen::MatrixXd a = g.adjacency();
  std::vector<std::vector<double>> raw(5, std::vector<double>(5));
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) raw[i][j] = a(i, j);
  EXPECT_EQ(a, a.transpose());
  const auto oracle = naive_relatedness(raw, 0.75, 4);
  const Eigen::MatrixXd m = relatedness_matrix(a);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) EXPECT_NEAR(m(i, j), oracle[i][j], 1e-12);
}

TEST(GraphVectors, PathGraphDotProducts) {
  RelationGraph g;
  g.add_edge("a", "b", "syn");
  g.add_edge("b", "c", "syn");
  const auto t = build_graph_vectors(g, 2);
  EXPECT_GT(dot(t.row("a"), t.row("b")), dot(t.row("a"), t.row("c")));

  // rank-2 Gram matrix equals the top-2 eigen part of M·Mᵀ
  const Eigen::MatrixXd m = relatedness_matrix(g.adjacency());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m * m.transpose());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(3, 3);
  for (int k = 1; k <= 2; ++k) {
    gram += eig.eigenvalues()(k) * eig.eigenvectors().col(k) * eig.eigenvectors().col(k).transpose();
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(dot(t.row(static_cast<std::size_t>(i)), t.row(static_cast<std::size_t>(j))), gram(i, j), 1e-10);
}

TEST(GraphVectors, NoEdgesGivesEqualCosines) {
  RelationGraph g;
  for (const char* w : {"p", "q", "r", "s"}) g.add_node(w);
  const auto t = build_graph_vectors(g, 4);
  EXPECT_EQ(t.metadata.isolated_nodes.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) EXPECT_NEAR(cosine(t.row(i), t.row(j)), 0.0, 1e-12);
}

TEST(GraphVectors, SingleNode) {
  RelationGraph g;
  g.add_node("x");
  const auto t = build_graph_vectors(g, 1);
  ASSERT_EQ(t.dim(), 1u);
  EXPECT_NEAR(std::abs(t.row("x")[0]), 1.0, 1e-12);
  EXPECT_THROW(build_graph_vectors(g, 2), ConfigError);
}

// Property: permuting node insertion order leaves pairwise cosines unchanged.
TEST(GraphVectors, CosinesInvariantToNodeOrder) {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::string> words;
    for (int i = 0; i < 12; ++i) words.push_back("w" + std::to_string(i));
    std::vector<std::pair<int, int>> edges;
    for (int e = 0; e < 18; ++e) {
      const int a = static_cast<int>(rng() % 12), b = static_cast<int>(rng() % 12);
      if (a != b) edges.emplace_back(a, b);
    }
    const auto build = [&](const std::vector<int>& order) {
      RelationGraph g;
      for (int i : order) g.add_node(words[static_cast<std::size_t>(i)]);
      for (auto [a, b] : edges) g.add_edge(words[static_cast<std::size_t>(a)], words[static_cast<std::size_t>(b)], "r");
      return build_graph_vectors(g, 12);
    };
    std::vector<int> order(12);
    std::iota(order.begin(), order.end(), 0);
    const auto base = build(order);
    std::shuffle(order.begin(), order.end(), rng);
    const auto perm = build(order);
    for (const auto& a : words)
      for (const auto& b : words) EXPECT_NEAR(cosine(base.row(a), base.row(b)), cosine(perm.row(a), perm.row(b)), 1e-8);
  }
}

TEST(GraphVectors, ReadTsv) {
  std::istringstream in("# comment\na\thypernym\tb\nlonely\n");
  const auto g = RelationGraph::read_tsv(in);
  EXPECT_EQ(g.size(), 3u);
  std::istringstream bad("a\tb\n");
  EXPECT_THROW(RelationGraph::read_tsv(bad), ParseError);
}

TEST(Spearman, AverageRanksForTies) {
  EXPECT_EQ(average_ranks({10, 20, 20, 30}), (std::vector<double>{1, 2.5, 2.5, 4}));
  EXPECT_EQ(average_ranks({3, 3, 3}), (std::vector<double>{2, 2, 2}));
}

VectorTable angle_table(const std::vector<double>& angles) {
  VectorTable t(2);
  t.add("anchor", std::vector<double>{1.0, 0.0});
  for (std::size_t i = 0; i < angles.size(); ++i) {
    t.add("w" + std::to_string(i), std::vector<double>{std::cos(angles[i]), std::sin(angles[i])});
  }
  return t;
}

TEST(EvaluateSimilarity, MonotoneAndReversed) {
  const auto t = angle_table({0.1, 0.5, 1.0, 2.0});
  std::vector<SimilarityPair> pairs;
  for (int i = 0; i < 4; ++i) pairs.push_back({"anchor", "w" + std::to_string(i), 10.0 - i});
  auto r = evaluate_similarity(t, pairs);
  EXPECT_NEAR(r.rho, 1.0, 1e-12);
  EXPECT_EQ(r.coverage, 1.0);
  for (auto& p : pairs) p.score = -p.score;
  EXPECT_NEAR(evaluate_similarity(t, pairs).rho, -1.0, 1e-12);
}

TEST(EvaluateSimilarity, CoverageAndUndefinedRho) {
  const auto t = angle_table({0.1, 0.5, 1.0});
  std::vector<SimilarityPair> pairs = {
      {"anchor", "w0", 3}, {"anchor", "w1", 2}, {"anchor", "w2", 1}, {"anchor", "missing", 5}};
  const auto r = evaluate_similarity(t, pairs);
  EXPECT_EQ(r.kept, 3u);
  EXPECT_DOUBLE_EQ(r.coverage, 0.75);
  EXPECT_THROW(evaluate_similarity(t, {{"x", "y", 1.0}}), DomainError);
  EXPECT_THROW(evaluate_similarity(t, {}), ConfigError);
}

// Property: rho is unchanged by strictly increasing transforms of the scores.
TEST(EvaluateSimilarity, InvariantUnderMonotoneTransforms) {
  Rng rng(6);
  std::uniform_real_distribution<double> ang(0.0, 3.0), score(0.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> angles(10);
    for (double& a : angles) a = ang(rng);
    const auto t = angle_table(angles);
    std::vector<SimilarityPair> pairs, transformed;
    for (int i = 0; i < 10; ++i) {
      const double s = std::round(score(rng));  // rounding creates ties
      pairs.push_back({"anchor", "w" + std::to_string(i), s});
      transformed.push_back({"anchor", "w" + std::to_string(i), std::exp(s) + 3.0 * s});
    }
    EXPECT_NEAR(evaluate_similarity(t, pairs).rho, evaluate_similarity(t, transformed).rho, 1e-12);
  }
}

TEST(EvaluateSimilarity, ReadTsv) {
  std::istringstream in("a\tb\t1.5\n# c\nc\td\t2\n");
  const auto p = read_similarity_tsv(in);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[1].score, 2.0);
  std::istringstream bad("a\tb\tx\n");
  EXPECT_THROW(read_similarity_tsv(bad), ParseError);
}

}  // namespace
