#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "cgmi/core/error.hpp"
#include "cgmi/embeddings/vector_table.hpp"
#include "cgmi/treebank/conllu.hpp"

namespace cgmi::embed {

/// Undirected word graph built from lexical-database relations.
class RelationGraph {
 public:
  struct Edge {
    std::size_t a;
    std::size_t b;
    std::string relation;
  };

  std::size_t add_node(const std::string& lemma) {
    const auto [it, inserted] = index_.emplace(lemma, nodes_.size());
    if (inserted) nodes_.push_back(lemma);
    return it->second;
  }

  void add_edge(const std::string& a, const std::string& b, std::string relation) {
    const std::size_t i = add_node(a);
    const std::size_t j = add_node(b);
    edges_.push_back({i, j, std::move(relation)});
  }

  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Symmetric 0/1 adjacency; self-relations are ignored.
  Eigen::MatrixXd adjacency() const {
    const auto n = static_cast<Eigen::Index>(nodes_.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const Edge& e : edges_) {
      if (e.a == e.b) continue;
      a(static_cast<Eigen::Index>(e.a), static_cast<Eigen::Index>(e.b)) = 1.0;
      a(static_cast<Eigen::Index>(e.b), static_cast<Eigen::Index>(e.a)) = 1.0;
    }
    return a;
  }

  /// TSV `lemma1<TAB>relation<TAB>lemma2`. A line with a single column adds an isolated node.
  static RelationGraph read_tsv(std::istream& in) {
    RelationGraph g;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      const auto cols = treebank::detail::split(line, '\t');
      if (cols.size() == 1) {
        g.add_node(std::string(cols[0]));
        continue;
      }
      if (cols.size() != 3) throw ParseError("relation TSV needs 3 columns", line_no);
      g.add_edge(std::string(cols[0]), std::string(cols[2]), std::string(cols[1]));
    }
    return g;
  }

 private:
  std::vector<std::string> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Edge> edges_;
};

struct GraphVectorConfig {
  double alpha = 0.75;   ///< decay of k-hop walk contributions
  std::size_t hops = 4;  ///< highest adjacency power K
};

/// Relatedness matrix M = rownorm(Σ_{k=0..K} α^k A^k) with unit-L2 rows.
inline Eigen::MatrixXd relatedness_matrix(const Eigen::MatrixXd& adjacency, const GraphVectorConfig& cfg = {}) {
  const auto n = adjacency.rows();
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd m = term;
  for (std::size_t k = 1; k <= cfg.hops; ++k) {
    term = cfg.alpha * (term * adjacency);
    m += term;
  }
  for (Eigen::Index i = 0; i < n; ++i) m.row(i) /= m.row(i).norm();
  return m;
}

/// Compresses the graph's relatedness matrix to `dim` columns by truncated SVD;
/// row i of U_dim·S_dim is node i's vector. Each singular vector is signed so
/// its largest-magnitude entry is positive.
inline VectorTable build_graph_vectors(const RelationGraph& g, std::size_t dim, const GraphVectorConfig& cfg = {}) {
  if (g.size() == 0) throw ConfigError("relation graph has no nodes");
  if (dim == 0 || dim > g.size()) {
    throw ConfigError("graph vector dim " + std::to_string(dim) + " exceeds node count " + std::to_string(g.size()));
  }
  const Eigen::MatrixXd a = g.adjacency();
  const Eigen::MatrixXd m = relatedness_matrix(a, cfg);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const auto k = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd u = svd.matrixU().leftCols(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::Index arg = 0;
    u.col(j).cwiseAbs().maxCoeff(&arg);
    if (u(arg, j) < 0.0) u.col(j) = -u.col(j);
  }
  const Eigen::MatrixXd emb = u * svd.singularValues().head(k).asDiagonal();

  VectorTable table(dim);
  std::vector<double> row(dim);
  for (Eigen::Index i = 0; i < emb.rows(); ++i) {
    for (Eigen::Index j = 0; j < k; ++j) row[static_cast<std::size_t>(j)] = emb(i, j);
    table.add(g.nodes()[static_cast<std::size_t>(i)], row);
    if (a.row(i).sum() == 0.0) table.metadata.isolated_nodes.push_back(g.nodes()[static_cast<std::size_t>(i)]);
  }
  table.metadata.source = VectorSource::kWordNet;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "graph:%g:%zu:%zu", cfg.alpha, cfg.hops, dim);
  table.metadata.config_hash = buf;
  return table;
}

}  // namespace cgmi::embed
