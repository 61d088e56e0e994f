#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cgmi/core/error.hpp"
#include "cgmi/core/numeric.hpp"

namespace cgmi::embed {

enum class VectorSource { kUnknown, kSgns, kWordNet, kSynthetic };

inline const char* to_string(VectorSource s) {
  switch (s) {
    case VectorSource::kSgns: return "sgns";
    case VectorSource::kWordNet: return "wordnet";
    case VectorSource::kSynthetic: return "synthetic";
    default: return "unknown";
  }
}

struct VectorMetadata {
  VectorSource source = VectorSource::kUnknown;
  std::string config_hash;
  /// Graph nodes without any relation (their rows come from the identity term only).
  std::vector<std::string> isolated_nodes;
};

/// Token → fixed-length real vector map, insertion ordered.
class VectorTable {
 public:
  explicit VectorTable(std::size_t dim = 0) : dim_(dim) {}

  void add(std::string token, std::span<const double> v) {
    if (v.size() != dim_) {
      throw ConfigError("vector for '" + token + "' has length " + std::to_string(v.size()) + ", expected " +
                        std::to_string(dim_));
    }
    if (!all_finite(v)) throw ConfigError("non-finite component in vector for '" + token + "'");
    if (index_.count(token)) throw ConfigError("duplicate token '" + token + "'");
    index_.emplace(token, tokens_.size());
    tokens_.push_back(std::move(token));
    data_.insert(data_.end(), v.begin(), v.end());
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool contains(const std::string& token) const { return index_.count(token) > 0; }

  std::optional<std::size_t> find(const std::string& token) const {
    const auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& token(std::size_t i) const { return tokens_.at(i); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

  std::span<const double> row(const std::string& token) const {
    const auto i = find(token);
    if (!i) throw ConfigError("token '" + token + "' has no vector");
    return row(*i);
  }

  VectorMetadata metadata;

 private:
  std::size_t dim_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double cosine(std::span<const double> a, std::span<const double> b) {
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

/// Text format: `count dim` header, then `token v1 ... vdim` per line. Values
/// use the shortest round-trip decimal form, so reading back is bit-exact.
inline void write_vectors(std::ostream& out, const VectorTable& table) {
  out << table.size() << ' ' << table.dim() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.token(i);
    for (double x : table.row(i)) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), x);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

inline VectorTable read_vectors(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("vector file is empty", 1);
  std::size_t count = 0, dim = 0;
  {
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto r1 = std::from_chars(p, end, count);
    if (r1.ec != std::errc{} || r1.ptr == end || *r1.ptr != ' ') throw ParseError("bad vector header", 1);
    auto r2 = std::from_chars(r1.ptr + 1, end, dim);
    if (r2.ec != std::errc{} || dim == 0) throw ParseError("bad vector header", 1);
  }
  VectorTable table(dim);
  std::vector<double> v(dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos || sp == 0) throw ParseError("vector line without values", line_no);
    const char* p = line.data() + sp;
    const char* end = line.data() + line.size();
    for (std::size_t j = 0; j < dim; ++j) {
      while (p < end && *p == ' ') ++p;
      const auto r = std::from_chars(p, end, v[j]);
      if (r.ec != std::errc{}) throw ParseError("expected " + std::to_string(dim) + " values", line_no);
      p = r.ptr;
    }
    while (p < end && *p == ' ') ++p;
    if (p != end) throw ParseError("more than " + std::to_string(dim) + " values", line_no);
    try {
      table.add(line.substr(0, sp), v);
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (table.size() != count) {
    throw ParseError("header declares " + std::to_string(count) + " vectors, found " + std::to_string(table.size()),
                     line_no);
  }
  return table;
}

}  // namespace cgmi::embed
