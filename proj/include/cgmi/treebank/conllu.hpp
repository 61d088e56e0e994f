#pragma once

#include <charconv>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cgmi/core/error.hpp"

namespace cgmi::treebank {

/// One syntactic word of a CoNLL-U sentence. `_` columns are stored as empty strings.
struct Token {
  int index = 0;
  std::string form;
  std::string lemma;
  std::string upos;
  std::map<std::string, std::string> feats;
  int head = 0;
  std::string deprel;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;

  /// Token with 1-based CoNLL-U index `i`.
  const Token& at(int i) const { return tokens.at(static_cast<std::size_t>(i - 1)); }

  bool operator==(const Sentence&) const = default;
};

struct ParseResult {
  std::vector<Sentence> sentences;
  std::size_t skipped_sentences = 0;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline bool parse_int(std::string_view s, int& value) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

inline std::string field(std::string_view s) { return s == "_" ? std::string() : std::string(s); }

inline bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

}  // namespace detail

inline std::map<std::string, std::string> parse_feats(std::string_view text, std::size_t line_no) {
  std::map<std::string, std::string> feats;
  if (text.empty() || text == "_") return feats;
  for (std::string_view item : detail::split(text, '|')) {
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size()) {
      throw ParseError("malformed FEATS item '" + std::string(item) + "'", line_no);
    }
    feats.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
  }
  return feats;
}

/// Streaming reader over CoNLL-U text. Multiword-token ranges (`3-4`) and empty
/// nodes (`5.1`) are skipped. Malformed lines throw ParseError; sentences with
/// out-of-range heads or non-contiguous indices are skipped and counted.
class ConlluReader {
 public:
  explicit ConlluReader(std::istream& in) : in_(in) {}

  /// Reads the next well-formed sentence. Returns false at end of input.
  bool next(Sentence& out) {
    for (;;) {
      Sentence sentence;
      bool bad = false;
      std::string reason;
      bool any_line = false;
      std::size_t start_line = 0;
      std::string line;
      while (std::getline(in_, line)) {
        ++line_no_;
        std::string_view view(line);
        if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
        if (detail::is_blank(view)) {
          if (any_line) break;
          continue;
        }
        if (!any_line) start_line = line_no_;
        any_line = true;
        if (view.front() == '#') continue;
        consume_token_line(view, sentence, bad, reason);
      }
      if (!any_line) return false;
      if (!bad) bad = !validate_heads(sentence, reason);
      if (bad) {
        ++skipped_;
        warnings_.push_back("sentence at line " + std::to_string(start_line) + " skipped: " + reason);
        continue;
      }
      if (sentence.tokens.empty()) continue;
      out = std::move(sentence);
      return true;
    }
  }

  std::size_t skipped_sentences() const noexcept { return skipped_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  void consume_token_line(std::string_view view, Sentence& sentence, bool& bad, std::string& reason) {
    const auto cols = detail::split(view, '\t');
    if (cols.size() != 10) {
      throw ParseError("expected 10 tab-separated columns, found " + std::to_string(cols.size()), line_no_);
    }
    const std::string_view id = cols[0];
    if (id.find('-') != std::string_view::npos || id.find('.') != std::string_view::npos) {
      const auto parts = detail::split(id, id.find('-') != std::string_view::npos ? '-' : '.');
      int a = 0, b = 0;
      if (parts.size() != 2 || !detail::parse_int(parts[0], a) || !detail::parse_int(parts[1], b)) {
        throw ParseError("non-numeric token index '" + std::string(id) + "'", line_no_);
      }
      return;
    }
    Token tok;
    if (!detail::parse_int(id, tok.index) || tok.index < 1) {
      throw ParseError("non-numeric token index '" + std::string(id) + "'", line_no_);
    }
    if (!detail::parse_int(cols[6], tok.head) || tok.head < 0) {
      throw ParseError("non-numeric head '" + std::string(cols[6]) + "'", line_no_);
    }
    tok.form = detail::field(cols[1]);
    tok.lemma = detail::field(cols[2]);
    tok.upos = detail::field(cols[3]);
    tok.feats = parse_feats(cols[5], line_no_);
    tok.deprel = detail::field(cols[7]);
    if (!bad && tok.index != static_cast<int>(sentence.tokens.size()) + 1) {
      bad = true;
      reason = "non-contiguous token index " + std::to_string(tok.index);
    }
    sentence.tokens.push_back(std::move(tok));
  }

  static bool validate_heads(const Sentence& s, std::string& reason) {
    const int n = static_cast<int>(s.tokens.size());
    for (const Token& t : s.tokens) {
      if (t.head > n) {
        reason = "head " + std::to_string(t.head) + " out of range for token " + std::to_string(t.index);
        return false;
      }
    }
    return true;
  }

  std::istream& in_;
  std::size_t line_no_ = 0;
  std::size_t skipped_ = 0;
  std::vector<std::string> warnings_;
};

inline ParseResult parse_conllu(std::istream& in) {
  ParseResult result;
  ConlluReader reader(in);
  Sentence s;
  while (reader.next(s)) result.sentences.push_back(std::move(s));
  result.skipped_sentences = reader.skipped_sentences();
  result.warnings = reader.warnings();
  return result;
}

inline ParseResult parse_conllu(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_conllu(in);
}

inline std::string format_feats(const std::map<std::string, std::string>& feats) {
  if (feats.empty()) return "_";
  std::string out;
  for (const auto& [k, v] : feats) {
    if (!out.empty()) out += '|';
    out += k + "=" + v;
  }
  return out;
}

inline void write_conllu(std::ostream& out, const Sentence& s) {
  const auto col = [](const std::string& v) -> const std::string& {
    static const std::string underscore = "_";
    return v.empty() ? underscore : v;
  };
  for (const Token& t : s.tokens) {
    out << t.index << '\t' << col(t.form) << '\t' << col(t.lemma) << '\t' << col(t.upos) << "\t_\t"
        << format_feats(t.feats) << '\t' << t.head << '\t' << col(t.deprel) << "\t_\t_\n";
  }
  out << '\n';
}

inline void write_conllu(std::ostream& out, const std::vector<Sentence>& sentences) {
  for (const Sentence& s : sentences) write_conllu(out, s);
}

}  // namespace cgmi::treebank
