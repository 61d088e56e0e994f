#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "cgmi/core/error.hpp"
#include "cgmi/core/numeric.hpp"
#include "cgmi/permtest/permtest.hpp"

namespace cgmi::permtest {

/// One (language, representation) line of the results table.
struct ReportRow {
  std::string language;
  std::string representation;
  double model_mi = 0.0;
  double mi_do = 0.0;
  double mean_difference = 0.0;
  double p_value = std::nan("");  ///< NaN when only the significance flag is known
  bool significant = false;
};

inline ReportRow make_row(const PermTestResult& r, std::string language, std::string representation) {
  ReportRow row;
  row.language = std::move(language);
  row.representation = std::move(representation);
  row.model_mi = compensated_sum(r.observed_model_mi) / static_cast<double>(r.observed_model_mi.size());
  row.mi_do = compensated_sum(r.observed_mi_do) / static_cast<double>(r.observed_mi_do.size());
  row.mean_difference = r.mean_difference;
  row.p_value = r.p_value;
  row.significant = r.p_value < r.config.alpha;
  return row;
}

/// Three significant digits: fixed notation from 0.01 up, scientific below
/// with an unpadded exponent (1.24e-4).
inline std::string format_value(double x) {
  char buf[32];
  if (x == 0.0) return "0";
  if (std::abs(x) >= 0.01) {
    std::snprintf(buf, sizeof(buf), "%.3f", x);
    return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.2e", x);
  // 1.24e-04 -> 1.24e-4
  std::string s(buf);
  const auto e = s.find('e');
  std::size_t digits = e + 2;
  while (digits + 1 < s.size() && s[digits] == '0') s.erase(digits, 1);
  return s;
}

/// Rows are languages; each representation contributes the column group
/// (model MI, model MI_do, mean diff. perturbed). Significant mean
/// differences (p < alpha, strict) carry an asterisk.
inline std::string summarize(const std::vector<ReportRow>& rows) {
  if (rows.empty()) throw ConfigError("nothing to summarize");
  std::vector<std::string> languages, reps;
  for (const auto& r : rows) {
    if (std::find(languages.begin(), languages.end(), r.language) == languages.end()) languages.push_back(r.language);
    if (std::find(reps.begin(), reps.end(), r.representation) == reps.end()) reps.push_back(r.representation);
  }
  constexpr int kWidth = 14;
  std::ostringstream os;
  os << std::left << std::setw(10) << "";
  for (const auto& rep : reps) os << std::left << std::setw(3 * kWidth) << rep;
  os << '\n' << std::left << std::setw(10) << "Language";
  for (std::size_t i = 0; i < reps.size(); ++i) {
    os << std::right << std::setw(kWidth) << "MI(A;G)" << std::setw(kWidth) << "MI_do(A;G)" << std::setw(kWidth)
       << "MeanDiffPerm";
  }
  os << '\n';
  for (const auto& lang : languages) {
    os << std::left << std::setw(10) << lang;
    for (const auto& rep : reps) {
      const auto it = std::find_if(rows.begin(), rows.end(),
                                   [&](const ReportRow& r) { return r.language == lang && r.representation == rep; });
      if (it == rows.end()) {
        for (int c = 0; c < 3; ++c) os << std::right << std::setw(kWidth) << "-";
        continue;
      }
      os << std::right << std::setw(kWidth) << format_value(it->model_mi) << std::setw(kWidth)
         << format_value(it->mi_do) << std::setw(kWidth)
         << (format_value(it->mean_difference) + (it->significant ? "*" : ""));
    }
    os << '\n';
  }
  return os.str();
}

inline std::string summarize_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  os << "language,representation,model_mi,mi_do,mean_diff_perturbed,p_value,significant\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.language << ',' << r.representation << ',' << r.model_mi << ',' << r.mi_do << ',' << r.mean_difference
       << ',';
    if (std::isnan(r.p_value)) os << "";
    else os << r.p_value;
    os << ',' << (r.significant ? "*" : "") << '\n';
  }
  return os.str();
}

}  // namespace cgmi::permtest
