#pragma once

#include <algorithm>
#include <string>
#include <string_view>

#include <unicode/normalizer2.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>

#include "cgmi/core/error.hpp"

namespace cgmi::treebank {

/// Lowercases (root locale) and NFC-normalizes a UTF-8 lemma.
inline std::string normalize_lemma(std::string_view lemma) {
  const bool ascii = std::all_of(lemma.begin(), lemma.end(),
                                 [](char c) { return static_cast<unsigned char>(c) < 0x80; });
  if (ascii) {
    std::string out(lemma);
    for (char& c : out) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
  }
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(lemma.data(), static_cast<int32_t>(lemma.size())));
  text.toLower(icu::Locale::getRoot());
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString normal = nfc->normalize(text, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  std::string out;
  normal.toUTF8String(out);
  return out;
}

}  // namespace cgmi::treebank
