#include "coft/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "coft/error.hpp"

namespace coft::text {

CodePoint decode_at(std::string_view s, std::size_t pos) noexcept {
  if (pos >= s.size()) return {0, 0};
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  int32_t i = static_cast<int32_t>(pos);
  const int32_t n = static_cast<int32_t>(s.size());
  UChar32 c = 0;
  U8_NEXT(bytes, i, n, c);
  if (c < 0) return {U'\uFFFD', 1};
  return {static_cast<char32_t>(c), static_cast<std::size_t>(i) - pos};
}

std::size_t previous_boundary(std::string_view s, std::size_t pos) noexcept {
  if (pos == 0) return 0;
  std::size_t i = pos - 1;
  // Walk back over continuation bytes, at most three.
  for (int k = 0; k < 3 && i > 0 &&
                  (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80;
       ++k) {
    --i;
  }
  auto cp = decode_at(s, i);
  if (i + cp.length != pos) return pos - 1;
  return i;
}

std::size_t codepoint_count(std::string_view s) noexcept {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size();) {
    i += decode_at(s, i).length;
    ++n;
  }
  return n;
}

bool is_space(char32_t c) noexcept {
  return u_isUWhiteSpace(static_cast<UChar32>(c));
}

bool is_letter(char32_t c) noexcept {
  return u_hasBinaryProperty(static_cast<UChar32>(c), UCHAR_ALPHABETIC);
}

bool is_alnum(char32_t c) noexcept {
  return is_letter(c) || u_isdigit(static_cast<UChar32>(c));
}

bool is_upper(char32_t c) noexcept {
  return u_isupper(static_cast<UChar32>(c)) || u_istitle(static_cast<UChar32>(c));
}

bool is_punct(char32_t c) noexcept {
  return u_ispunct(static_cast<UChar32>(c)) ||
         (U_GET_GC_MASK(static_cast<UChar32>(c)) & U_GC_S_MASK) != 0;
}

bool is_mark(char32_t c) noexcept {
  return (U_GET_GC_MASK(static_cast<UChar32>(c)) & U_GC_M_MASK) != 0;
}

std::string nfc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  if (norm->isNormalized(in, status) && U_SUCCESS(status)) {
    std::string out;
    in.toUTF8String(out);
    return out;
  }
  status = U_ZERO_ERROR;
  icu::UnicodeString composed = norm->normalize(in, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  std::string out;
  composed.toUTF8String(out);
  return out;
}

std::string lower(std::string_view s) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  u.toLower(icu::Locale::getRoot());
  std::string out;
  u.toUTF8String(out);
  return out;
}

std::string normalize(std::string_view s) {
  const std::string folded = nfc(lower(nfc(s)));
  std::string out;
  out.reserve(folded.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < folded.size();) {
    auto cp = decode_at(folded, i);
    if (is_space(cp.value)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.append(folded, i, cp.length);
    }
    i += cp.length;
  }
  return out;
}

std::string_view trim(std::string_view s) noexcept {
  std::size_t b = 0;
  while (b < s.size()) {
    auto cp = decode_at(s, b);
    if (!is_space(cp.value)) break;
    b += cp.length;
  }
  std::size_t e = s.size();
  while (e > b) {
    std::size_t p = previous_boundary(s, e);
    if (!is_space(decode_at(s, p).value)) break;
    e = p;
  }
  return s.substr(b, e - b);
}

}  // namespace coft::text
