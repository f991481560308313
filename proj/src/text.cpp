#include "kgsmith/text.hpp"

#include <chrono>
#include <ctime>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

namespace kgsmith::text {

std::vector<CodePoint> decode_utf8(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const auto length = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) {
      c = 0xFFFD;
      i = start + 1;
    }
    out.push_back({static_cast<char32_t>(c), static_cast<std::size_t>(start),
                   static_cast<std::size_t>(i - start)});
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (error) {
    append_utf8(out, 0xFFFD);
    return;
  }
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

char32_t fold_case(char32_t cp) noexcept {
  if (cp < 0x80) {
    return (cp >= U'A' && cp <= U'Z') ? cp + 32 : cp;
  }
  return static_cast<char32_t>(u_foldCase(static_cast<UChar32>(cp), U_FOLD_CASE_DEFAULT));
}

std::string fold_case(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const auto& cp : decode_utf8(s)) {
    append_utf8(out, fold_case(cp.value));
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto cps = decode_utf8(s);
  std::size_t first = 0;
  std::size_t last = cps.size();
  while (first < last && u_isUWhiteSpace(static_cast<UChar32>(cps[first].value))) {
    ++first;
  }
  while (last > first && u_isUWhiteSpace(static_cast<UChar32>(cps[last - 1].value))) {
    --last;
  }
  if (first == last) {
    return {};
  }
  const std::size_t begin = cps[first].offset;
  const std::size_t end = cps[last - 1].offset + cps[last - 1].length;
  return std::string(s.substr(begin, end - begin));
}

std::string normalize_name(std::string_view s) {
  const std::string trimmed = trim(s);
  bool ascii = true;
  for (unsigned char c : trimmed) {
    if (c >= 0x80) {
      ascii = false;
      break;
    }
  }
  if (ascii) {
    return trimmed;
  }
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    return trimmed;
  }
  const icu::UnicodeString source = icu::UnicodeString::fromUTF8(trimmed);
  icu::UnicodeString normalized = nfc->normalize(source, status);
  if (U_FAILURE(status)) {
    return trimmed;
  }
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::string capitalize_first(std::string_view s) {
  const auto cps = decode_utf8(s);
  if (cps.empty()) {
    return {};
  }
  std::string out;
  append_utf8(out, static_cast<char32_t>(u_totitle(static_cast<UChar32>(cps.front().value))));
  out.append(s.substr(cps.front().length));
  return out;
}

std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

} // namespace kgsmith::text
