#pragma once

// UTF-8 helpers shared by the store (name identity) and the matcher (case
// folding with byte offsets into the original text).

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kgsmith::text {

struct CodePoint {
  char32_t value;
  std::size_t offset; // byte offset in the source
  std::size_t length; // encoded byte length in the source
};

// Malformed sequences decode to U+FFFD and consume a single byte.
std::vector<CodePoint> decode_utf8(std::string_view s);

void append_utf8(std::string& out, char32_t cp);

// Unicode simple case folding; maps one code point to one code point.
char32_t fold_case(char32_t cp) noexcept;
std::string fold_case(std::string_view s);

// Canonical entity-name form: surrounding whitespace trimmed, then NFC.
std::string normalize_name(std::string_view s);

std::string trim(std::string_view s);

// Title-cases the first code point, leaves the rest untouched.
std::string capitalize_first(std::string_view s);

// Current time as UTC RFC 3339 with second precision, e.g. 2024-01-31T08:00:00Z.
std::string utc_timestamp_now();

} // namespace kgsmith::text
