#pragma once

#include <cstddef>
#include <string>
#include <string_view>

// UTF-8 helpers shared by every module. Backed by ICU.
namespace coft::text {

// One decoded code point. Malformed bytes decode as U+FFFD with length 1.
struct CodePoint {
  char32_t value = 0;
  std::size_t length = 0;
};

CodePoint decode_at(std::string_view s, std::size_t pos) noexcept;

// Byte offset of the code point that ends right before `pos`.
std::size_t previous_boundary(std::string_view s, std::size_t pos) noexcept;

std::size_t codepoint_count(std::string_view s) noexcept;

bool is_space(char32_t c) noexcept;
bool is_alnum(char32_t c) noexcept;
bool is_letter(char32_t c) noexcept;
bool is_upper(char32_t c) noexcept;
bool is_punct(char32_t c) noexcept;
bool is_mark(char32_t c) noexcept;

// Canonical composition (NFC). Invalid UTF-8 is replaced by U+FFFD.
std::string nfc(std::string_view s);

// Full lowercase mapping in the root locale.
std::string lower(std::string_view s);

// NFC + lowercase + whitespace runs collapsed to one ASCII space + trimmed.
// This is the identity used for entity matching and deduplication.
std::string normalize(std::string_view s);

std::string_view trim(std::string_view s) noexcept;

}  // namespace coft::text
