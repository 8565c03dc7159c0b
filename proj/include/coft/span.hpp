#pragma once

#include <compare>
#include <cstddef>
#include <string_view>

namespace coft {

// Half-open byte range [start, end) into a UTF-8 text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  constexpr std::size_t length() const noexcept { return end - start; }
  constexpr bool empty() const noexcept { return end <= start; }

  constexpr bool contains(const Span& other) const noexcept {
    return start <= other.start && other.end <= end;
  }
  constexpr bool contains(std::size_t pos) const noexcept {
    return start <= pos && pos < end;
  }
  constexpr bool overlaps(const Span& other) const noexcept {
    return start < other.end && other.start < end;
  }
  constexpr Span shifted(std::size_t offset) const noexcept {
    return {start + offset, end + offset};
  }

  std::string_view slice(std::string_view text) const noexcept {
    return text.substr(start, end - start);
  }

  friend constexpr auto operator<=>(const Span&, const Span&) = default;
};

}  // namespace coft
