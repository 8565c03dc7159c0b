#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace coft {

// Prompt text with `{instructions}`, `{query}` and `{refs}` placeholders.
// `{refs}` is required; each placeholder may appear at most once and any
// other `{name}` is rejected when the template is parsed.
class PromptTemplate {
 public:
  static constexpr std::string_view kDefaultText =
      "{instructions}\n\nQuestion: {query}\n\nReference contexts:\n{refs}\n";

  static PromptTemplate parse(std::string text, std::string separator = "\n\n");
  static PromptTemplate load(const std::filesystem::path& path);
  static PromptTemplate default_template();

  // Empty instructions drop the placeholder together with the blank line
  // that separates it from its neighbours.
  std::string render(std::string_view instructions, std::string_view query,
                     std::span<const std::string> refs) const;

  const std::string& text() const noexcept { return text_; }
  const std::string& separator() const noexcept { return separator_; }

 private:
  PromptTemplate(std::string text, std::string separator)
      : text_(std::move(text)), separator_(std::move(separator)) {}

  std::string text_;
  std::string separator_;
};

}  // namespace coft
