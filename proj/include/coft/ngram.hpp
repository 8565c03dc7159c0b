#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace coft {

// Add-one smoothed bigram model over case-folded words:
//
//   P(t | h) = (c(h, t) + 1) / (c(h) + V)
//
// V counts the unknown marker. Out-of-vocabulary words map to the unknown
// marker. The corpus end is counted as a transition to the unknown marker so
// that c(h) equals the number of transitions out of h and every conditional
// distribution sums to one.
class NgramModel {
 public:
  static constexpr std::string_view kUnknown = "<unk>";

  // Throws Error("empty training corpus") when the corpus has no words.
  static NgramModel train(std::string_view corpus);

  // Fields: order, vocab, unigrams, bigrams (keys "h\tt").
  static NgramModel from_json(const nlohmann::json& j);
  static NgramModel load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  void save(const std::filesystem::path& path) const;

  static constexpr int order() noexcept { return 2; }
  std::size_t vocabulary_size() const noexcept { return unigrams_.size() + 1; }
  std::uint64_t total_tokens() const noexcept { return total_; }

  // Maps a surface word to its vocabulary entry (folded word or kUnknown).
  std::string lookup(std::string_view word) const;

  std::uint64_t unigram_count(std::string_view word) const;
  std::uint64_t bigram_count(std::string_view history, std::string_view word) const;

  // Conditional probability of `word` after `history`. Without a history the
  // smoothed unigram (c(t) + 1) / (N + V) is used.
  double probability(std::string_view word, std::optional<std::string_view> history) const;

 private:
  std::unordered_map<std::string, std::uint64_t> unigrams_;
  std::unordered_map<std::string, std::uint64_t> bigrams_;
  std::uint64_t total_ = 0;
};

}  // namespace coft
