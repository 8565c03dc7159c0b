#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coft::eval {

// Lowercase, drop punctuation, drop the articles a/an/the, collapse spaces.
std::string normalize_answer(std::string_view s);

int exact_match(std::string_view pred, std::string_view gold);

// Token-multiset F1 over normalized answers. Both empty -> 1, one empty -> 0.
double token_f1(std::string_view pred, std::string_view gold);

struct SegmentJudgment {
  std::string id;
  bool predicted = false;
  bool gold = false;
};

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Confusion-matrix P/R/F1 with `positive_class` as the positive label. Zero
// denominators give 0. Throws on an empty list or duplicate ids.
PrecisionRecall segment_prf(std::span<const SegmentJudgment> judgments, bool positive_class);

struct MixedDoc {
  std::string text;
  bool noisy = false;
  std::size_t source_index = 0;
};

struct NoiseMix {
  std::size_t k = 0;
  double ratio = 0.0;
  std::uint64_t seed = 0;
  std::size_t noisy_count = 0;
  std::size_t relevant_count = 0;
  std::vector<MixedDoc> order;
};

// round(k * ratio) (half to even) noisy documents and the rest relevant,
// each taken from the front of its list, then shuffled with `seed`.
NoiseMix mix_noise(std::span<const std::string> relevant, std::span<const std::string> noisy,
                   std::size_t k, double ratio, std::uint64_t seed);

}  // namespace coft::eval
