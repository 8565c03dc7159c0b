#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coft/recaller.hpp"
#include "coft/scorer.hpp"
#include "coft/segmentation.hpp"

namespace coft {

enum class Granularity { Word, Sentence, Paragraph, Joint };

std::string_view to_string(Granularity g) noexcept;
std::optional<Granularity> parse_granularity(std::string_view s) noexcept;

struct UnitScore {
  Granularity granularity = Granularity::Word;
  Span span;
  double weight = 0.0;
  // Entity occurrences attributed to this unit.
  std::size_t entity_hits = 0;
  // Position after sorting by (weight desc, start asc).
  std::size_t rank_index = 0;
};

struct ContextStats {
  std::size_t length = 0;        // words
  double informativeness = 0.0;  // total self-information, bits
};

struct Threshold {
  double tau = 0.5;
  double tau_len = 0.5;
  double tau_info = 0.5;
};

inline constexpr double kMinTau = 0.05;
inline constexpr double kMaxTau = 0.95;

// tau = 0.5 * (minmax(length) + minmax(informativeness)) over the batch,
// clamped to [kMinTau, kMaxTau]. A degenerate min-max (one context or all
// values equal) normalizes to 0.5. Throws on an empty batch.
std::vector<Threshold> dynamic_threshold(std::span<const ContextStats> contexts);

// Word-granularity units: document words, with words covered by one entity
// occurrence (or a chain of overlapping ones) merged into a single unit.
std::vector<Span> word_units(const Document& doc, const std::vector<EntityCandidate>& candidates);

// One score per unit in document order. Joint scores at word granularity.
std::vector<UnitScore> score_units(const Document& doc, Granularity granularity,
                                   const std::vector<WeightRecord>& weights,
                                   const std::vector<EntityCandidate>& candidates);

// max(1, ceil(tau * n)) for n > 0.
std::size_t selection_count(std::size_t n, double tau);

// Top max(1, ceil(tau * N)) units by weight; units without entity hits are
// dropped, and an all-zero batch selects nothing. Returned in text order.
std::vector<Span> select_units(std::span<const UnitScore> units, double tau);

// Wraps each span in `marker`. Spans must be sorted, non-empty,
// non-overlapping and in range; the result must strip back to `text`.
std::string apply_highlights(std::string_view text, std::span<const Span> spans,
                             std::string_view marker);

// Removes marker pairs. Throws on unbalanced or empty pairs.
std::string strip_highlights(std::string_view text, std::string_view marker);

// Promotes sentences with more than one third of their words selected, then
// paragraphs with more than one third of their sentences promoted.
std::vector<Span> joint_promote(const Document& doc, std::span<const Span> word_selection);

// k unit spans drawn uniformly without replacement; same seed, same draw.
std::vector<Span> random_selection(std::span<const UnitScore> units, std::size_t k,
                                   std::uint64_t seed);

inline constexpr std::string_view kDefaultJoiner = " … ";

std::string highlights_only(std::string_view text, std::span<const Span> spans,
                            std::string_view joiner = kDefaultJoiner);

}  // namespace coft
