#include "coft/selector.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "coft/error.hpp"
#include "coft/random.hpp"

namespace coft {

namespace {

// Merges spans that overlap into their union. Input need not be sorted.
std::vector<Span> merge_overlapping(std::vector<Span> spans) {
  std::sort(spans.begin(), spans.end());
  std::vector<Span> out;
  for (const Span& s : spans) {
    if (!out.empty() && s.start < out.back().end) {
      out.back().end = std::max(out.back().end, s.end);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

std::vector<double> min_max(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.5);
  if (values.size() < 2) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*hi == *lo) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (values[i] - *lo) / (*hi - *lo);
  }
  return out;
}

// Index of the unit containing `pos`, or npos. Units are sorted and disjoint.
std::size_t unit_at(const std::vector<UnitScore>& units, std::size_t pos) {
  auto it = std::upper_bound(units.begin(), units.end(), pos,
                             [](std::size_t p, const UnitScore& u) { return p < u.span.start; });
  if (it == units.begin()) return static_cast<std::size_t>(-1);
  --it;
  if (!it->span.contains(pos)) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - units.begin());
}

std::vector<std::size_t> rank_order(std::span<const UnitScore> units) {
  std::vector<std::size_t> order(units.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (units[a].weight != units[b].weight) return units[a].weight > units[b].weight;
    return units[a].span.start < units[b].span.start;
  });
  return order;
}

}  // namespace

std::string_view to_string(Granularity g) noexcept {
  switch (g) {
    case Granularity::Word:
      return "word";
    case Granularity::Sentence:
      return "sentence";
    case Granularity::Paragraph:
      return "paragraph";
    case Granularity::Joint:
      return "joint";
  }
  return "word";
}

std::optional<Granularity> parse_granularity(std::string_view s) noexcept {
  if (s == "word") return Granularity::Word;
  if (s == "sentence") return Granularity::Sentence;
  if (s == "paragraph") return Granularity::Paragraph;
  if (s == "joint") return Granularity::Joint;
  return std::nullopt;
}

std::vector<Threshold> dynamic_threshold(std::span<const ContextStats> contexts) {
  if (contexts.empty()) throw Error("dynamic threshold needs at least one context");
  std::vector<double> lengths;
  std::vector<double> info;
  for (const auto& c : contexts) {
    lengths.push_back(static_cast<double>(c.length));
    info.push_back(c.informativeness);
  }
  const auto len_norm = min_max(lengths);
  const auto info_norm = min_max(info);
  std::vector<Threshold> out;
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    const double tau = std::clamp(0.5 * (len_norm[i] + info_norm[i]), kMinTau, kMaxTau);
    out.push_back({tau, len_norm[i], info_norm[i]});
  }
  return out;
}

std::vector<Span> word_units(const Document& doc, const std::vector<EntityCandidate>& candidates) {
  std::vector<Span> spans = doc.words;
  for (const auto& c : candidates) {
    for (const Span& s : c.spans_in(doc.id)) spans.push_back(s);
  }
  return merge_overlapping(std::move(spans));
}

std::vector<UnitScore> score_units(const Document& doc, Granularity granularity,
                                   const std::vector<WeightRecord>& weights,
                                   const std::vector<EntityCandidate>& candidates) {
  std::vector<Span> spans;
  switch (granularity) {
    case Granularity::Word:
    case Granularity::Joint:
      spans = word_units(doc, candidates);
      break;
    case Granularity::Sentence:
      spans = doc.sentences;
      break;
    case Granularity::Paragraph:
      spans = doc.paragraphs;
      break;
  }
  std::vector<UnitScore> units;
  units.reserve(spans.size());
  for (const Span& s : spans) units.push_back({granularity, s, 0.0, 0, 0});

  std::map<std::string, double, std::less<>> weight_of;
  for (const auto& w : weights) weight_of.emplace(w.entity, w.weight);
  for (const auto& c : candidates) {
    auto it = weight_of.find(c.normalized);
    if (it == weight_of.end()) continue;
    for (const Span& s : c.spans_in(doc.id)) {
      const std::size_t u = unit_at(units, s.start);
      if (u == static_cast<std::size_t>(-1)) continue;
      units[u].weight += it->second;
      ++units[u].entity_hits;
    }
  }
  const auto order = rank_order(units);
  for (std::size_t r = 0; r < order.size(); ++r) units[order[r]].rank_index = r;
  return units;
}

std::size_t selection_count(std::size_t n, double tau) {
  if (n == 0) return 0;
  // The epsilon keeps products such as 0.7 * 10 = 7.000000000000001 at 7.
  const double raw = std::ceil(tau * static_cast<double>(n) - 1e-9);
  const auto k = static_cast<std::size_t>(std::max(0.0, raw));
  return std::clamp<std::size_t>(k, 1, n);
}

std::vector<Span> select_units(std::span<const UnitScore> units, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error("tau must lie in [0, 1]");
  if (units.empty()) return {};
  const bool all_zero =
      std::all_of(units.begin(), units.end(), [](const UnitScore& u) { return u.weight == 0.0; });
  if (all_zero) return {};
  const auto order = rank_order(units);
  const std::size_t k = selection_count(units.size(), tau);
  std::vector<Span> out;
  for (std::size_t r = 0; r < k; ++r) {
    const auto& u = units[order[r]];
    if (u.weight == 0.0 && u.entity_hits == 0) continue;
    out.push_back(u.span);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string apply_highlights(std::string_view text, std::span<const Span> spans,
                             std::string_view marker) {
  if (spans.empty()) return std::string(text);
  if (marker.empty()) throw Error("highlight marker must not be empty");
  std::string out;
  out.reserve(text.size() + 2 * marker.size() * spans.size());
  std::size_t cursor = 0;
  for (const Span& s : spans) {
    if (s.empty() || s.end > text.size()) throw Error("highlight span out of range");
    if (s.start < cursor) throw Error("highlight spans overlap or are unsorted");
    out.append(text.substr(cursor, s.start - cursor));
    out.append(marker);
    out.append(s.slice(text));
    out.append(marker);
    cursor = s.end;
  }
  out.append(text.substr(cursor));
  bool lossless = false;
  try {
    lossless = strip_highlights(out, marker) == text;
  } catch (const Error&) {
  }
  if (!lossless) {
    throw Error("text cannot be highlighted losslessly with marker '" + std::string(marker) +
                "'");
  }
  return out;
}

std::string strip_highlights(std::string_view text, std::string_view marker) {
  if (marker.empty()) throw Error("highlight marker must not be empty");
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  bool open = false;
  std::size_t inner_start = 0;
  for (;;) {
    const std::size_t p = text.find(marker, pos);
    if (p == std::string_view::npos) break;
    out.append(text.substr(pos, p - pos));
    if (open && p == inner_start) throw Error("nested or empty highlight at offset " + std::to_string(p));
    open = !open;
    pos = p + marker.size();
    inner_start = pos;
  }
  if (open) throw Error("unbalanced highlight markers");
  out.append(text.substr(pos));
  return out;
}

std::vector<Span> joint_promote(const Document& doc, std::span<const Span> word_selection) {
  std::vector<Span> selected(word_selection.begin(), word_selection.end());
  std::sort(selected.begin(), selected.end());

  std::vector<std::size_t> highlighted(doc.sentences.size(), 0);
  std::size_t j = 0;
  for (std::size_t w = 0; w < doc.words.size(); ++w) {
    const Span& word = doc.words[w];
    while (j < selected.size() && selected[j].end <= word.start) ++j;
    if (j < selected.size() && selected[j].contains(word)) ++highlighted[doc.word_sentence[w]];
  }

  std::vector<bool> sentence_promoted(doc.sentences.size(), false);
  std::vector<std::size_t> para_sentences(doc.paragraphs.size(), 0);
  std::vector<std::size_t> para_promoted(doc.paragraphs.size(), 0);
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const std::size_t n = doc.sentence_word_counts[s];
    sentence_promoted[s] = n > 0 && 3 * highlighted[s] > n;
    ++para_sentences[doc.sentence_paragraph[s]];
    if (sentence_promoted[s]) ++para_promoted[doc.sentence_paragraph[s]];
  }

  std::vector<Span> out = selected;
  for (std::size_t p = 0; p < doc.paragraphs.size(); ++p) {
    if (para_sentences[p] > 0 && 3 * para_promoted[p] > para_sentences[p]) {
      out.push_back(doc.paragraphs[p]);
    }
  }
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    if (sentence_promoted[s]) out.push_back(doc.sentences[s]);
  }
  return merge_overlapping(std::move(out));
}

std::vector<Span> random_selection(std::span<const UnitScore> units, std::size_t k,
                                   std::uint64_t seed) {
  if (k > units.size()) throw Error("cannot sample more units than available");
  std::vector<Span> spans;
  spans.reserve(units.size());
  for (const auto& u : units) spans.push_back(u.span);
  auto out = sample_without_replacement(std::move(spans), k, seed);
  std::sort(out.begin(), out.end());
  return out;
}

std::string highlights_only(std::string_view text, std::span<const Span> spans,
                            std::string_view joiner) {
  std::string out;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (i > 0) out.append(joiner);
    out.append(spans[i].slice(text));
  }
  return out;
}

}  // namespace coft
