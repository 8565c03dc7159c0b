#include "coft/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "coft/error.hpp"

namespace coft {

std::vector<TokenScore> token_logprobs(const TokenProbabilityProvider& provider,
                                       std::string_view query, std::string_view ref_text) {
  auto tokens = provider.score(query, ref_text);
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t.span.empty() || t.span.end > ref_text.size() || t.span.start < prev_end) {
      throw Error("provider returned a misaligned token at offset " +
                  std::to_string(t.span.start));
    }
    if (!(t.logprob2 <= 0.0)) {
      throw Error("provider returned a positive log probability at offset " +
                  std::to_string(t.span.start));
    }
    prev_end = t.span.end;
  }
  return tokens;
}

double self_information_of_span(std::span<const TokenScore> tokens, Span span) {
  auto it = std::partition_point(tokens.begin(), tokens.end(),
                                 [&](const TokenScore& t) { return t.span.end <= span.start; });
  double bits = 0.0;
  for (; it != tokens.end() && it->span.start < span.end; ++it) bits += -it->logprob2;
  return bits;
}

double total_self_information(std::span<const TokenScore> tokens) {
  double bits = 0.0;
  for (const auto& t : tokens) bits += -t.logprob2;
  return bits;
}

double tf_isf(const EntityCandidate& entity, std::size_t sentence_index, const Document& doc) {
  if (sentence_index >= doc.sentences.size()) throw Error("sentence index out of range");
  const std::size_t sentence_words = doc.sentence_word_counts[sentence_index];
  if (sentence_words == 0 || doc.word_count == 0) throw Error("degenerate sentence/document");
  std::size_t in_sentence = 0;
  std::size_t in_doc = 0;
  for (const Span& s : entity.spans_in(doc.id)) {
    ++in_doc;
    if (doc.sentence_at(s.start) == sentence_index) ++in_sentence;
  }
  if (in_sentence == 0) return 0.0;
  const double tf = static_cast<double>(in_sentence) / static_cast<double>(sentence_words);
  const double isf = std::log2(static_cast<double>(doc.word_count) /
                               static_cast<double>(in_doc + 1));
  return tf * isf;
}

std::vector<WeightRecord> contextual_weights(const Document& doc,
                                             const std::vector<EntityCandidate>& candidates,
                                             std::span<const TokenScore> tokens) {
  std::vector<WeightRecord> out;
  for (const auto& entity : candidates) {
    const auto spans = entity.spans_in(doc.id);
    if (spans.empty()) continue;
    std::set<std::size_t> sentences;
    double info = 0.0;
    for (const Span& s : spans) {
      sentences.insert(doc.sentence_at(s.start));
      info += self_information_of_span(tokens, s);
    }
    WeightRecord rec;
    rec.entity = entity.normalized;
    for (std::size_t i : sentences) rec.tf_isf += tf_isf(entity, i, doc);
    rec.self_info = info / static_cast<double>(spans.size());
    rec.weight = rec.tf_isf * rec.self_info;
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<WeightRecord> contextual_weights(std::string_view query, const Document& doc,
                                             const std::vector<EntityCandidate>& candidates,
                                             const TokenProbabilityProvider& provider) {
  if (candidates.empty()) return {};
  const auto tokens = token_logprobs(provider, query, doc.text);
  return contextual_weights(doc, candidates, tokens);
}

}  // namespace coft
