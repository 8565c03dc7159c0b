#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coft/provider.hpp"
#include "coft/recaller.hpp"
#include "coft/segmentation.hpp"

namespace coft {

// Per-entity scores for one reference context. weight = tf_isf * self_info.
struct WeightRecord {
  std::string entity;
  double tf_isf = 0.0;
  double self_info = 0.0;
  double weight = 0.0;
};

// Provider scores for `ref_text` conditioned on `query`, validated: tokens
// sorted, non-overlapping, in range, with non-positive log probabilities.
std::vector<TokenScore> token_logprobs(const TokenProbabilityProvider& provider,
                                       std::string_view query, std::string_view ref_text);

// Sum of token self-information (bits) over every token overlapping `span`.
// Partially overlapping tokens count in full.
double self_information_of_span(std::span<const TokenScore> tokens, Span span);

// Total self-information of all tokens.
double total_self_information(std::span<const TokenScore> tokens);

// Term frequency / inverse sentence frequency of `entity` in sentence
// `sentence_index`:
//
//   (f_{e,s} / |s|) * log2(|S| / (f_{e,S} + 1))
//
// |S| is the total word count of the document. Occurrences are attributed to
// the sentence holding their first byte. Negative values are returned as is.
double tf_isf(const EntityCandidate& entity, std::size_t sentence_index, const Document& doc);

// Entity-level aggregation: tf_isf summed over the sentences that contain the
// entity, self-information averaged over its occurrences. Candidates with no
// occurrence in `doc` are skipped. Output follows the candidate order.
std::vector<WeightRecord> contextual_weights(const Document& doc,
                                             const std::vector<EntityCandidate>& candidates,
                                             std::span<const TokenScore> tokens);

std::vector<WeightRecord> contextual_weights(std::string_view query, const Document& doc,
                                             const std::vector<EntityCandidate>& candidates,
                                             const TokenProbabilityProvider& provider);

}  // namespace coft
