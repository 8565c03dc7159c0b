#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coft/ngram.hpp"
#include "coft/span.hpp"

namespace coft {

// One reference token with its base-2 log probability given the query and
// all preceding reference tokens.
struct TokenScore {
  std::string text;
  Span span;
  double logprob2 = 0.0;

  double self_information() const noexcept { return -logprob2; }
};

// Source of per-token log probabilities. Implementations report whether they
// tolerate concurrent calls; serial ones are funnelled through SerialProvider.
class TokenProbabilityProvider {
 public:
  virtual ~TokenProbabilityProvider() = default;

  // Scores every token of `ref_text` conditioned on `query` and the reference
  // prefix. Spans are byte offsets into `ref_text`.
  virtual std::vector<TokenScore> score(std::string_view query,
                                        std::string_view ref_text) const = 0;
  virtual bool concurrent() const noexcept { return true; }
  virtual std::string name() const = 0;
};

// Word-level provider backed by a bigram model. The query words form the
// initial history, so the first reference word is conditioned on the last
// query word.
class NgramProvider final : public TokenProbabilityProvider {
 public:
  explicit NgramProvider(std::shared_ptr<const NgramModel> model);

  std::vector<TokenScore> score(std::string_view query,
                                std::string_view ref_text) const override;
  std::string name() const override { return "ngram"; }
  const NgramModel& model() const noexcept { return *model_; }

 private:
  std::shared_ptr<const NgramModel> model_;
};

// A token as returned by a remote endpoint, log probability in nats.
struct RemoteToken {
  std::string text;
  std::optional<double> logprob;
};

// Re-aligns remote tokens to byte spans of `full_text` by greedy left-to-right
// matching, then keeps the tokens at or after `ref_offset` with spans made
// relative to it. Leading whitespace inside a token is excluded from its span.
// Throws Error naming the offset when a token cannot be placed.
std::vector<TokenScore> align_remote_tokens(std::string_view full_text, std::size_t ref_offset,
                                            const std::vector<RemoteToken>& tokens);

// Scores text through an HTTP endpoint:
//   request  {"text": query + "\n" + ref}
//   response {"tokens": [{"text": ..., "logprob": <natural log>}, ...]}
class RemoteProvider final : public TokenProbabilityProvider {
 public:
  struct Options {
    std::string url;
    std::string api_key;
    int timeout_ms = 30000;
    int max_attempts = 3;
  };

  explicit RemoteProvider(Options options);

  // COFT_LM_URL (required), COFT_LM_KEY, COFT_LM_TIMEOUT_MS.
  static Options options_from_env();

  std::vector<TokenScore> score(std::string_view query,
                                std::string_view ref_text) const override;
  std::string name() const override { return "remote"; }

  static constexpr std::string_view kSeparator = "\n";

 private:
  Options options_;
};

// Serializes calls into a provider that is not safe for concurrent use.
class SerialProvider final : public TokenProbabilityProvider {
 public:
  explicit SerialProvider(std::shared_ptr<const TokenProbabilityProvider> inner);

  std::vector<TokenScore> score(std::string_view query,
                                std::string_view ref_text) const override;
  bool concurrent() const noexcept override { return false; }
  std::string name() const override { return inner_->name(); }

 private:
  std::shared_ptr<const TokenProbabilityProvider> inner_;
  mutable std::mutex mu_;
};

}  // namespace coft
