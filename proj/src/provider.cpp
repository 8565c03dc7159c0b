#include "coft/provider.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

#include <spdlog/spdlog.h>

#include "coft/error.hpp"
#include "coft/segmentation.hpp"
#include "coft/text.hpp"
#include "httplib.h"
#include "json.hpp"
#include "url.hpp"

namespace coft {

using nlohmann::json;

NgramProvider::NgramProvider(std::shared_ptr<const NgramModel> model)
    : model_(std::move(model)) {
  if (!model_) throw Error("n-gram provider needs a model");
}

std::vector<TokenScore> NgramProvider::score(std::string_view query,
                                             std::string_view ref_text) const {
  std::optional<std::string> history;
  const std::string q = text::nfc(query);
  if (const auto qwords = tokenize_words(q); !qwords.empty()) {
    history = std::string(qwords.back().slice(q));
  }
  std::vector<TokenScore> out;
  for (const Span& w : tokenize_words(ref_text)) {
    std::string word(w.slice(ref_text));
    const double p = history ? model_->probability(word, std::string_view(*history))
                             : model_->probability(word, std::nullopt);
    out.push_back({word, w, std::log2(p)});
    history = std::move(word);
  }
  return out;
}

std::vector<TokenScore> align_remote_tokens(std::string_view full, std::size_t ref_offset,
                                            const std::vector<RemoteToken>& tokens) {
  std::vector<TokenScore> out;
  std::size_t cursor = 0;
  for (const auto& tok : tokens) {
    if (tok.text.empty()) continue;
    std::size_t start = cursor;
    std::size_t length = tok.text.size();
    if (full.compare(cursor, length, tok.text) != 0) {
      // Tolerate whitespace the endpoint folded into or dropped from tokens.
      std::size_t c = cursor;
      while (c < full.size() && text::is_space(text::decode_at(full, c).value)) {
        c += text::decode_at(full, c).length;
      }
      const std::string_view body = text::trim(tok.text);
      if (body.empty() || full.compare(c, body.size(), body) != 0) {
        throw Error("token alignment failed at offset " +
                    std::to_string(cursor >= ref_offset ? cursor - ref_offset : cursor) +
                    (cursor >= ref_offset ? " of the reference" : " of the query") +
                    ": token '" + tok.text + "' not found");
      }
      start = c;
      length = body.size();
    }
    const std::size_t end = start + length;
    cursor = end;
    if (end <= ref_offset) continue;

    // Narrow to the non-whitespace content inside the reference.
    std::size_t s = std::max(start, ref_offset);
    while (s < end && text::is_space(text::decode_at(full, s).value)) {
      s += text::decode_at(full, s).length;
    }
    std::size_t e = end;
    while (e > s) {
      const std::size_t p = text::previous_boundary(full, e);
      if (!text::is_space(text::decode_at(full, p).value)) break;
      e = p;
    }
    if (s >= e) continue;

    if (!tok.logprob) {
      throw Error("reference token at offset " + std::to_string(s - ref_offset) +
                  " has no log probability");
    }
    double lp = *tok.logprob;
    if (!std::isfinite(lp) || lp > 1e-9) {
      throw Error("invalid log probability for token at offset " +
                  std::to_string(s - ref_offset));
    }
    lp = std::min(lp, 0.0);
    out.push_back({tok.text, {s - ref_offset, e - ref_offset}, lp / std::numbers::ln2});
  }
  return out;
}

RemoteProvider::RemoteProvider(Options options) : options_(std::move(options)) {
  if (options_.url.empty()) throw Error("remote provider needs COFT_LM_URL");
  detail::split_url(options_.url);
}

RemoteProvider::Options RemoteProvider::options_from_env() {
  Options o;
  if (const char* u = std::getenv("COFT_LM_URL")) o.url = u;
  if (const char* k = std::getenv("COFT_LM_KEY")) o.api_key = k;
  if (const char* t = std::getenv("COFT_LM_TIMEOUT_MS"); t && *t) {
    char* end = nullptr;
    const long v = std::strtol(t, &end, 10);
    if (*end != '\0' || v <= 0) throw Error("COFT_LM_TIMEOUT_MS must be a positive integer");
    o.timeout_ms = static_cast<int>(v);
  }
  return o;
}

std::vector<TokenScore> RemoteProvider::score(std::string_view query,
                                              std::string_view ref_text) const {
  std::string full;
  full.reserve(query.size() + kSeparator.size() + ref_text.size());
  full.append(query).append(kSeparator).append(ref_text);
  const std::size_t ref_offset = query.size() + kSeparator.size();

  const auto url = detail::split_url(options_.url);
  httplib::Client client(url.origin);
  client.set_connection_timeout(std::chrono::milliseconds(options_.timeout_ms));
  client.set_read_timeout(std::chrono::milliseconds(options_.timeout_ms));
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }
  const std::string body = json{{"text", full}}.dump();

  std::string last_error;
  for (int attempt = 0; attempt < std::max(1, options_.max_attempts); ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(100 << attempt));
    auto res = client.Post(url.path, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status != 200) {
      last_error = "HTTP status " + std::to_string(res->status);
    } else {
      std::vector<RemoteToken> tokens;
      try {
        const json j = json::parse(res->body);
        for (const auto& t : j.at("tokens")) {
          RemoteToken rt{t.at("text").get<std::string>(), std::nullopt};
          if (t.contains("logprob") && !t["logprob"].is_null()) {
            rt.logprob = t["logprob"].get<double>();
          }
          tokens.push_back(std::move(rt));
        }
      } catch (const json::exception& e) {
        throw Error(std::string("malformed scoring response: ") + e.what());
      }
      return align_remote_tokens(full, ref_offset, tokens);
    }
    spdlog::debug("scoring request failed (attempt {}): {}", attempt + 1, last_error);
  }
  throw RetriableError("language model request failed: " + last_error, options_.url);
}

SerialProvider::SerialProvider(std::shared_ptr<const TokenProbabilityProvider> inner)
    : inner_(std::move(inner)) {}

std::vector<TokenScore> SerialProvider::score(std::string_view query,
                                              std::string_view ref_text) const {
  std::lock_guard lock(mu_);
  return inner_->score(query, ref_text);
}

}  // namespace coft
