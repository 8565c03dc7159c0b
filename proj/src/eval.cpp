#include "coft/eval.hpp"

#include <cfenv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "coft/error.hpp"
#include "coft/random.hpp"
#include "coft/text.hpp"

namespace coft::eval {

namespace {

std::vector<std::string> answer_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in(normalize_answer(s));
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::string normalize_answer(std::string_view s) {
  const std::string lowered = text::lower(s);
  std::string no_punct;
  no_punct.reserve(lowered.size());
  for (std::size_t i = 0; i < lowered.size();) {
    const auto cp = text::decode_at(lowered, i);
    if (!text::is_punct(cp.value)) no_punct.append(lowered, i, cp.length);
    i += cp.length;
  }
  std::string out;
  std::istringstream words(no_punct);
  std::string w;
  while (words >> w) {
    if (w == "a" || w == "an" || w == "the") continue;
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

int exact_match(std::string_view pred, std::string_view gold) {
  return normalize_answer(pred) == normalize_answer(gold) ? 1 : 0;
}

double token_f1(std::string_view pred, std::string_view gold) {
  const auto p = answer_tokens(pred);
  const auto g = answer_tokens(gold);
  if (p.empty() && g.empty()) return 1.0;
  if (p.empty() || g.empty()) return 0.0;
  std::map<std::string, std::size_t> gold_counts;
  for (const auto& t : g) ++gold_counts[t];
  std::size_t common = 0;
  for (const auto& t : p) {
    auto it = gold_counts.find(t);
    if (it != gold_counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(p.size());
  const double recall = static_cast<double>(common) / static_cast<double>(g.size());
  return 2.0 * precision * recall / (precision + recall);
}

PrecisionRecall segment_prf(std::span<const SegmentJudgment> judgments, bool positive_class) {
  if (judgments.empty()) throw Error("segment_prf needs at least one judgment");
  std::set<std::string_view> ids;
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& j : judgments) {
    if (!ids.insert(j.id).second) throw Error("duplicate segment id " + j.id);
    const bool pred = j.predicted == positive_class;
    const bool gold = j.gold == positive_class;
    if (pred && gold) ++tp;
    if (pred && !gold) ++fp;
    if (!pred && gold) ++fn;
  }
  PrecisionRecall r;
  if (tp + fp > 0) r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (r.precision + r.recall > 0.0) {
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  }
  return r;
}

NoiseMix mix_noise(std::span<const std::string> relevant, std::span<const std::string> noisy,
                   std::size_t k, double ratio, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw Error("noise ratio must lie in [0, 1]");
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const auto noisy_count = static_cast<std::size_t>(std::nearbyint(static_cast<double>(k) * ratio));
  std::fesetround(saved);
  const std::size_t relevant_count = k - noisy_count;
  if (noisy.size() < noisy_count) {
    throw Error("need " + std::to_string(noisy_count) + " noisy documents, have " +
                std::to_string(noisy.size()) + " (short by " +
                std::to_string(noisy_count - noisy.size()) + ")");
  }
  if (relevant.size() < relevant_count) {
    throw Error("need " + std::to_string(relevant_count) + " relevant documents, have " +
                std::to_string(relevant.size()) + " (short by " +
                std::to_string(relevant_count - relevant.size()) + ")");
  }
  NoiseMix mix;
  mix.k = k;
  mix.ratio = ratio;
  mix.seed = seed;
  mix.noisy_count = noisy_count;
  mix.relevant_count = relevant_count;
  for (std::size_t i = 0; i < relevant_count; ++i) mix.order.push_back({relevant[i], false, i});
  for (std::size_t i = 0; i < noisy_count; ++i) mix.order.push_back({noisy[i], true, i});
  deterministic_shuffle(mix.order, seed);
  return mix;
}

}  // namespace coft::eval
