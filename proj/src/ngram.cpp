#include "coft/ngram.hpp"

#include <algorithm>
#include <fstream>

#include "coft/error.hpp"
#include "coft/segmentation.hpp"
#include "coft/text.hpp"

namespace coft {

using nlohmann::json;

namespace {

std::string bigram_key(std::string_view h, std::string_view t) {
  std::string key;
  key.reserve(h.size() + t.size() + 1);
  key.append(h).push_back('\t');
  key.append(t);
  return key;
}

}  // namespace

NgramModel NgramModel::train(std::string_view corpus) {
  const std::string norm = text::nfc(corpus);
  const auto spans = tokenize_words(norm);
  if (spans.empty()) throw Error("empty training corpus");
  NgramModel m;
  std::string prev;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    std::string w = text::lower(spans[i].slice(norm));
    ++m.unigrams_[w];
    if (i > 0) ++m.bigrams_[bigram_key(prev, w)];
    prev = std::move(w);
  }
  ++m.bigrams_[bigram_key(prev, kUnknown)];
  m.total_ = spans.size();
  return m;
}

std::string NgramModel::lookup(std::string_view word) const {
  std::string w = text::lower(text::nfc(word));
  if (unigrams_.contains(w)) return w;
  return std::string(kUnknown);
}

std::uint64_t NgramModel::unigram_count(std::string_view word) const {
  auto it = unigrams_.find(lookup(word));
  return it == unigrams_.end() ? 0 : it->second;
}

std::uint64_t NgramModel::bigram_count(std::string_view history, std::string_view word) const {
  auto it = bigrams_.find(bigram_key(lookup(history), lookup(word)));
  return it == bigrams_.end() ? 0 : it->second;
}

double NgramModel::probability(std::string_view word,
                               std::optional<std::string_view> history) const {
  const double v = static_cast<double>(vocabulary_size());
  const std::string w = lookup(word);
  const auto uni = unigrams_.find(w);
  const double cw = uni == unigrams_.end() ? 0.0 : static_cast<double>(uni->second);
  if (!history) return (cw + 1.0) / (static_cast<double>(total_) + v);
  const std::string h = lookup(*history);
  const auto hc = unigrams_.find(h);
  const double ch = hc == unigrams_.end() ? 0.0 : static_cast<double>(hc->second);
  const auto bi = bigrams_.find(bigram_key(h, w));
  const double chw = bi == bigrams_.end() ? 0.0 : static_cast<double>(bi->second);
  return (chw + 1.0) / (ch + v);
}

json NgramModel::to_json() const {
  std::vector<std::string> vocab;
  vocab.reserve(unigrams_.size() + 1);
  for (const auto& [w, c] : unigrams_) vocab.push_back(w);
  vocab.emplace_back(kUnknown);
  std::sort(vocab.begin(), vocab.end());
  json uni = json::object();
  for (const auto& [w, c] : unigrams_) uni[w] = c;
  json bi = json::object();
  for (const auto& [k, c] : bigrams_) bi[k] = c;
  return {{"order", order()}, {"vocab", vocab}, {"unigrams", uni}, {"bigrams", bi}};
}

NgramModel NgramModel::from_json(const json& j) {
  try {
    if (j.at("order").get<int>() != 2) throw Error("unsupported n-gram order");
    NgramModel m;
    for (const auto& [w, c] : j.at("unigrams").items()) {
      const auto count = c.get<std::uint64_t>();
      if (count == 0) throw Error("unigram count must be positive: " + w);
      m.unigrams_[w] = count;
      m.total_ += count;
    }
    for (const auto& w : j.at("vocab")) {
      const auto& s = w.get_ref<const std::string&>();
      if (s != kUnknown && !m.unigrams_.contains(s)) {
        throw Error("vocabulary word without unigram count: " + s);
      }
    }
    for (const auto& [k, c] : j.at("bigrams").items()) {
      const auto tab = k.find('\t');
      if (tab == std::string::npos || k.find('\t', tab + 1) != std::string::npos) {
        throw Error("bigram key must be two words joined by a tab: " + k);
      }
      const std::string h = k.substr(0, tab);
      const std::string t = k.substr(tab + 1);
      if (!m.unigrams_.contains(h) || (t != kUnknown && !m.unigrams_.contains(t))) {
        throw Error("bigram refers to a word outside the vocabulary: " + k);
      }
      m.bigrams_[k] = c.get<std::uint64_t>();
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed n-gram model: ") + e.what());
  }
}

NgramModel NgramModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open n-gram model: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("malformed n-gram model " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

void NgramModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write n-gram model: " + path.string());
  out << to_json().dump() << '\n';
}

}  // namespace coft
