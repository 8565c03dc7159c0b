#include "coft/recaller.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <tuple>

#include "coft/error.hpp"
#include "coft/stopwords.hpp"
#include "coft/text.hpp"

namespace coft {

namespace {

bool whitespace_only(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    auto cp = text::decode_at(s, i);
    if (!text::is_space(cp.value)) return false;
    i += cp.length;
  }
  return true;
}

// Lowercased word strings of a document, parallel to doc.words.
std::vector<std::string> folded_words(const Document& doc) {
  std::vector<std::string> out;
  out.reserve(doc.words.size());
  for (const Span& w : doc.words) out.push_back(text::normalize(doc.slice(w)));
  return out;
}

std::vector<Span> match_entity(const Document& doc, const std::vector<std::string>& folded,
                               std::string_view normalized) {
  std::vector<Span> out;
  const auto cand_spans = tokenize_words(normalized);
  if (cand_spans.empty()) return out;
  std::vector<std::string_view> cand_words;
  for (const Span& s : cand_spans) cand_words.push_back(s.slice(normalized));
  const std::size_t leading = cand_spans.front().start;
  const std::size_t trailing = normalized.size() - cand_spans.back().end;
  const std::size_t m = cand_words.size();
  const std::size_t n = folded.size();

  std::size_t last_end = 0;
  for (std::size_t i = 0; i + m <= n;) {
    bool words_match = true;
    for (std::size_t k = 0; k < m && words_match; ++k) {
      words_match = folded[i + k] == cand_words[k];
    }
    if (words_match) {
      std::size_t start = doc.words[i].start;
      std::size_t end = doc.words[i + m - 1].end + trailing;
      const bool fits = start >= leading && end <= doc.text.size();
      if (fits) {
        start -= leading;
        if (start >= last_end &&
            text::normalize(std::string_view(doc.text).substr(start, end - start)) ==
                normalized) {
          out.push_back({start, end});
          last_end = end;
          i += m;
          continue;
        }
      }
    }
    ++i;
  }
  return out;
}

// Keeps the first candidate per normalized form, preferring the lower
// source rank. Order of first appearance is preserved.
std::vector<EntityCandidate> dedup(const std::vector<EntityCandidate>& in) {
  std::vector<EntityCandidate> out;
  std::map<std::string, std::size_t> index;
  for (const auto& c : in) {
    if (c.normalized.empty()) continue;
    auto [it, inserted] = index.emplace(c.normalized, out.size());
    if (inserted) {
      out.push_back(c);
    } else if (c.source < out[it->second].source) {
      out[it->second] = c;
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(EntitySource source) noexcept {
  switch (source) {
    case EntitySource::QueryEntity:
      return "query";
    case EntitySource::KgNeighborHop1:
      return "kg_hop1";
    case EntitySource::KgNeighborHop2:
      return "kg_hop2";
  }
  return "unknown";
}

EntityCandidate EntityCandidate::make(std::string surface, EntitySource source) {
  EntityCandidate c;
  c.normalized = text::normalize(surface);
  c.surface = std::move(surface);
  c.source = source;
  return c;
}

std::vector<Span> EntityCandidate::spans_in(std::string_view doc_id) const {
  std::vector<Span> out;
  for (const auto& o : occurrences) {
    if (o.doc_id == doc_id) out.push_back(o.span);
  }
  return out;
}

void Gazetteer::add(std::string_view label) {
  std::string key = text::normalize(label);
  if (key.empty()) return;
  max_words_ = std::max(max_words_, tokenize_words(key).size());
  labels_.insert(std::move(key));
}

void Gazetteer::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open gazetteer file: " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    add(t);
  }
}

std::vector<EntityCandidate> HeuristicExtractor::extract(std::string_view raw) const {
  const std::string query = text::nfc(raw);
  const auto words = tokenize_words(query);
  const std::size_t n = words.size();
  std::vector<bool> covered(n, false);
  std::vector<std::pair<std::size_t, EntityCandidate>> found;

  auto slice = [&](std::size_t first, std::size_t last) {
    return query.substr(words[first].start, words[last].end - words[first].start);
  };
  auto gap_before = [&](std::size_t i) {
    const std::size_t from = i == 0 ? 0 : words[i - 1].end;
    return std::string_view(query).substr(from, words[i].start - from);
  };

  // Slice end extended through punctuation glued to the last word ("D.C.").
  auto glued_end = [&](std::size_t last) {
    std::size_t e = words[last].end;
    const std::size_t limit = last + 1 < n ? words[last + 1].start : query.size();
    while (e < limit) {
      const auto cp = text::decode_at(query, e);
      if (text::is_space(cp.value)) break;
      e += cp.length;
    }
    return e;
  };

  // Gazetteer: greedy left to right, longest match first.
  for (std::size_t i = 0; i < n;) {
    std::size_t best = 0;
    std::string surface;
    for (std::size_t m = std::min(gazetteer_.max_words(), n - i); m >= 1 && best == 0; --m) {
      const std::size_t last = i + m - 1;
      for (std::size_t end : {words[last].end, glued_end(last)}) {
        std::string s = query.substr(words[i].start, end - words[i].start);
        if (gazetteer_.contains(text::normalize(s))) {
          best = m;
          surface = std::move(s);
          break;
        }
      }
    }
    if (best == 0) {
      ++i;
      continue;
    }
    found.emplace_back(words[i].start,
                       EntityCandidate::make(std::move(surface), EntitySource::QueryEntity));
    std::fill(covered.begin() + static_cast<std::ptrdiff_t>(i),
              covered.begin() + static_cast<std::ptrdiff_t>(i + best), true);
    i += best;
  }

  // Capitalized runs, skipping sentence-initial stopwords ("Which", "The").
  auto sentence_initial = [&](std::size_t i) {
    if (i == 0) return true;
    return gap_before(i).find_first_of(".!?") != std::string_view::npos;
  };
  auto capitalized = [&](std::size_t i) {
    if (covered[i]) return false;
    const auto word = words[i].slice(query);
    if (!text::is_upper(text::decode_at(word, 0).value)) return false;
    return !(sentence_initial(i) && is_stopword(word));
  };
  // Initialisms ("D.C.") join across a bare period and keep the final one.
  auto initialism_gap = [&](std::size_t i) { return gap_before(i) == "."; };
  for (std::size_t i = 0; i < n; ++i) {
    if (!capitalized(i)) continue;
    std::size_t j = i;
    bool initialism = false;
    while (j + 1 < n && capitalized(j + 1)) {
      if (initialism_gap(j + 1)) {
        initialism = true;
      } else if (!whitespace_only(gap_before(j + 1))) {
        break;
      }
      ++j;
    }
    std::string surface = slice(i, j);
    if (initialism && query.compare(words[j].end, 1, ".") == 0) surface += '.';
    found.emplace_back(words[i].start,
                       EntityCandidate::make(std::move(surface), EntitySource::QueryEntity));
    for (std::size_t k = i; k <= j; ++k) covered[k] = true;
    i = j;
  }

  // Remaining content words approximate nouns.
  for (std::size_t i = 0; i < n; ++i) {
    if (covered[i]) continue;
    const auto word = words[i].slice(query);
    if (text::codepoint_count(word) < 3 || is_stopword(word)) continue;
    found.emplace_back(words[i].start,
                       EntityCandidate::make(std::string(word), EntitySource::QueryEntity));
  }

  std::stable_sort(found.begin(), found.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<EntityCandidate> ordered;
  ordered.reserve(found.size());
  for (auto& [pos, c] : found) ordered.push_back(std::move(c));
  return dedup(ordered);
}

std::vector<EntityCandidate> extract_query_entities(std::string_view query,
                                                    const Gazetteer& gazetteer) {
  return HeuristicExtractor(gazetteer).extract(query);
}

std::vector<EntityCandidate> expand_neighbors(const std::vector<EntityCandidate>& candidates,
                                              KgClient& kg, int hops) {
  if (hops != 1 && hops != 2) throw Error("hops must be 1 or 2");
  std::vector<EntityCandidate> out = dedup(candidates);
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < out.size(); ++i) seen.emplace(out[i].normalized, i);

  auto neighbors_of = [&kg](const std::string& normalized) -> std::vector<std::string> {
    auto id = kg.resolve(normalized);
    if (!id) return {};
    return kg.neighbor_labels(*id);
  };
  auto add = [&](const std::string& label, EntitySource source) {
    auto c = EntityCandidate::make(label, source);
    if (c.normalized.empty() || seen.contains(c.normalized)) return;
    seen.emplace(c.normalized, out.size());
    out.push_back(std::move(c));
  };

  const std::size_t base = out.size();
  std::vector<std::string> hop1;
  for (std::size_t i = 0; i < base; ++i) {
    for (const auto& label : neighbors_of(out[i].normalized)) {
      hop1.push_back(text::normalize(label));
      add(label, EntitySource::KgNeighborHop1);
    }
  }
  if (hops == 2) {
    for (const auto& label : hop1) {
      for (const auto& next : neighbors_of(label)) add(next, EntitySource::KgNeighborHop2);
    }
  }
  return out;
}

std::vector<Span> find_occurrences(const Document& doc, std::string_view normalized) {
  return match_entity(doc, folded_words(doc), normalized);
}

std::vector<EntityCandidate> filter_in_context(const std::vector<EntityCandidate>& candidates,
                                               std::span<const Document> docs) {
  std::vector<std::vector<std::string>> folded;
  folded.reserve(docs.size());
  for (const auto& d : docs) folded.push_back(folded_words(d));

  using Key = std::tuple<std::size_t, std::size_t, EntitySource, std::string>;
  std::vector<std::pair<Key, EntityCandidate>> kept;
  for (auto c : dedup(candidates)) {
    c.occurrences.clear();
    Key key{docs.size(), 0, c.source, c.normalized};
    for (std::size_t d = 0; d < docs.size(); ++d) {
      for (const Span& s : match_entity(docs[d], folded[d], c.normalized)) {
        if (c.occurrences.empty()) key = Key{d, s.start, c.source, c.normalized};
        c.occurrences.push_back({docs[d].id, s});
      }
    }
    if (!c.occurrences.empty()) kept.emplace_back(std::move(key), std::move(c));
  }
  std::sort(kept.begin(), kept.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<EntityCandidate> out;
  out.reserve(kept.size());
  for (auto& [key, c] : kept) out.push_back(std::move(c));
  return out;
}

}  // namespace coft
