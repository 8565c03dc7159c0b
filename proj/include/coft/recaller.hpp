#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "coft/kg.hpp"
#include "coft/segmentation.hpp"
#include "coft/span.hpp"

namespace coft {

// Declaration order is dedup precedence: a query entity beats a hop-1
// neighbor, which beats a hop-2 neighbor.
enum class EntitySource { QueryEntity = 0, KgNeighborHop1 = 1, KgNeighborHop2 = 2 };

std::string_view to_string(EntitySource source) noexcept;

struct Occurrence {
  std::string doc_id;
  Span span;

  friend bool operator==(const Occurrence&, const Occurrence&) = default;
};

struct EntityCandidate {
  std::string surface;
  std::string normalized;
  EntitySource source = EntitySource::QueryEntity;
  std::vector<Occurrence> occurrences;

  static EntityCandidate make(std::string surface, EntitySource source);

  // Occurrences restricted to one document.
  std::vector<Span> spans_in(std::string_view doc_id) const;
};

// Normalized labels for longest-match lookup.
class Gazetteer {
 public:
  Gazetteer() = default;

  void add(std::string_view label);
  bool contains(std::string_view normalized) const { return labels_.contains(normalized); }
  std::size_t max_words() const noexcept { return max_words_; }
  std::size_t size() const noexcept { return labels_.size(); }

  // One label per line; blank lines and lines starting with '#' ignored.
  void load_file(const std::filesystem::path& path);

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::unordered_set<std::string, Hash, std::equal_to<>> labels_;
  std::size_t max_words_ = 0;
};

// Pluggable query entity extraction.
class EntityExtractor {
 public:
  virtual ~EntityExtractor() = default;
  virtual std::vector<EntityCandidate> extract(std::string_view query) const = 0;
};

// Gazetteer longest match plus capitalized-run and content-word heuristics.
class HeuristicExtractor final : public EntityExtractor {
 public:
  explicit HeuristicExtractor(const Gazetteer& gazetteer) : gazetteer_(gazetteer) {}
  std::vector<EntityCandidate> extract(std::string_view query) const override;

 private:
  const Gazetteer& gazetteer_;
};

std::vector<EntityCandidate> extract_query_entities(std::string_view query,
                                                    const Gazetteer& gazetteer);

// Unions one-hop (and for hops == 2, two-hop) KG neighbor labels into the
// candidate list. Unresolvable candidates pass through unchanged.
std::vector<EntityCandidate> expand_neighbors(const std::vector<EntityCandidate>& candidates,
                                              KgClient& kg, int hops);

// Word-aligned, case-insensitive, whitespace-collapsed matches of
// `normalized` in `doc`. Matches of one entity never overlap.
std::vector<Span> find_occurrences(const Document& doc, std::string_view normalized);

// Keeps candidates that occur in at least one document and fills their
// occurrences. Ordered by first occurrence, then source precedence.
std::vector<EntityCandidate> filter_in_context(const std::vector<EntityCandidate>& candidates,
                                               std::span<const Document> docs);

}  // namespace coft
