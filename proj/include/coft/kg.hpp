#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace coft {

// Offline knowledge graph: normalized label -> entity id, entity id ->
// neighbor labels. File fields are exactly `entities` and `neighbors`.
struct KgFixture {
  std::map<std::string, std::string> entities;
  std::map<std::string, std::vector<std::string>> neighbors;

  static KgFixture from_json(const nlohmann::json& j);
  static KgFixture load(const std::filesystem::path& path);
};

// Knowledge-graph lookups used for neighbor expansion. Implementations must
// be safe to call from several workers at once.
class KgClient {
 public:
  virtual ~KgClient() = default;

  // Entity id for a normalized label, or nullopt when unknown.
  virtual std::optional<std::string> resolve(std::string_view normalized_label) = 0;

  // Labels of entities that are values of any direct statement of `entity_id`.
  virtual std::vector<std::string> neighbor_labels(const std::string& entity_id) = 0;

  // Labels this client can enumerate up front (used to seed the gazetteer).
  virtual std::vector<std::string> known_labels() const { return {}; }
};

class FixtureKg final : public KgClient {
 public:
  explicit FixtureKg(KgFixture fixture);

  std::optional<std::string> resolve(std::string_view normalized_label) override;
  std::vector<std::string> neighbor_labels(const std::string& entity_id) override;
  std::vector<std::string> known_labels() const override;

 private:
  KgFixture fixture_;
};

// Append-only JSON-lines cache of neighbor lists keyed by entity id.
// Many readers, one writer at a time.
class KgCache {
 public:
  explicit KgCache(std::filesystem::path path);

  std::optional<std::vector<std::string>> get(const std::string& entity_id) const;
  void put(const std::string& entity_id, const std::vector<std::string>& labels);
  std::size_t size() const;

 private:
  std::filesystem::path path_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, std::vector<std::string>> entries_;
};

// Spaces calls at least 1/rps seconds apart.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second);
  void acquire();

 private:
  std::mutex mu_;
  std::chrono::steady_clock::duration interval_;
  std::chrono::steady_clock::time_point next_;
};

// Live client for the public Wikidata action API.
class WikidataKg final : public KgClient {
 public:
  struct Options {
    std::string endpoint = "https://www.wikidata.org/w/api.php";
    std::optional<std::filesystem::path> cache_path;
    double requests_per_second = 2.0;
    int timeout_ms = 30000;
    int max_attempts = 3;
    std::string language = "en";
  };

  explicit WikidataKg(Options options);

  std::optional<std::string> resolve(std::string_view normalized_label) override;
  std::vector<std::string> neighbor_labels(const std::string& entity_id) override;

 private:
  nlohmann::json get_json(const std::multimap<std::string, std::string>& params,
                          const std::string& subject);

  Options options_;
  std::string scheme_host_;
  std::string path_;
  std::unique_ptr<KgCache> cache_;
  RateLimiter limiter_;
  std::mutex resolve_mu_;
  std::unordered_map<std::string, std::optional<std::string>> resolved_;
};

enum class KgMode { Live, Fixture };

struct KgSettings {
  KgMode mode = KgMode::Fixture;
  std::optional<std::filesystem::path> fixture_path;
  std::optional<std::filesystem::path> cache_path;
  double requests_per_second = 2.0;
  std::string endpoint = "https://www.wikidata.org/w/api.php";

  // Reads COFT_KG_MODE, COFT_KG_FIXTURE, COFT_KG_CACHE, COFT_KG_RPS and
  // COFT_KG_ENDPOINT.
  static KgSettings from_env();
  nlohmann::json to_json() const;
};

// Fixture mode without a fixture path yields an empty graph.
std::shared_ptr<KgClient> make_kg_client(const KgSettings& settings);

}  // namespace coft
