#include "coft/kg.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "coft/error.hpp"
#include "coft/text.hpp"
#include "httplib.h"
#include "url.hpp"

namespace coft {

using nlohmann::json;

namespace {

std::vector<std::string> dedup_labels(const std::vector<std::string>& labels) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& label : labels) {
    std::string trimmed(text::trim(label));
    if (trimmed.empty()) continue;
    if (seen.insert(text::normalize(trimmed)).second) out.push_back(trimmed);
  }
  return out;
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

// --- fixture ---------------------------------------------------------------

KgFixture KgFixture::from_json(const json& j) {
  if (!j.is_object() || !j.contains("entities") || !j.contains("neighbors")) {
    throw Error("KG fixture must be an object with `entities` and `neighbors`");
  }
  KgFixture fx;
  for (const auto& [label, id] : j.at("entities").items()) {
    if (!id.is_string()) throw Error("KG fixture entity id must be a string: " + label);
    std::string key = text::normalize(label);
    if (key.empty()) throw Error("KG fixture has an empty entity label");
    fx.entities.emplace(std::move(key), id.get<std::string>());
  }
  for (const auto& [id, labels] : j.at("neighbors").items()) {
    if (!labels.is_array()) throw Error("KG fixture neighbors must be a list: " + id);
    std::vector<std::string> raw;
    for (const auto& l : labels) {
      if (!l.is_string() || text::trim(l.get_ref<const std::string&>()).empty()) {
        throw Error("KG fixture neighbor label must be a non-empty string: " + id);
      }
      raw.push_back(l.get<std::string>());
    }
    fx.neighbors.emplace(id, dedup_labels(raw));
  }
  return fx;
}

KgFixture KgFixture::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open KG fixture: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("malformed KG fixture " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

FixtureKg::FixtureKg(KgFixture fixture) : fixture_(std::move(fixture)) {}

std::optional<std::string> FixtureKg::resolve(std::string_view normalized_label) {
  auto it = fixture_.entities.find(text::normalize(normalized_label));
  if (it == fixture_.entities.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> FixtureKg::neighbor_labels(const std::string& entity_id) {
  auto it = fixture_.neighbors.find(entity_id);
  if (it == fixture_.neighbors.end()) return {};
  return it->second;
}

std::vector<std::string> FixtureKg::known_labels() const {
  std::vector<std::string> out;
  out.reserve(fixture_.entities.size());
  for (const auto& [label, id] : fixture_.entities) out.push_back(label);
  return out;
}

// --- cache -----------------------------------------------------------------

KgCache::KgCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      json rec = json::parse(line);
      entries_[rec.at("id").get<std::string>()] =
          rec.at("neighbors").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      spdlog::warn("skipping corrupt KG cache line {} in {}: {}", lineno,
                   path_.string(), e.what());
    }
  }
}

std::optional<std::vector<std::string>> KgCache::get(const std::string& entity_id) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(entity_id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void KgCache::put(const std::string& entity_id, const std::vector<std::string>& labels) {
  std::unique_lock lock(mu_);
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app);
  if (!out) throw Error("cannot append to KG cache: " + path_.string());
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  json rec = {{"id", entity_id},
              {"neighbors", labels},
              {"fetched_at", std::chrono::duration_cast<std::chrono::seconds>(now).count()}};
  out << rec.dump() << '\n';
  out.flush();
  entries_[entity_id] = labels;
}

std::size_t KgCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

// --- rate limiter ----------------------------------------------------------

RateLimiter::RateLimiter(double requests_per_second) {
  if (!(requests_per_second > 0.0)) throw Error("requests per second must be positive");
  interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / requests_per_second));
  next_ = std::chrono::steady_clock::now();
}

void RateLimiter::acquire() {
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

// --- live client -----------------------------------------------------------

WikidataKg::WikidataKg(Options options)
    : options_(std::move(options)), limiter_(options_.requests_per_second) {
  auto url = detail::split_url(options_.endpoint);
  scheme_host_ = std::move(url.origin);
  path_ = std::move(url.path);
  if (options_.cache_path) cache_ = std::make_unique<KgCache>(*options_.cache_path);
}

json WikidataKg::get_json(const std::multimap<std::string, std::string>& params,
                          const std::string& subject) {
  httplib::Client client(scheme_host_);
  client.set_connection_timeout(std::chrono::milliseconds(options_.timeout_ms));
  client.set_read_timeout(std::chrono::milliseconds(options_.timeout_ms));
  const httplib::Headers headers = {{"User-Agent", "coft-highlighter/0.1"},
                                    {"Accept", "application/json"}};
  std::string last_error;
  for (int attempt = 0; attempt < std::max(1, options_.max_attempts); ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(100 << attempt));
    limiter_.acquire();
    auto res = client.Get(path_, params, headers);
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status != 200) {
      last_error = "HTTP status " + std::to_string(res->status);
    } else {
      try {
        return json::parse(res->body);
      } catch (const json::exception& e) {
        last_error = std::string("malformed response: ") + e.what();
      }
    }
    spdlog::debug("wikidata request for '{}' failed (attempt {}): {}", subject,
                  attempt + 1, last_error);
  }
  throw RetriableError("knowledge graph request failed for '" + subject + "': " + last_error,
                       subject);
}

std::optional<std::string> WikidataKg::resolve(std::string_view normalized_label) {
  const std::string key(normalized_label);
  {
    std::lock_guard lock(resolve_mu_);
    if (auto it = resolved_.find(key); it != resolved_.end()) return it->second;
  }
  json j = get_json({{"action", "wbsearchentities"},
                     {"search", key},
                     {"language", options_.language},
                     {"type", "item"},
                     {"limit", "1"},
                     {"format", "json"}},
                    key);
  std::optional<std::string> id;
  if (j.contains("search") && j["search"].is_array() && !j["search"].empty()) {
    const auto& hit = j["search"][0];
    if (hit.contains("id") && hit["id"].is_string()) id = hit["id"].get<std::string>();
  }
  std::lock_guard lock(resolve_mu_);
  resolved_[key] = id;
  return id;
}

std::vector<std::string> WikidataKg::neighbor_labels(const std::string& entity_id) {
  if (cache_) {
    if (auto hit = cache_->get(entity_id)) return *hit;
  }
  json claims_doc = get_json({{"action", "wbgetentities"},
                              {"ids", entity_id},
                              {"props", "claims"},
                              {"format", "json"}},
                             entity_id);
  std::vector<std::string> ids;
  std::set<std::string> seen;
  const json* claims = nullptr;
  if (claims_doc.contains("entities") && claims_doc["entities"].contains(entity_id)) {
    const json& ent = claims_doc["entities"][entity_id];
    if (ent.contains("claims") && ent["claims"].is_object()) claims = &ent["claims"];
  }
  if (claims) {
    for (const auto& [property, statements] : claims->items()) {
      if (!statements.is_array()) continue;
      for (const auto& st : statements) {
        const json* dv = nullptr;
        if (st.contains("mainsnak") && st["mainsnak"].contains("datavalue")) {
          dv = &st["mainsnak"]["datavalue"];
        }
        if (!dv || dv->value("type", "") != "wikibase-entityid") continue;
        const json& value = (*dv)["value"];
        if (!value.contains("id") || !value["id"].is_string()) continue;
        std::string id = value["id"].get<std::string>();
        if (id != entity_id && seen.insert(id).second) ids.push_back(std::move(id));
      }
    }
  }

  std::vector<std::string> labels;
  constexpr std::size_t kBatch = 50;
  for (std::size_t i = 0; i < ids.size(); i += kBatch) {
    std::string joined;
    for (std::size_t k = i; k < std::min(ids.size(), i + kBatch); ++k) {
      if (!joined.empty()) joined += '|';
      joined += ids[k];
    }
    json labels_doc = get_json({{"action", "wbgetentities"},
                                {"ids", joined},
                                {"props", "labels"},
                                {"languages", options_.language},
                                {"format", "json"}},
                               entity_id);
    if (!labels_doc.contains("entities")) continue;
    const json& ents = labels_doc["entities"];
    for (std::size_t k = i; k < std::min(ids.size(), i + kBatch); ++k) {
      if (!ents.contains(ids[k])) continue;
      const json& ent = ents[ids[k]];
      if (ent.contains("labels") && ent["labels"].contains(options_.language)) {
        labels.push_back(ent["labels"][options_.language].value("value", ""));
      }
    }
  }
  labels = dedup_labels(labels);
  if (cache_) cache_->put(entity_id, labels);
  return labels;
}

// --- settings --------------------------------------------------------------

KgSettings KgSettings::from_env() {
  KgSettings s;
  const std::string mode = env_or("COFT_KG_MODE", "fixture");
  if (mode == "live") {
    s.mode = KgMode::Live;
  } else if (mode == "fixture") {
    s.mode = KgMode::Fixture;
  } else {
    throw Error("COFT_KG_MODE must be 'live' or 'fixture', got '" + mode + "'");
  }
  if (auto p = env_or("COFT_KG_FIXTURE", ""); !p.empty()) s.fixture_path = p;
  if (auto p = env_or("COFT_KG_CACHE", ""); !p.empty()) s.cache_path = p;
  if (auto r = env_or("COFT_KG_RPS", ""); !r.empty()) {
    char* end = nullptr;
    s.requests_per_second = std::strtod(r.c_str(), &end);
    if (end == r.c_str() || *end != '\0' || !(s.requests_per_second > 0.0)) {
      throw Error("COFT_KG_RPS must be a positive number, got '" + r + "'");
    }
  }
  s.endpoint = env_or("COFT_KG_ENDPOINT", s.endpoint);
  return s;
}

json KgSettings::to_json() const {
  json j = {{"mode", mode == KgMode::Live ? "live" : "fixture"},
            {"rps", requests_per_second}};
  j["fixture"] = fixture_path ? json(fixture_path->string()) : json(nullptr);
  j["cache"] = cache_path ? json(cache_path->string()) : json(nullptr);
  if (mode == KgMode::Live) j["endpoint"] = endpoint;
  return j;
}

std::shared_ptr<KgClient> make_kg_client(const KgSettings& settings) {
  if (settings.mode == KgMode::Live) {
    WikidataKg::Options opts;
    opts.endpoint = settings.endpoint;
    opts.cache_path = settings.cache_path;
    opts.requests_per_second = settings.requests_per_second;
    return std::make_shared<WikidataKg>(std::move(opts));
  }
  if (!settings.fixture_path) return std::make_shared<FixtureKg>(KgFixture{});
  return std::make_shared<FixtureKg>(KgFixture::load(*settings.fixture_path));
}

}  // namespace coft
