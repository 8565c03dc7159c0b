#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coft/error.hpp"
#include "coft/kg.hpp"
#include "coft/prompt.hpp"
#include "coft/provider.hpp"
#include "coft/recaller.hpp"
#include "coft/scorer.hpp"
#include "coft/selector.hpp"
#include "json.hpp"

namespace coft {

struct RefInput {
  std::string id;
  std::string text;
};

// One line of batch input: {"id", "query", "instructions"?, "refs": [{"id", "text"}]}.
struct InputRecord {
  std::string id;
  std::string query;
  std::string instructions;
  std::vector<RefInput> refs;

  static InputRecord from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct RefOutput {
  std::string id;
  Granularity granularity = Granularity::Word;
  // NFC-normalized reference text with highlight markers inserted.
  std::string highlighted_text;
  Threshold threshold;
  std::vector<Span> selected;
  std::vector<WeightRecord> weights;
  std::optional<std::string> highlights_only;
  std::size_t entities_highlighted = 0;
};

struct OutputRecord {
  std::string id;
  std::vector<EntityCandidate> candidates;
  std::vector<RefOutput> refs;
  std::string prompt;

  nlohmann::json to_json() const;
};

// Failure of one record, tagged with where it happened.
class RecordError : public Error {
 public:
  RecordError(std::string record_id, std::string ref_id, const std::string& what, bool retriable);

  const std::string& record_id() const noexcept { return record_id_; }
  const std::string& ref_id() const noexcept { return ref_id_; }
  bool retriable() const noexcept { return retriable_; }

 private:
  std::string record_id_;
  std::string ref_id_;
  bool retriable_;
};

enum class ProviderKind { Ngram, Remote };

struct PipelineConfig {
  Granularity granularity = Granularity::Word;
  // Fixed threshold; disables the dynamic rule when set.
  std::optional<double> fixed_tau;
  int hops = 1;
  bool highlights_only = false;
  bool random_baseline = false;
  std::uint64_t seed = 0;
  std::string marker = "**";
  std::string joiner = std::string(kDefaultJoiner);
  std::optional<std::filesystem::path> template_path;
  std::size_t workers = 1;
  ProviderKind provider = ProviderKind::Ngram;
  // Without a model file each record trains its own model on its query and
  // references.
  std::optional<std::filesystem::path> ngram_model_path;
  std::optional<std::filesystem::path> gazetteer_path;
  KgSettings kg;
  RemoteProvider::Options remote;

  nlohmann::json to_json() const;
};

struct BatchFailure {
  std::size_t line = 0;  // 1-based
  std::string id;
  std::string error;
};

struct BatchSummary {
  std::size_t processed = 0;
  std::size_t failed = 0;
  std::size_t entities_highlighted = 0;
  std::vector<BatchFailure> failures;
  nlohmann::json config;

  nlohmann::json to_json() const;
};

std::string assemble_prompt(const PromptTemplate& tpl, const InputRecord& record,
                            std::span<const std::string> highlighted_refs);

class Pipeline {
 public:
  // Builds the KG client, provider, gazetteer and template from `config`.
  explicit Pipeline(PipelineConfig config);

  // `provider` may be null: each record then trains its own n-gram model.
  Pipeline(PipelineConfig config, std::shared_ptr<KgClient> kg,
           std::shared_ptr<const TokenProbabilityProvider> provider, Gazetteer gazetteer,
           PromptTemplate prompt_template);

  // Recall, score, select and highlight every reference of one record.
  OutputRecord run_record(const InputRecord& record) const;

  // Line-delimited records in, one output line per successful record out,
  // in input order regardless of the worker count.
  BatchSummary run_batch(std::istream& in, std::ostream& out) const;
  BatchSummary run_batch(const std::filesystem::path& in, const std::filesystem::path& out) const;

  const PipelineConfig& config() const noexcept { return config_; }

 private:
  PipelineConfig config_;
  std::shared_ptr<KgClient> kg_;
  std::shared_ptr<const TokenProbabilityProvider> provider_;
  Gazetteer gazetteer_;
  PromptTemplate template_;
};

}  // namespace coft
