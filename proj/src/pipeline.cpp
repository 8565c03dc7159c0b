#include "coft/pipeline.hpp"

#include <atomic>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "coft/ngram.hpp"
#include "coft/random.hpp"
#include "coft/text.hpp"

namespace coft {

using nlohmann::json;

namespace {

json span_json(const Span& s) { return {{"start", s.start}, {"end", s.end}}; }

PromptTemplate template_for(const PipelineConfig& config) {
  return config.template_path ? PromptTemplate::load(*config.template_path)
                              : PromptTemplate::default_template();
}

std::shared_ptr<const TokenProbabilityProvider> provider_for(const PipelineConfig& config) {
  std::shared_ptr<const TokenProbabilityProvider> p;
  if (config.provider == ProviderKind::Remote) {
    p = std::make_shared<RemoteProvider>(config.remote);
  } else if (config.ngram_model_path) {
    p = std::make_shared<NgramProvider>(
        std::make_shared<const NgramModel>(NgramModel::load(*config.ngram_model_path)));
  }
  if (p && !p->concurrent()) p = std::make_shared<SerialProvider>(p);
  return p;
}

Gazetteer gazetteer_for(const PipelineConfig& config, const KgClient& kg) {
  Gazetteer g;
  for (const auto& label : kg.known_labels()) g.add(label);
  if (config.gazetteer_path) g.load_file(*config.gazetteer_path);
  return g;
}

// Distinct entities with an occurrence inside a selected span.
std::size_t count_highlighted(const Document& doc, const std::vector<EntityCandidate>& cands,
                              const std::vector<Span>& selected) {
  std::size_t n = 0;
  for (const auto& c : cands) {
    bool hit = false;
    for (const Span& s : c.spans_in(doc.id)) {
      for (const Span& sel : selected) {
        if (sel.overlaps(s)) {
          hit = true;
          break;
        }
      }
      if (hit) break;
    }
    if (hit) ++n;
  }
  return n;
}

}  // namespace

// --- records ---------------------------------------------------------------

InputRecord InputRecord::from_json(const json& j) {
  if (!j.is_object()) throw Error("record must be an object");
  InputRecord r;
  if (!j.contains("id") || !j["id"].is_string() || j["id"].get_ref<const std::string&>().empty()) {
    throw Error("record needs a non-empty string `id`");
  }
  r.id = j["id"].get<std::string>();
  if (!j.contains("query") || !j["query"].is_string()) {
    throw Error("record " + r.id + " needs a string `query`");
  }
  r.query = j["query"].get<std::string>();
  if (j.contains("instructions") && !j["instructions"].is_null()) {
    if (!j["instructions"].is_string()) throw Error("record " + r.id + ": `instructions` must be a string");
    r.instructions = j["instructions"].get<std::string>();
  }
  if (!j.contains("refs") || !j["refs"].is_array() || j["refs"].empty()) {
    throw Error("record " + r.id + " needs a non-empty `refs` list");
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < j["refs"].size(); ++i) {
    const json& ref = j["refs"][i];
    if (!ref.is_object() || !ref.contains("text") || !ref["text"].is_string()) {
      throw Error("record " + r.id + ": ref " + std::to_string(i) + " needs a string `text`");
    }
    RefInput in;
    in.id = ref.contains("id") && ref["id"].is_string() ? ref["id"].get<std::string>()
                                                        : std::to_string(i);
    in.text = ref["text"].get<std::string>();
    if (!ids.insert(in.id).second) throw Error("record " + r.id + ": duplicate ref id " + in.id);
    r.refs.push_back(std::move(in));
  }
  return r;
}

json InputRecord::to_json() const {
  json refs_json = json::array();
  for (const auto& r : refs) refs_json.push_back({{"id", r.id}, {"text", r.text}});
  json j = {{"id", id}, {"query", query}, {"refs", refs_json}};
  if (!instructions.empty()) j["instructions"] = instructions;
  return j;
}

json OutputRecord::to_json() const {
  json cands = json::array();
  for (const auto& c : candidates) {
    cands.push_back({{"entity", c.normalized},
                     {"surface", c.surface},
                     {"source", to_string(c.source)},
                     {"occurrences", c.occurrences.size()}});
  }
  json refs_json = json::array();
  for (const auto& r : refs) {
    json selected = json::array();
    for (const Span& s : r.selected) selected.push_back(span_json(s));
    json weights = json::array();
    for (const auto& w : r.weights) {
      weights.push_back({{"entity", w.entity},
                         {"tf_isf", w.tf_isf},
                         {"self_info", w.self_info},
                         {"weight", w.weight}});
    }
    json ref = {{"id", r.id},
                {"granularity", to_string(r.granularity)},
                {"highlighted_text", r.highlighted_text},
                {"tau", r.threshold.tau},
                {"tau_len", r.threshold.tau_len},
                {"tau_info", r.threshold.tau_info},
                {"selected", selected},
                {"weights", weights}};
    if (r.highlights_only) ref["highlights_only"] = *r.highlights_only;
    refs_json.push_back(std::move(ref));
  }
  return {{"id", id}, {"candidates", cands}, {"refs", refs_json}, {"prompt", prompt}};
}

RecordError::RecordError(std::string record_id, std::string ref_id, const std::string& what,
                         bool retriable)
    : Error("record " + record_id + (ref_id.empty() ? "" : " ref " + ref_id) + ": " + what),
      record_id_(std::move(record_id)),
      ref_id_(std::move(ref_id)),
      retriable_(retriable) {}

json PipelineConfig::to_json() const {
  json j = {{"granularity", to_string(granularity)},
            {"tau_mode", fixed_tau ? "fixed" : "dynamic"},
            {"hops", hops},
            {"highlights_only", highlights_only},
            {"random_baseline", random_baseline},
            {"seed", seed},
            {"marker", marker},
            {"joiner", joiner},
            {"workers", workers},
            {"provider", provider == ProviderKind::Remote ? "remote" : "ngram"},
            {"kg", kg.to_json()}};
  j["tau"] = fixed_tau ? json(*fixed_tau) : json(nullptr);
  j["template"] = template_path ? json(template_path->string()) : json("default");
  j["gazetteer"] = gazetteer_path ? json(gazetteer_path->string()) : json(nullptr);
  if (provider == ProviderKind::Remote) {
    j["lm_url"] = remote.url;
    j["lm_timeout_ms"] = remote.timeout_ms;
  } else {
    j["ngram_model"] = ngram_model_path ? json(ngram_model_path->string()) : json("per-record");
  }
  return j;
}

json BatchSummary::to_json() const {
  json fails = json::array();
  for (const auto& f : failures) {
    fails.push_back({{"line", f.line}, {"id", f.id}, {"error", f.error}});
  }
  return {{"records_processed", processed},
          {"records_failed", failed},
          {"entities_highlighted", entities_highlighted},
          {"failures", fails},
          {"config", config}};
}

std::string assemble_prompt(const PromptTemplate& tpl, const InputRecord& record,
                            std::span<const std::string> highlighted_refs) {
  return tpl.render(record.instructions, record.query, highlighted_refs);
}

// --- pipeline --------------------------------------------------------------

Pipeline::Pipeline(PipelineConfig config)
    : config_(std::move(config)),
      kg_(make_kg_client(config_.kg)),
      provider_(provider_for(config_)),
      gazetteer_(gazetteer_for(config_, *kg_)),
      template_(template_for(config_)) {
  if (config_.hops != 1 && config_.hops != 2) throw Error("hops must be 1 or 2");
  if (config_.fixed_tau && !(*config_.fixed_tau >= 0.0 && *config_.fixed_tau <= 1.0)) {
    throw Error("tau must lie in [0, 1]");
  }
  if (config_.marker.empty()) throw Error("marker must not be empty");
}

Pipeline::Pipeline(PipelineConfig config, std::shared_ptr<KgClient> kg,
                   std::shared_ptr<const TokenProbabilityProvider> provider, Gazetteer gazetteer,
                   PromptTemplate prompt_template)
    : config_(std::move(config)),
      kg_(std::move(kg)),
      provider_(std::move(provider)),
      gazetteer_(std::move(gazetteer)),
      template_(std::move(prompt_template)) {
  if (!kg_) kg_ = std::make_shared<FixtureKg>(KgFixture{});
  if (provider_ && !provider_->concurrent()) provider_ = std::make_shared<SerialProvider>(provider_);
}

OutputRecord Pipeline::run_record(const InputRecord& record) const {
  if (record.id.empty()) throw RecordError("", "", "record id must not be empty", false);
  if (record.refs.empty()) throw RecordError(record.id, "", "record has no refs", false);

  OutputRecord out;
  out.id = record.id;

  std::vector<Document> docs;
  docs.reserve(record.refs.size());
  for (const auto& ref : record.refs) docs.push_back(segment_document(ref.id, ref.text));

  // Recall: query entities, KG neighbors, then keep what occurs in context.
  try {
    auto candidates = extract_query_entities(record.query, gazetteer_);
    candidates = expand_neighbors(candidates, *kg_, config_.hops);
    out.candidates = filter_in_context(candidates, docs);
  } catch (const RetriableError& e) {
    throw RecordError(record.id, "", e.what(), true);
  } catch (const Error& e) {
    throw RecordError(record.id, "", e.what(), false);
  }

  std::shared_ptr<const TokenProbabilityProvider> provider = provider_;
  if (!provider) {
    std::string corpus = record.query;
    for (const auto& d : docs) corpus.append("\n\n").append(d.text);
    try {
      provider = std::make_shared<NgramProvider>(
          std::make_shared<const NgramModel>(NgramModel::train(corpus)));
    } catch (const Error& e) {
      throw RecordError(record.id, "", e.what(), false);
    }
  }

  // Score every reference.
  std::vector<std::vector<WeightRecord>> weights(docs.size());
  std::vector<std::vector<EntityCandidate>> doc_candidates(docs.size());
  std::vector<ContextStats> stats(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const Document& doc = docs[i];
    try {
      for (const auto& c : out.candidates) {
        if (!c.spans_in(doc.id).empty()) doc_candidates[i].push_back(c);
      }
      const auto tokens = token_logprobs(*provider, record.query, doc.text);
      weights[i] = contextual_weights(doc, doc_candidates[i], tokens);
      stats[i] = {doc.word_count, total_self_information(tokens)};
    } catch (const RetriableError& e) {
      throw RecordError(record.id, doc.id, e.what(), true);
    } catch (const Error& e) {
      throw RecordError(record.id, doc.id, e.what(), false);
    }
  }

  // Select and highlight.
  const auto thresholds = dynamic_threshold(stats);
  std::vector<std::string> prompt_refs;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const Document& doc = docs[i];
    RefOutput ref;
    ref.id = doc.id;
    ref.granularity = config_.granularity;
    ref.threshold = thresholds[i];
    if (config_.fixed_tau) ref.threshold.tau = *config_.fixed_tau;
    ref.weights = weights[i];
    try {
      const auto units = score_units(doc, config_.granularity, weights[i], doc_candidates[i]);
      ref.selected = select_units(units, ref.threshold.tau);
      if (config_.random_baseline) {
        const std::uint64_t seed = mix_seed(config_.seed, record.id + '\x1f' + doc.id);
        ref.selected = random_selection(units, ref.selected.size(), seed);
      }
      if (config_.granularity == Granularity::Joint) {
        ref.selected = joint_promote(doc, ref.selected);
      }
      ref.highlighted_text = apply_highlights(doc.text, ref.selected, config_.marker);
      if (config_.highlights_only) {
        ref.highlights_only = highlights_only(doc.text, ref.selected, config_.joiner);
      }
    } catch (const Error& e) {
      throw RecordError(record.id, doc.id, e.what(), false);
    }
    ref.entities_highlighted = count_highlighted(doc, doc_candidates[i], ref.selected);
    prompt_refs.push_back(ref.highlights_only ? *ref.highlights_only : ref.highlighted_text);
    out.refs.push_back(std::move(ref));
  }
  out.prompt = assemble_prompt(template_, record, prompt_refs);
  return out;
}

BatchSummary Pipeline::run_batch(std::istream& in, std::ostream& out) const {
  struct Slot {
    std::size_t line = 0;
    std::optional<InputRecord> record;
    std::string id;
    std::string error;
    std::string output;
    std::size_t entities = 0;
  };

  std::vector<Slot> slots;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    Slot slot;
    slot.line = lineno;
    try {
      const json j = json::parse(line);
      if (j.is_object() && j.contains("id") && j["id"].is_string()) slot.id = j["id"];
      auto rec = InputRecord::from_json(j);
      if (!ids.insert(rec.id).second) throw Error("duplicate record id " + rec.id);
      slot.record = std::move(rec);
    } catch (const std::exception& e) {
      slot.error = e.what();
    }
    slots.push_back(std::move(slot));
  }

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < slots.size(); i = next++) {
      Slot& s = slots[i];
      if (!s.record) continue;
      try {
        OutputRecord rec = run_record(*s.record);
        for (const auto& r : rec.refs) s.entities += r.entities_highlighted;
        s.output = rec.to_json().dump();
      } catch (const std::exception& e) {
        s.error = e.what();
      }
    }
  };
  const std::size_t workers =
      std::max<std::size_t>(1, std::min(config_.workers, std::max<std::size_t>(1, slots.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  BatchSummary summary;
  summary.config = config_.to_json();
  for (const auto& s : slots) {
    if (!s.error.empty()) {
      ++summary.failed;
      summary.failures.push_back({s.line, s.id, s.error});
      spdlog::warn("line {}: {}", s.line, s.error);
      continue;
    }
    ++summary.processed;
    summary.entities_highlighted += s.entities;
    out << s.output << '\n';
  }
  out.flush();
  return summary;
}

BatchSummary Pipeline::run_batch(const std::filesystem::path& in_path,
                                 const std::filesystem::path& out_path) const {
  std::ifstream in(in_path, std::ios::binary);
  if (!in) throw Error("cannot open input: " + in_path.string());
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open output: " + out_path.string());
  return run_batch(in, out);
}

}  // namespace coft
