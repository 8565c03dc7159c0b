// coft: highlight key lexical units in retrieved reference contexts.
//
//   coft highlight --in records.jsonl --out highlighted.jsonl --granularity word
//   coft eval qa --pred pred.jsonl --gold gold.jsonl
//   coft eval segments --pred pred.jsonl --gold gold.jsonl
//   coft mix --relevant rel.jsonl --noisy noisy.jsonl -k 5 -r 0.2 --seed 7
//   coft train-ngram --corpus corpus.txt --out model.json
//
// Exit status: 0 success, 1 some record failed, 2 configuration or usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "coft/eval.hpp"
#include "coft/ngram.hpp"
#include "coft/pipeline.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRecordFailed = 1;
constexpr int kExitUsage = 2;

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("coft");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("COFT_LOG");
  const std::string level = env && *env ? env : "warn";
  static const std::map<std::string, spdlog::level::level_enum> kLevels = {
      {"error", spdlog::level::err},
      {"warn", spdlog::level::warn},
      {"info", spdlog::level::info},
      {"debug", spdlog::level::debug}};
  auto it = kLevels.find(level);
  if (it == kLevels.end()) {
    throw coft::Error("COFT_LOG must be one of error, warn, info, debug");
  }
  spdlog::set_level(it->second);
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw coft::Error("cannot open " + path);
  std::vector<json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw coft::Error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string record_id(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("id")) throw coft::Error(path + ": record without `id`");
  return j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
}

std::string text_of(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_object() && j.contains("text") && j["text"].is_string()) return j["text"];
  throw coft::Error("document record needs a string `text`");
}

struct HighlightArgs {
  std::string in, out, summary;
  std::string granularity = "word";
  std::optional<double> tau;
  bool two_hop = false;
  bool highlights_only = false;
  bool random_baseline = false;
  std::uint64_t seed = 0;
  std::string marker = "**";
  std::string template_path;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::string provider = "ngram";
  std::string ngram_model;
  std::string gazetteer;
};

int run_highlight(const HighlightArgs& a) {
  coft::PipelineConfig config;
  const auto g = coft::parse_granularity(a.granularity);
  if (!g) throw coft::Error("unknown granularity: " + a.granularity);
  config.granularity = *g;
  config.fixed_tau = a.tau;
  config.hops = a.two_hop ? 2 : 1;
  config.highlights_only = a.highlights_only;
  config.random_baseline = a.random_baseline;
  config.seed = a.seed;
  config.marker = a.marker;
  config.workers = std::max<std::size_t>(1, a.workers);
  if (!a.template_path.empty()) config.template_path = a.template_path;
  if (!a.ngram_model.empty()) config.ngram_model_path = a.ngram_model;
  if (!a.gazetteer.empty()) config.gazetteer_path = a.gazetteer;
  config.provider = a.provider == "remote" ? coft::ProviderKind::Remote : coft::ProviderKind::Ngram;
  if (config.provider == coft::ProviderKind::Remote) {
    config.remote = coft::RemoteProvider::options_from_env();
  }
  config.kg = coft::KgSettings::from_env();

  const coft::Pipeline pipeline(std::move(config));
  const auto summary = pipeline.run_batch(std::filesystem::path(a.in), std::filesystem::path(a.out));
  const std::string dumped = summary.to_json().dump(2);
  if (a.summary.empty()) {
    std::cout << dumped << '\n';
  } else {
    std::ofstream(a.summary) << dumped << '\n';
  }
  return summary.failed > 0 ? kExitRecordFailed : kExitOk;
}

int run_eval_qa(const std::string& pred_path, const std::string& gold_path) {
  std::map<std::string, std::string> preds;
  for (const auto& j : read_jsonl(pred_path)) {
    const std::string key = j.contains("prediction") ? "prediction" : "answer";
    preds[record_id(j, pred_path)] = j.value(key, "");
  }
  std::size_t n = 0;
  double em = 0.0, f1 = 0.0;
  for (const auto& j : read_jsonl(gold_path)) {
    const std::string id = record_id(j, gold_path);
    std::vector<std::string> golds;
    if (j.contains("answers")) {
      golds = j["answers"].get<std::vector<std::string>>();
    } else {
      golds.push_back(j.value("answer", ""));
    }
    if (golds.empty()) golds.emplace_back();
    const std::string pred = preds.contains(id) ? preds[id] : "";
    double best_em = 0.0, best_f1 = 0.0;
    for (const auto& gold : golds) {
      best_em = std::max(best_em, static_cast<double>(coft::eval::exact_match(pred, gold)));
      best_f1 = std::max(best_f1, coft::eval::token_f1(pred, gold));
    }
    em += best_em;
    f1 += best_f1;
    ++n;
  }
  json out = {{"count", n},
              {"exact_match", n ? em / static_cast<double>(n) : 0.0},
              {"f1", n ? f1 / static_cast<double>(n) : 0.0}};
  std::cout << out.dump() << '\n';
  return kExitOk;
}

bool label_of(const json& j, const std::string& path) {
  for (const char* key : {"label", "predicted", "gold"}) {
    if (j.contains(key) && j[key].is_boolean()) return j[key].get<bool>();
  }
  throw coft::Error(path + ": record " + record_id(j, path) + " needs a boolean `label`");
}

int run_eval_segments(const std::string& pred_path, const std::string& gold_path,
                      bool positive_class) {
  std::map<std::string, bool> preds;
  for (const auto& j : read_jsonl(pred_path)) preds[record_id(j, pred_path)] = label_of(j, pred_path);
  std::vector<coft::eval::SegmentJudgment> judgments;
  for (const auto& j : read_jsonl(gold_path)) {
    const std::string id = record_id(j, gold_path);
    auto it = preds.find(id);
    if (it == preds.end()) throw coft::Error("no prediction for segment " + id);
    judgments.push_back({id, it->second, label_of(j, gold_path)});
  }
  const auto r = coft::eval::segment_prf(judgments, positive_class);
  json out = {{"count", judgments.size()},
              {"positive_class", positive_class},
              {"precision", r.precision},
              {"recall", r.recall},
              {"f1", r.f1}};
  std::cout << out.dump() << '\n';
  return kExitOk;
}

int run_mix(const std::string& relevant_path, const std::string& noisy_path, std::size_t k,
            double ratio, std::uint64_t seed, const std::string& out_path) {
  std::vector<std::string> relevant, noisy;
  for (const auto& j : read_jsonl(relevant_path)) relevant.push_back(text_of(j));
  for (const auto& j : read_jsonl(noisy_path)) noisy.push_back(text_of(j));
  const auto mix = coft::eval::mix_noise(relevant, noisy, k, ratio, seed);
  json order = json::array();
  for (const auto& d : mix.order) {
    order.push_back({{"text", d.text}, {"noisy", d.noisy}, {"index", d.source_index}});
  }
  json out = {{"k", mix.k},
              {"ratio", mix.ratio},
              {"seed", mix.seed},
              {"noisy_count", mix.noisy_count},
              {"relevant_count", mix.relevant_count},
              {"order", order}};
  if (out_path.empty()) {
    std::cout << out.dump() << '\n';
  } else {
    std::ofstream(out_path, std::ios::binary) << out.dump() << '\n';
  }
  return kExitOk;
}

int run_train(const std::string& corpus_path, const std::string& out_path) {
  std::ifstream in(corpus_path, std::ios::binary);
  if (!in) throw coft::Error("cannot open " + corpus_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  coft::NgramModel::train(ss.str()).save(out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coarse-to-fine highlighting of key lexical units in reference contexts"};
  app.require_subcommand(1);

  HighlightArgs h;
  auto* highlight = app.add_subcommand("highlight", "Highlight a batch of JSONL records");
  highlight->add_option("--in", h.in, "Input JSONL records")->required();
  highlight->add_option("--out", h.out, "Output JSONL records")->required();
  highlight->add_option("--granularity", h.granularity, "word|sentence|paragraph|joint")
      ->check(CLI::IsMember({"word", "sentence", "paragraph", "joint"}));
  highlight->add_option("--tau", h.tau, "Fixed threshold in [0,1]; disables the dynamic rule")
      ->check(CLI::Range(0.0, 1.0));
  highlight->add_flag("--two-hop", h.two_hop, "Expand KG neighbors two hops");
  highlight->add_flag("--highlights-only", h.highlights_only,
                      "Feed only the highlighted units into the prompt");
  auto* seed = highlight->add_option("--seed", h.seed, "Seed for the random baseline");
  highlight->add_flag("--random-baseline", h.random_baseline,
                      "Highlight randomly chosen units (same count)")
      ->needs(seed);
  highlight->add_option("--marker", h.marker, "Highlight marker");
  highlight->add_option("--template", h.template_path, "Prompt template file")
      ->check(CLI::ExistingFile);
  highlight->add_option("--workers", h.workers, "Worker threads")->check(CLI::PositiveNumber);
  highlight->add_option("--provider", h.provider, "ngram|remote")
      ->check(CLI::IsMember({"ngram", "remote"}));
  highlight->add_option("--ngram-model", h.ngram_model, "Bigram model file")
      ->check(CLI::ExistingFile);
  highlight->add_option("--gazetteer", h.gazetteer, "Extra entity labels, one per line")
      ->check(CLI::ExistingFile);
  highlight->add_option("--summary", h.summary, "Write the run summary here instead of stdout");

  auto* eval = app.add_subcommand("eval", "Score predictions");
  eval->require_subcommand(1);
  std::string qa_pred, qa_gold, seg_pred, seg_gold;
  bool positive_class = true;
  auto* qa = eval->add_subcommand("qa", "Exact match and token F1");
  qa->add_option("--pred", qa_pred)->required()->check(CLI::ExistingFile);
  qa->add_option("--gold", qa_gold)->required()->check(CLI::ExistingFile);
  auto* segments = eval->add_subcommand("segments", "Segment precision, recall and F1");
  segments->add_option("--pred", seg_pred)->required()->check(CLI::ExistingFile);
  segments->add_option("--gold", seg_gold)->required()->check(CLI::ExistingFile);
  segments->add_option("--positive-class", positive_class, "Label treated as positive");

  std::string mix_relevant, mix_noisy, mix_out;
  std::size_t mix_k = 0;
  double mix_ratio = 0.0;
  std::uint64_t mix_seed = 0;
  auto* mix = app.add_subcommand("mix", "Mix relevant and noisy documents");
  mix->add_option("--relevant", mix_relevant)->required()->check(CLI::ExistingFile);
  mix->add_option("--noisy", mix_noisy)->required()->check(CLI::ExistingFile);
  mix->add_option("-k", mix_k, "Total documents")->required();
  mix->add_option("-r", mix_ratio, "Noise ratio")->required()->check(CLI::Range(0.0, 1.0));
  mix->add_option("--seed", mix_seed)->required();
  mix->add_option("--out", mix_out, "Output path (default stdout)");

  std::string corpus, model_out;
  auto* train = app.add_subcommand("train-ngram", "Train a bigram model file");
  train->add_option("--corpus", corpus)->required()->check(CLI::ExistingFile);
  train->add_option("--out", model_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    configure_logging();
    if (*highlight) return run_highlight(h);
    if (*qa) return run_eval_qa(qa_pred, qa_gold);
    if (*segments) return run_eval_segments(seg_pred, seg_gold, positive_class);
    if (*mix) return run_mix(mix_relevant, mix_noisy, mix_k, mix_ratio, mix_seed, mix_out);
    if (*train) return run_train(corpus, model_out);
  } catch (const std::exception& e) {
    std::cerr << "coft: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
