#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "coft/error.hpp"
#include "coft/pipeline.hpp"
#include "coft/text.hpp"

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

coft::PipelineConfig base_config() {
  coft::PipelineConfig c;
  c.kg.fixture_path = COFT_TEST_DATA_DIR "/walkthrough_kg.json";
  return c;
}

coft::InputRecord record(const std::string& id, const std::string& query,
                         std::vector<std::string> texts) {
  coft::InputRecord r;
  r.id = id;
  r.query = query;
  for (std::size_t i = 0; i < texts.size(); ++i) r.refs.push_back({"r" + std::to_string(i), texts[i]});
  return r;
}

const std::string kWalkthroughQuery =
    "Which country or city has the maximum number of nuclear power plants?";
const std::string kWalkthroughRef =
    "The nuclear power plants in the United States play a crucial role in providing "
    "low-carbon electricity to millions of homes.";

TEST(Pipeline, Walkthrough) {
  const coft::Pipeline p(base_config());
  const auto out = p.run_record(record("w", kWalkthroughQuery, {kWalkthroughRef}));
  ASSERT_EQ(out.refs.size(), 1u);
  const auto& text = out.refs[0].highlighted_text;
  EXPECT_NE(text.find("**nuclear power plants**"), std::string::npos) << text;
  EXPECT_NE(text.find("**United States**"), std::string::npos) << text;
  for (const auto& c : out.candidates) EXPECT_NE(c.normalized, "france");
  EXPECT_EQ(out.refs[0].entities_highlighted, 2u);
}

TEST(Pipeline, PassthroughWithoutEntities) {
  const coft::Pipeline p(base_config());
  const auto out = p.run_record(record("p", "Which nuclear power plants?", {"Nothing relevant here."}));
  EXPECT_EQ(out.refs[0].highlighted_text, "Nothing relevant here.");
  EXPECT_TRUE(out.refs[0].weights.empty());
  EXPECT_TRUE(out.refs[0].selected.empty());
}

TEST(Pipeline, StrippedOutputReproducesInput) {
  for (auto g : {coft::Granularity::Word, coft::Granularity::Sentence,
                 coft::Granularity::Paragraph, coft::Granularity::Joint}) {
    auto cfg = base_config();
    cfg.granularity = g;
    const coft::Pipeline p(cfg);
    const auto rec = record("s", kWalkthroughQuery,
                            {kWalkthroughRef, "France has many nuclear power plants. Paris too.\n\nCities."});
    const auto out = p.run_record(rec);
    for (std::size_t i = 0; i < rec.refs.size(); ++i) {
      EXPECT_EQ(coft::strip_highlights(out.refs[i].highlighted_text, "**"),
                coft::text::nfc(rec.refs[i].text));
    }
  }
}

TEST(Pipeline, GoldenTwoRefRecord) {
  const coft::Pipeline p(base_config());
  std::ifstream in(COFT_TEST_DATA_DIR "/golden/two_ref_input.jsonl");
  std::ostringstream out;
  const auto summary = p.run_batch(in, out);
  EXPECT_EQ(summary.processed, 1u);
  EXPECT_EQ(out.str(), read_file(COFT_TEST_DATA_DIR "/golden/two_ref_expected.jsonl"));
}

TEST(Pipeline, BatchOrderIndependentOfWorkers) {
  const std::string expected = read_file(COFT_TEST_DATA_DIR "/golden/batch3_expected.jsonl");
  for (std::size_t workers : {1u, 2u, 4u}) {
    auto cfg = base_config();
    cfg.workers = workers;
    const coft::Pipeline p(cfg);
    std::ifstream in(COFT_TEST_DATA_DIR "/golden/batch3_input.jsonl");
    std::ostringstream out;
    const auto summary = p.run_batch(in, out);
    EXPECT_EQ(summary.processed, 3u);
    EXPECT_EQ(out.str(), expected) << workers;
  }
}

TEST(Pipeline, MalformedLineIsReportedAndSkipped) {
  const coft::Pipeline p(base_config());
  std::istringstream in(
      R"({"id":"a","query":"q","refs":[{"id":"x","text":"alpha"}]})"
      "\n{not json\n\n"
      R"({"id":"b","query":"q","refs":[{"text":"beta"}]})"
      "\n");
  std::ostringstream out;
  const auto summary = p.run_batch(in, out);
  EXPECT_EQ(summary.processed, 2u);
  EXPECT_EQ(summary.failed, 1u);
  ASSERT_EQ(summary.failures.size(), 1u);
  EXPECT_EQ(summary.failures[0].line, 2u);
  std::istringstream lines(out.str());
  std::string l1, l2, l3;
  std::getline(lines, l1);
  std::getline(lines, l2);
  EXPECT_FALSE(std::getline(lines, l3));
  EXPECT_EQ(json::parse(l1).at("id"), "a");
  EXPECT_EQ(json::parse(l2).at("id"), "b");
  EXPECT_EQ(json::parse(l2).at("refs")[0].at("id"), "0");
  const auto j = summary.to_json();
  for (const char* key : {"records_processed", "records_failed", "entities_highlighted", "failures", "config"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(Pipeline, EmptyInputAndDuplicateIds) {
  const coft::Pipeline p(base_config());
  std::istringstream empty("");
  std::ostringstream out;
  const auto s = p.run_batch(empty, out);
  EXPECT_EQ(s.processed + s.failed + s.entities_highlighted, 0u);
  EXPECT_TRUE(out.str().empty());

  std::istringstream dup(R"({"id":"a","query":"q","refs":[{"text":"x"}]})"
                         "\n"
                         R"({"id":"a","query":"q","refs":[{"text":"y"}]})");
  const auto d = p.run_batch(dup, out);
  EXPECT_EQ(d.processed, 1u);
  EXPECT_EQ(d.failed, 1u);
  EXPECT_EQ(d.failures[0].id, "a");
}

TEST(Pipeline, InputValidation) {
  EXPECT_THROW(coft::InputRecord::from_json(json::parse(R"({"query":"q","refs":[{"text":"x"}]})")),
               coft::Error);
  EXPECT_THROW(coft::InputRecord::from_json(json::parse(R"({"id":"a","query":"q","refs":[]})")),
               coft::Error);
  EXPECT_THROW(coft::InputRecord::from_json(
                   json::parse(R"({"id":"a","query":"q","refs":[{"id":"1","text":"x"},{"id":"1","text":"y"}]})")),
               coft::Error);
  const auto r = coft::InputRecord::from_json(
      json::parse(R"({"id":"a","query":"q","instructions":"i","refs":[{"id":"z","text":"x"}]})"));
  EXPECT_EQ(coft::InputRecord::from_json(r.to_json()).to_json(), r.to_json());
}

TEST(Pipeline, ProviderErrorsCarryRecordAndRef) {
  class Failing final : public coft::TokenProbabilityProvider {
   public:
    std::vector<coft::TokenScore> score(std::string_view, std::string_view ref) const override {
      if (ref.find("boom") != std::string_view::npos) throw coft::RetriableError("timeout", "lm");
      return {};
    }
    std::string name() const override { return "failing"; }
  };
  const coft::Pipeline p(base_config(), std::make_shared<coft::FixtureKg>(coft::KgFixture{}),
                         std::make_shared<Failing>(), coft::Gazetteer{},
                         coft::PromptTemplate::default_template());
  try {
    p.run_record(record("rec", "q", {"fine", "boom"}));
    FAIL();
  } catch (const coft::RecordError& e) {
    EXPECT_EQ(e.record_id(), "rec");
    EXPECT_EQ(e.ref_id(), "r1");
    EXPECT_TRUE(e.retriable());
  }
}

TEST(Pipeline, RandomBaselineIsSeededAndSizeMatched) {
  auto cfg = base_config();
  const auto rec = record("rb", kWalkthroughQuery, {kWalkthroughRef});
  const auto normal = coft::Pipeline(cfg).run_record(rec);
  cfg.random_baseline = true;
  cfg.seed = 7;
  const auto a = coft::Pipeline(cfg).run_record(rec);
  const auto b = coft::Pipeline(cfg).run_record(rec);
  EXPECT_EQ(a.refs[0].selected.size(), normal.refs[0].selected.size());
  EXPECT_EQ(a.refs[0].highlighted_text, b.refs[0].highlighted_text);
}

TEST(Pipeline, HighlightsOnlyFeedsPrompt) {
  auto cfg = base_config();
  cfg.highlights_only = true;
  const auto out = coft::Pipeline(cfg).run_record(record("h", kWalkthroughQuery, {kWalkthroughRef}));
  ASSERT_TRUE(out.refs[0].highlights_only.has_value());
  EXPECT_EQ(*out.refs[0].highlights_only, "nuclear power plants … United States");
  EXPECT_NE(out.prompt.find("nuclear power plants … United States"), std::string::npos);
  EXPECT_EQ(out.to_json()["refs"][0]["highlights_only"], *out.refs[0].highlights_only);
}

TEST(Pipeline, FixedTauAndCustomMarker) {
  auto cfg = base_config();
  cfg.fixed_tau = 0.0;
  cfg.marker = "<b>";
  const auto out = coft::Pipeline(cfg).run_record(record("t", kWalkthroughQuery, {kWalkthroughRef}));
  EXPECT_EQ(out.refs[0].threshold.tau, 0.0);
  EXPECT_EQ(out.refs[0].selected.size(), 1u);
  EXPECT_NE(out.refs[0].highlighted_text.find("<b>"), std::string::npos);
}

TEST(Pipeline, SentenceGranularityHighlightsWholeSentence) {
  auto cfg = base_config();
  cfg.granularity = coft::Granularity::Sentence;
  const auto out = coft::Pipeline(cfg).run_record(
      record("g", kWalkthroughQuery, {kWalkthroughRef + " Nothing else matters."}));
  EXPECT_EQ(out.refs[0].highlighted_text, "**" + kWalkthroughRef + "** Nothing else matters.");
}

TEST(Pipeline, ConfigEmbedsReproducibilityFields) {
  auto cfg = base_config();
  cfg.seed = 99;
  const auto j = cfg.to_json();
  for (const char* key : {"provider", "kg", "tau_mode", "granularity", "seed", "marker"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["seed"], 99);
}

}  // namespace
