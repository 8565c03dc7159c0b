#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "coft/error.hpp"
#include "coft/kg.hpp"
#include "coft/recaller.hpp"
#include "coft/segmentation.hpp"
#include "coft/text.hpp"

namespace {

using coft::EntityCandidate;
using coft::EntitySource;

std::vector<std::string> names(const std::vector<EntityCandidate>& cs) {
  std::vector<std::string> out;
  for (const auto& c : cs) out.push_back(c.normalized);
  return out;
}

bool has(const std::vector<EntityCandidate>& cs, std::string_view n) {
  return std::any_of(cs.begin(), cs.end(), [&](const auto& c) { return c.normalized == n; });
}

const EntityCandidate& find(const std::vector<EntityCandidate>& cs, std::string_view n) {
  auto it = std::find_if(cs.begin(), cs.end(), [&](const auto& c) { return c.normalized == n; });
  if (it == cs.end()) throw std::runtime_error("missing " + std::string(n));
  return *it;
}

coft::FixtureKg nuclear_kg() {
  return coft::FixtureKg(coft::KgFixture::load(COFT_TEST_DATA_DIR "/walkthrough_kg.json"));
}

coft::Gazetteer gazetteer_of(std::initializer_list<std::string_view> labels) {
  coft::Gazetteer g;
  for (auto l : labels) g.add(l);
  return g;
}

TEST(Extract, WalkthroughQuery) {
  const auto g = gazetteer_of({"nuclear power plants", "country", "city"});
  const auto cs = coft::extract_query_entities(
      "Which country or city has the maximum number of nuclear power plants?", g);
  EXPECT_TRUE(has(cs, "country"));
  EXPECT_TRUE(has(cs, "city"));
  EXPECT_TRUE(has(cs, "nuclear power plants"));
  EXPECT_FALSE(has(cs, "which"));
  for (const auto& c : cs) EXPECT_EQ(c.source, EntitySource::QueryEntity);
}

TEST(Extract, EmptyQuery) {
  EXPECT_TRUE(coft::extract_query_entities("", coft::Gazetteer{}).empty());
}

TEST(Extract, LongestGazetteerMatchWins) {
  const auto g = gazetteer_of({"pride", "pride and prejudice", "prejudice"});
  const auto cs = coft::extract_query_entities("Who wrote Pride and Prejudice?", g);
  EXPECT_TRUE(has(cs, "pride and prejudice"));
  EXPECT_FALSE(has(cs, "pride"));
  EXPECT_FALSE(has(cs, "prejudice"));
  EXPECT_EQ(find(cs, "pride and prejudice").surface, "Pride and Prejudice");
}

TEST(Extract, CapitalizedRunsAndContentWords) {
  const auto cs = coft::extract_query_entities("Where did Marie Curie work in Paris?", {});
  EXPECT_EQ(names(cs), (std::vector<std::string>{"marie curie", "work", "paris"}));
}

TEST(Extract, InitialismsStayWhole) {
  const auto cs = coft::extract_query_entities("Where is Washington, D.C. located?", {});
  EXPECT_EQ(names(cs), (std::vector<std::string>{"washington", "d.c.", "located"}));
}

TEST(Extract, GazetteerLabelEndingInPunctuation) {
  const auto g = gazetteer_of({"Washington, D.C."});
  const auto cs = coft::extract_query_entities("Is Washington, D.C. big?", g);
  EXPECT_EQ(find(cs, "washington, d.c.").surface, "Washington, D.C.");
  EXPECT_FALSE(has(cs, "washington"));
}

TEST(Extract, DuplicatesRemovedByNormalizedForm) {
  const auto cs = coft::extract_query_entities("paris or Paris or PARIS", {});
  EXPECT_EQ(names(cs), (std::vector<std::string>{"paris"}));
}

TEST(Expand, OneHopNeighbors) {
  auto kg = nuclear_kg();
  const auto out = coft::expand_neighbors(
      {EntityCandidate::make("nuclear power plants", EntitySource::QueryEntity)}, kg, 1);
  EXPECT_EQ(find(out, "united states").source, EntitySource::KgNeighborHop1);
  EXPECT_EQ(find(out, "france").source, EntitySource::KgNeighborHop1);
  EXPECT_FALSE(has(out, "paris"));
}

TEST(Expand, EmptyInput) {
  auto kg = nuclear_kg();
  EXPECT_TRUE(coft::expand_neighbors({}, kg, 1).empty());
}

TEST(Expand, TwoHopChain) {
  coft::KgFixture f;
  f.entities = {{"a", "QA"}, {"b", "QB"}, {"c", "QC"}};
  f.neighbors = {{"QA", {"B"}}, {"QB", {"C"}}};
  coft::FixtureKg kg(f);
  const auto out = coft::expand_neighbors({EntityCandidate::make("A", EntitySource::QueryEntity)},
                                          kg, 2);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(find(out, "a").source, EntitySource::QueryEntity);
  EXPECT_EQ(find(out, "b").source, EntitySource::KgNeighborHop1);
  EXPECT_EQ(find(out, "c").source, EntitySource::KgNeighborHop2);
}

TEST(Expand, InvalidHops) {
  auto kg = nuclear_kg();
  EXPECT_THROW(coft::expand_neighbors({}, kg, 3), coft::Error);
}

TEST(Expand, QueryEntityBeatsNeighbor) {
  auto kg = nuclear_kg();
  const auto out = coft::expand_neighbors(
      {EntityCandidate::make("nuclear power plants", EntitySource::QueryEntity),
       EntityCandidate::make("France", EntitySource::QueryEntity)},
      kg, 2);
  EXPECT_EQ(find(out, "france").source, EntitySource::QueryEntity);
  EXPECT_EQ(find(out, "paris").source, EntitySource::KgNeighborHop1);
}

TEST(Expand, TwoHopsIsSupersetOfOneHop) {
  auto kg = nuclear_kg();
  for (const char* seed : {"nuclear power plants", "united states", "france", "unknown"}) {
    const std::vector<EntityCandidate> in = {EntityCandidate::make(seed, EntitySource::QueryEntity)};
    const auto one = names(coft::expand_neighbors(in, kg, 1));
    const auto two = names(coft::expand_neighbors(in, kg, 2));
    const std::set<std::string> a(one.begin(), one.end()), b(two.begin(), two.end());
    EXPECT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end())) << seed;
  }
}

TEST(Filter, WalkthroughDropsFrance) {
  auto kg = nuclear_kg();
  const auto expanded = coft::expand_neighbors(
      {EntityCandidate::make("country", EntitySource::QueryEntity),
       EntityCandidate::make("nuclear power plants", EntitySource::QueryEntity)},
      kg, 1);
  const std::vector<coft::Document> docs = {coft::segment_document(
      "r0",
      "The nuclear power plants in the United States play a crucial role in providing "
      "low-carbon electricity to millions of homes.")};
  const auto kept = coft::filter_in_context(expanded, docs);
  EXPECT_EQ(names(kept), (std::vector<std::string>{"nuclear power plants", "united states"}));
  for (const auto& c : kept) {
    ASSERT_FALSE(c.occurrences.empty());
    for (const auto& o : c.occurrences) {
      EXPECT_EQ(coft::text::normalize(o.span.slice(docs[0].text)), c.normalized);
    }
  }
}

TEST(Filter, WordBoundary) {
  const std::vector<coft::Document> docs = {coft::segment_document("d", "The catalog is here.")};
  EXPECT_TRUE(
      coft::filter_in_context({EntityCandidate::make("cat", EntitySource::QueryEntity)}, docs)
          .empty());
}

TEST(Filter, CollapsedWhitespace) {
  const std::string text = "the United  States play";
  const std::vector<coft::Document> docs = {coft::segment_document("d", text)};
  const auto kept = coft::filter_in_context(
      {EntityCandidate::make("united states", EntitySource::QueryEntity)}, docs);
  ASSERT_EQ(kept.size(), 1u);
  ASSERT_EQ(kept[0].occurrences.size(), 1u);
  EXPECT_EQ(kept[0].occurrences[0].span.slice(text), "United  States");
}

TEST(Filter, PunctuationAroundMatchAndAcrossSentencesNotMatched) {
  const std::vector<coft::Document> docs = {
      coft::segment_document("d", "(Paris) is big. New. York is far.")};
  const auto kept = coft::filter_in_context(
      {EntityCandidate::make("paris", EntitySource::QueryEntity),
       EntityCandidate::make("new york", EntitySource::QueryEntity)},
      docs);
  EXPECT_EQ(names(kept), (std::vector<std::string>{"paris"}));
}

TEST(Filter, OrderAndAllOccurrencesAcrossDocs) {
  const std::vector<coft::Document> docs = {coft::segment_document("a", "x beta alpha beta"),
                                            coft::segment_document("b", "alpha")};
  const auto kept = coft::filter_in_context(
      {EntityCandidate::make("alpha", EntitySource::KgNeighborHop1),
       EntityCandidate::make("beta", EntitySource::QueryEntity)},
      docs);
  ASSERT_EQ(names(kept), (std::vector<std::string>{"beta", "alpha"}));
  EXPECT_EQ(kept[0].occurrences.size(), 2u);
  EXPECT_EQ(kept[1].spans_in("a").size(), 1u);
  EXPECT_EQ(kept[1].spans_in("b").size(), 1u);
  // Pure: repeated calls agree.
  const auto again = coft::filter_in_context(
      {EntityCandidate::make("alpha", EntitySource::KgNeighborHop1),
       EntityCandidate::make("beta", EntitySource::QueryEntity)},
      docs);
  ASSERT_EQ(again.size(), kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) EXPECT_EQ(again[i].occurrences, kept[i].occurrences);
}

TEST(Filter, MatchesDoNotOverlap) {
  const std::vector<coft::Document> docs = {coft::segment_document("d", "ha ha ha")};
  const auto kept =
      coft::filter_in_context({EntityCandidate::make("ha ha", EntitySource::QueryEntity)}, docs);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].occurrences.size(), 1u);
}

TEST(Candidate, NormalizedFromSurface) {
  const auto c = EntityCandidate::make("  United\tStates ", EntitySource::KgNeighborHop2);
  EXPECT_EQ(c.normalized, "united states");
  EXPECT_EQ(coft::to_string(c.source), "kg_hop2");
}

}  // namespace
