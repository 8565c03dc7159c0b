#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "coft/segmentation.hpp"
#include "coft/text.hpp"

namespace {

using coft::Span;

std::vector<std::string> slices(std::string_view text, const std::vector<Span>& spans) {
  std::vector<std::string> out;
  for (const auto& s : spans) out.emplace_back(s.slice(text));
  return out;
}

// Three paragraphs; counts below were done by hand.
constexpr std::string_view kFixture =
    "Dr. Smith visited Paris in 2019. He liked it!\n"
    "\n"
    "The U.S. economy grew 3.5 percent. Analysts, e.g. at banks, were surprised?  Yes.\n"
    "\n\n"
    "  State-of-the-art models don't fail.  ";

TEST(Segmentation, HandCountedFixture) {
  const auto doc = coft::segment_document("d", kFixture);
  EXPECT_EQ(doc.paragraphs.size(), 3u);
  ASSERT_EQ(doc.sentences.size(), 6u);
  EXPECT_EQ(doc.word_count, 29u);
  EXPECT_EQ(doc.sentence_word_counts, (std::vector<std::size_t>{6, 3, 8, 7, 1, 4}));
  EXPECT_EQ(doc.sentence_paragraph, (std::vector<std::size_t>{0, 0, 1, 1, 1, 2}));
  EXPECT_EQ(doc.slice(doc.sentences[0]), "Dr. Smith visited Paris in 2019.");
  EXPECT_EQ(doc.slice(doc.sentences[2]), "The U.S. economy grew 3.5 percent.");
  EXPECT_EQ(doc.slice(doc.sentences[5]), "State-of-the-art models don't fail.");
  const auto words = slices(doc.text, doc.words);
  EXPECT_EQ(words[25], "State-of-the-art");
  EXPECT_EQ(words[27], "don't");
}

TEST(Segmentation, ParagraphsTrimAndSkipBlankRuns) {
  const std::string text = "\n\n a b \n  \n\t\nc\n";
  EXPECT_EQ(slices(text, coft::split_paragraphs(text)), (std::vector<std::string>{"a b", "c"}));
  EXPECT_TRUE(coft::split_paragraphs("  \n\n ").empty());
  EXPECT_TRUE(coft::split_paragraphs("").empty());
}

TEST(Segmentation, SingleNewlineDoesNotSplitParagraph) {
  const std::string text = "line one\nline two";
  EXPECT_EQ(coft::split_paragraphs(text).size(), 1u);
}

TEST(Segmentation, SentenceTerminatorsAndClosers) {
  const std::string text = "He said \"stop.\" Then (quietly) left? Yes";
  EXPECT_EQ(slices(text, coft::split_sentences(text)),
            (std::vector<std::string>{"He said \"stop.\"", "Then (quietly) left?", "Yes"}));
}

TEST(Segmentation, AbbreviationsDoNotEndSentences) {
  for (std::string_view abbr : coft::sentence_abbreviations()) {
    const std::string text = "See " + std::string(abbr) + " next word.";
    EXPECT_EQ(coft::split_sentences(text).size(), 1u) << abbr;
  }
}

TEST(Segmentation, PeriodInsideTokenIsNotABoundary) {
  const std::string text = "Version 3.5 shipped. Visit example.com today.";
  EXPECT_EQ(coft::split_sentences(text).size(), 2u);
}

TEST(Segmentation, WordRules) {
  const std::string text = "rock'n'roll -dash- a-b 'quoted' x--y it's café 42nd";
  EXPECT_EQ(slices(text, coft::tokenize_words(text)),
            (std::vector<std::string>{"rock'n'roll", "dash", "a-b", "quoted", "x", "y", "it's",
                                      "café", "42nd"}));
}

TEST(Segmentation, OffsetsAreBytesIntoNfcText) {
  // "e" + combining acute composes to one two-byte code point.
  const std::string decomposed = "Cafe\xCC\x81 ouvert.";
  const auto doc = coft::segment_document("d", decomposed);
  EXPECT_EQ(doc.text, "Caf\xC3\xA9 ouvert.");
  ASSERT_EQ(doc.words.size(), 2u);
  EXPECT_EQ(doc.words[0], (Span{0, 5}));
  EXPECT_EQ(doc.slice(doc.words[1]), "ouvert");
}

TEST(Segmentation, EmptyDocument) {
  const auto doc = coft::segment_document("d", "   ");
  EXPECT_TRUE(doc.paragraphs.empty());
  EXPECT_TRUE(doc.sentences.empty());
  EXPECT_EQ(doc.word_count, 0u);
}

std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {
      "alpha", "Beta", "don't", "x-ray", "U.S.", "e.g.", "3.5", ".", "!", "?", "\"", ")",
      " ",     " ",    " ",     "\n",    "\n\n", ",",    "é",   " ", "Mr.", "--"};
  std::string out;
  const std::size_t n = rng() % 40;
  for (std::size_t i = 0; i < n; ++i) out += pieces[rng() % pieces.size()];
  return out;
}

// Structural invariants on random inputs: spans sorted, disjoint, nested in
// their parents, and counts consistent.
TEST(Segmentation, RandomizedNestingInvariants) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const auto doc = coft::segment_document("d", random_text(rng));
    std::size_t total = 0;
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      const Span& sent = doc.sentences[s];
      ASSERT_FALSE(sent.empty());
      ASSERT_TRUE(doc.paragraphs[doc.sentence_paragraph[s]].contains(sent));
      if (s > 0) ASSERT_LE(doc.sentences[s - 1].end, sent.start);
      total += doc.sentence_word_counts[s];
    }
    ASSERT_EQ(total, doc.word_count);
    ASSERT_EQ(doc.words.size(), doc.word_count);
    for (std::size_t w = 0; w < doc.words.size(); ++w) {
      ASSERT_TRUE(doc.sentences[doc.word_sentence[w]].contains(doc.words[w]));
      ASSERT_EQ(doc.sentence_at(doc.words[w].start), doc.word_sentence[w]);
      if (w > 0) ASSERT_LE(doc.words[w - 1].end, doc.words[w].start);
    }
    // Segmenting already-normalized text is a fixed point.
    const auto again = coft::segment_document("d", doc.text);
    ASSERT_EQ(again.text, doc.text);
    ASSERT_EQ(again.sentences, doc.sentences);
    ASSERT_EQ(again.words, doc.words);
  }
}

TEST(Text, NormalizeFoldsCaseAndWhitespace) {
  EXPECT_EQ(coft::text::normalize("  United \t States\n"), "united states");
  EXPECT_EQ(coft::text::normalize("CAFÉ"), "café");
}

}  // namespace
