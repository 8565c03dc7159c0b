#include "coft/stopwords.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "coft/text.hpp"

namespace coft {

namespace {

// Sorted for binary search.
constexpr std::array<std::string_view, 178> kStopwords = {
    "a",         "about",   "above",   "after",     "again",   "against",
    "all",       "also",    "am",      "among",     "an",      "and",
    "any",       "are",     "aren't",  "as",        "at",      "be",
    "because",   "been",    "before",  "being",     "below",   "between",
    "both",      "but",     "by",      "can",       "can't",   "cannot",
    "could",     "couldn't", "did",    "didn't",    "do",      "does",
    "doesn't",   "doing",   "don't",   "down",      "during",  "each",
    "either",    "else",    "ever",    "every",     "few",     "for",
    "from",      "further", "had",     "hadn't",    "has",     "hasn't",
    "have",      "haven't", "having",  "he",        "her",     "here",
    "hers",      "herself", "him",     "himself",   "his",     "how",
    "however",   "i",       "if",      "in",        "into",    "is",
    "isn't",     "it",      "it's",    "its",       "itself",  "just",
    "least",     "less",    "let",     "like",      "many",    "may",
    "me",        "might",   "more",    "most",      "much",    "must",
    "my",        "myself",  "neither", "no",        "nor",     "not",
    "now",       "of",      "off",     "often",     "on",      "once",
    "one",       "only",    "or",      "other",     "ought",   "our",
    "ours",      "ourselves", "out",   "over",      "own",     "per",
    "please",    "quite",   "rather",  "same",      "shall",   "she",
    "should",    "shouldn't", "since", "so",        "some",    "such",
    "than",      "that",    "the",     "their",     "theirs",  "them",
    "themselves", "then",   "there",   "these",     "they",    "this",
    "those",     "though",  "through", "thus",      "to",      "too",
    "under",     "until",   "up",      "upon",      "us",      "very",
    "via",       "was",     "wasn't",  "we",        "were",    "weren't",
    "what",      "when",    "where",   "whether",   "which",   "while",
    "who",       "whom",    "whose",   "why",       "will",    "with",
    "within",    "without", "won't",   "would",     "wouldn't", "yet",
    "you",       "your",    "yours",   "yourself",
};

}  // namespace

bool is_stopword(std::string_view word) {
  std::string lowered = text::lower(word);
  // Fold the typographic apostrophe so "don’t" matches "don't".
  if (auto pos = lowered.find("\xE2\x80\x99"); pos != std::string::npos) {
    lowered.replace(pos, 3, "'");
  }
  return std::binary_search(kStopwords.begin(), kStopwords.end(),
                            std::string_view(lowered));
}

}  // namespace coft
