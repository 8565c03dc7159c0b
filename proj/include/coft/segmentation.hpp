#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "coft/span.hpp"

namespace coft {

// A reference context split into paragraphs, sentences and words. All spans
// are byte offsets into `text`, which is stored NFC-normalized.
struct Document {
  std::string id;
  std::string text;
  std::vector<Span> paragraphs;
  std::vector<Span> sentences;
  std::vector<Span> words;
  std::size_t word_count = 0;
  std::vector<std::size_t> sentence_word_counts;
  // Index of the sentence owning each word, and of the paragraph owning each
  // sentence.
  std::vector<std::size_t> word_sentence;
  std::vector<std::size_t> sentence_paragraph;

  // Sentence containing byte offset `pos`, or npos.
  std::size_t sentence_at(std::size_t pos) const noexcept;
  std::string_view slice(const Span& s) const noexcept { return s.slice(text); }
};

// Abbreviations whose trailing period never ends a sentence.
const std::vector<std::string_view>& sentence_abbreviations();

// Paragraphs are separated by one or more blank lines. Returned spans are
// trimmed of surrounding whitespace; blank input yields no paragraphs.
std::vector<Span> split_paragraphs(std::string_view text);

// Sentences end at '.', '!' or '?' (plus trailing closing quotes/brackets)
// followed by whitespace or end of input. Known abbreviations do not end a
// sentence. Spans are relative to `text`.
std::vector<Span> split_sentences(std::string_view text);

// Maximal runs of letters and digits, allowing apostrophes between letters
// and hyphens between alphanumerics.
std::vector<Span> tokenize_words(std::string_view text);

// NFC-normalizes `text` and runs the three splitters.
Document segment_document(std::string id, std::string_view text);

}  // namespace coft
