#include "coft/segmentation.hpp"

#include <algorithm>

#include "coft/text.hpp"

namespace coft {

namespace {

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_closer(char32_t c) {
  switch (c) {
    case U'"':
    case U'\'':
    case U')':
    case U']':
    case U'}':
    case U'’':
    case U'”':
    case U'»':
      return true;
    default:
      return false;
  }
}

bool is_opener(char32_t c) {
  switch (c) {
    case U'"':
    case U'\'':
    case U'(':
    case U'[':
    case U'{':
    case U'‘':
    case U'“':
    case U'«':
      return true;
    default:
      return false;
  }
}

bool is_apostrophe(char32_t c) { return c == U'\'' || c == U'’'; }

bool is_hyphen(char32_t c) {
  return c == U'-' || c == U'‐' || c == U'‑';
}

// True when the period at `dot` closes one of the fixed abbreviations.
bool ends_abbreviation(std::string_view text, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > 0) {
    std::size_t p = text::previous_boundary(text, begin);
    if (text::is_space(text::decode_at(text, p).value)) break;
    begin = p;
  }
  while (begin < dot) {
    auto cp = text::decode_at(text, begin);
    if (!is_opener(cp.value)) break;
    begin += cp.length;
  }
  std::string_view token = text.substr(begin, dot + 1 - begin);
  const auto& abbrevs = sentence_abbreviations();
  return std::find(abbrevs.begin(), abbrevs.end(), token) != abbrevs.end();
}

// Trims `span` (relative to `text`) and appends it when non-empty.
void push_trimmed(std::string_view text, Span span, std::vector<Span>& out) {
  std::string_view body = span.slice(text);
  std::string_view trimmed = text::trim(body);
  if (trimmed.empty()) return;
  std::size_t start =
      span.start + static_cast<std::size_t>(trimmed.data() - body.data());
  out.push_back({start, start + trimmed.size()});
}

}  // namespace

const std::vector<std::string_view>& sentence_abbreviations() {
  static const std::vector<std::string_view> kAbbrevs = {
      "Mr.", "Mrs.", "Dr.", "e.g.", "i.e.", "etc.", "vs.", "U.S.", "No."};
  return kAbbrevs;
}

std::size_t Document::sentence_at(std::size_t pos) const noexcept {
  auto it = std::upper_bound(
      sentences.begin(), sentences.end(), pos,
      [](std::size_t p, const Span& s) { return p < s.start; });
  if (it == sentences.begin()) return static_cast<std::size_t>(-1);
  --it;
  if (!it->contains(pos)) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - sentences.begin());
}

std::vector<Span> split_paragraphs(std::string_view text) {
  std::vector<Span> out;
  bool open = false;
  std::size_t para_start = 0;
  std::size_t para_end = 0;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    std::size_t nl = text.find('\n', line_start);
    std::size_t line_end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = text.substr(line_start, line_end - line_start);
    std::string_view content = text::trim(line);
    if (content.empty()) {
      if (open) out.push_back({para_start, para_end});
      open = false;
    } else {
      std::size_t cs =
          line_start + static_cast<std::size_t>(content.data() - line.data());
      if (!open) para_start = cs;
      para_end = cs + content.size();
      open = true;
    }
    if (nl == std::string_view::npos) break;
    line_start = nl + 1;
  }
  if (open) out.push_back({para_start, para_end});
  return out;
}

std::vector<Span> split_sentences(std::string_view text) {
  std::vector<Span> out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminator(text[i])) {
      i += std::max<std::size_t>(1, text::decode_at(text, i).length);
      continue;
    }
    std::size_t j = i + 1;
    while (j < text.size() && is_terminator(text[j])) ++j;
    const bool single_period = text[i] == '.' && j == i + 1;
    while (j < text.size()) {
      auto cp = text::decode_at(text, j);
      if (!is_closer(cp.value)) break;
      j += cp.length;
    }
    const bool boundary =
        j == text.size() || text::is_space(text::decode_at(text, j).value);
    if (boundary && !(single_period && ends_abbreviation(text, i))) {
      push_trimmed(text, {start, j}, out);
      start = j;
    }
    i = j;
  }
  if (start < text.size()) push_trimmed(text, {start, text.size()}, out);
  return out;
}

std::vector<Span> tokenize_words(std::string_view text) {
  std::vector<Span> out;
  std::size_t i = 0;
  while (i < text.size()) {
    auto cp = text::decode_at(text, i);
    if (!text::is_alnum(cp.value)) {
      i += cp.length;
      continue;
    }
    const std::size_t start = i;
    char32_t prev = cp.value;
    i += cp.length;
    while (i < text.size()) {
      auto c = text::decode_at(text, i);
      if (text::is_alnum(c.value) || text::is_mark(c.value)) {
        prev = c.value;
        i += c.length;
        continue;
      }
      auto next = text::decode_at(text, i + c.length);
      const bool joins =
          next.length > 0 &&
          ((is_apostrophe(c.value) && text::is_letter(prev) &&
            text::is_letter(next.value)) ||
           (is_hyphen(c.value) && text::is_alnum(prev) &&
            text::is_alnum(next.value)));
      if (!joins) break;
      prev = c.value;
      i += c.length;
    }
    out.push_back({start, i});
  }
  return out;
}

Document segment_document(std::string id, std::string_view raw) {
  Document doc;
  doc.id = std::move(id);
  doc.text = text::nfc(raw);
  const std::string_view text = doc.text;
  doc.paragraphs = split_paragraphs(text);
  for (std::size_t p = 0; p < doc.paragraphs.size(); ++p) {
    const Span para = doc.paragraphs[p];
    for (const Span& local : split_sentences(para.slice(text))) {
      const Span sentence = local.shifted(para.start);
      const std::size_t sentence_index = doc.sentences.size();
      doc.sentences.push_back(sentence);
      doc.sentence_paragraph.push_back(p);
      std::size_t count = 0;
      for (const Span& w : tokenize_words(sentence.slice(text))) {
        doc.words.push_back(w.shifted(sentence.start));
        doc.word_sentence.push_back(sentence_index);
        ++count;
      }
      doc.sentence_word_counts.push_back(count);
    }
  }
  doc.word_count = doc.words.size();
  return doc;
}

}  // namespace coft
