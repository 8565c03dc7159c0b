#include "coft/prompt.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "coft/error.hpp"

namespace coft {

namespace {

constexpr std::array<std::string_view, 3> kNames = {"instructions", "query", "refs"};

// Placeholder names in order of appearance.
std::vector<std::pair<std::size_t, std::string>> scan(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string>> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{') continue;
    std::size_t j = i + 1;
    while (j < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
      ++j;
    }
    if (j > i + 1 && j < text.size() && text[j] == '}') {
      out.emplace_back(i, std::string(text.substr(i + 1, j - i - 1)));
      i = j;
    }
  }
  return out;
}

}  // namespace

PromptTemplate PromptTemplate::parse(std::string text, std::string separator) {
  std::map<std::string, int> seen;
  for (const auto& [pos, name] : scan(text)) {
    if (std::find(kNames.begin(), kNames.end(), name) == kNames.end()) {
      throw Error("unresolved placeholder {" + name + "} in prompt template");
    }
    if (++seen[name] > 1) throw Error("placeholder {" + name + "} appears more than once");
  }
  if (!seen.contains("refs")) throw Error("prompt template must contain {refs}");
  return PromptTemplate(std::move(text), std::move(separator));
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open prompt template: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

PromptTemplate PromptTemplate::default_template() {
  return parse(std::string(kDefaultText));
}

std::string PromptTemplate::render(std::string_view instructions, std::string_view query,
                                   std::span<const std::string> refs) const {
  std::string out = text_;
  constexpr std::string_view kInstr = "{instructions}";
  if (instructions.empty()) {
    if (auto pos = out.find(kInstr); pos != std::string::npos) {
      std::size_t begin = pos;
      std::size_t end = pos + kInstr.size();
      if (out.compare(end, 2, "\n\n") == 0) {
        end += 2;
      } else if (begin >= 2 && out.compare(begin - 2, 2, "\n\n") == 0) {
        begin -= 2;
      } else if (out.compare(end, 1, "\n") == 0 && (begin == 0 || out[begin - 1] == '\n')) {
        end += 1;
      }
      out.erase(begin, end - begin);
    }
  }
  std::string joined;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (i > 0) joined += separator_;
    joined += refs[i];
  }
  // Single pass: placeholder-like text inside values is never expanded.
  std::string result;
  result.reserve(out.size() + joined.size() + query.size() + instructions.size());
  for (std::size_t i = 0; i < out.size();) {
    bool matched = false;
    for (auto [name, value] : {std::pair<std::string_view, std::string_view>{"{instructions}", instructions},
                               {"{query}", query},
                               {"{refs}", joined}}) {
      if (out.compare(i, name.size(), name) == 0) {
        result.append(value);
        i += name.size();
        matched = true;
        break;
      }
    }
    if (!matched) result.push_back(out[i++]);
  }
  return result;
}

}  // namespace coft
