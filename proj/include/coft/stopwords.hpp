#pragma once

#include <string_view>

namespace coft {

// Fixed English stopword list; `word` is compared after lowercasing.
bool is_stopword(std::string_view word);

}  // namespace coft
