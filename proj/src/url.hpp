#pragma once

#include <string>

#include "coft/error.hpp"

namespace coft::detail {

// "https://host:port/a/b" -> {"https://host:port", "/a/b"}
struct UrlParts {
  std::string origin;
  std::string path;
};

inline UrlParts split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error("expected an absolute URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace coft::detail
