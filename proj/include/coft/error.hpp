#pragma once

#include <stdexcept>
#include <string>

namespace coft {

// Base for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Transport-level failure (network, auth, rate limit) that may succeed on a
// later attempt. `subject` names the entity or request that failed.
class RetriableError : public Error {
 public:
  RetriableError(const std::string& what, std::string subject)
      : Error(what), subject_(std::move(subject)) {}

  const std::string& subject() const noexcept { return subject_; }

 private:
  std::string subject_;
};

}  // namespace coft
