#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lg {

enum class ErrorKind {
  not_found,
  ambiguous,
  type_mismatch,
  missing_target,
  names_unavailable,
  io,
  format,
  fetch,
  integrity,
  version,
  corrupt,
  build,
  degenerate,
  undefined,
  empty,
  invalid_argument,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers dispatch on kind().
// `candidates` is populated for ambiguity errors (split deprecations).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::vector<std::string> candidates = {})
      : std::runtime_error(message), kind_(kind), candidates_(std::move(candidates)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<std::string>& candidates() const noexcept { return candidates_; }

 private:
  ErrorKind kind_;
  std::vector<std::string> candidates_;
};

}  // namespace lg
