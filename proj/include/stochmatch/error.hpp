#pragma once

#include <stdexcept>
#include <string>

namespace stochmatch {

// Values mirror sm_status in stochmatch.h.
enum class ErrorCode {
  invalid_argument = 1,
  parse_error = 2,
  io_error = 3,
  validation_failed = 4,
  infeasible = 5,
  unbounded = 6,
  cap_exceeded = 7,
  not_bipartite = 8,
  internal = 9,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace stochmatch
