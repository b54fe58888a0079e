#include "stochmatch/error.hpp"

namespace stochmatch {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::parse_error: return "parse error";
    case ErrorCode::io_error: return "i/o error";
    case ErrorCode::validation_failed: return "validation failed";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::unbounded: return "unbounded";
    case ErrorCode::cap_exceeded: return "size cap exceeded";
    case ErrorCode::not_bipartite: return "not bipartite";
    case ErrorCode::internal: return "internal error";
  }
  return "unknown error";
}

}  // namespace stochmatch
