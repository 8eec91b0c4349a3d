#pragma once

#include <stdexcept>
#include <string>

namespace tl1pca {

/// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  config,      // bad parameters or flags
  data,        // malformed, non-finite or degenerate input data
  shape,       // dimension mismatch between operands
  contract,    // caller violated a documented precondition
  numeric,     // the computation itself produced non-finite values
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return "config error";
    case ErrorKind::data: return "data error";
    case ErrorKind::shape: return "shape error";
    case ErrorKind::contract: return "contract violation";
    case ErrorKind::numeric: return "numeric error";
  }
  return "error";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace tl1pca
