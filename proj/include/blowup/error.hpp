#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

enum class ErrorKind {
  size,
  invalid_data,
  domain,
  out_of_cone,
  insufficient_data,
  undefined_phase,
  rate_undefined,
  divergence,
  config,
};

const char* to_string(ErrorKind kind);

/// Library-wide exception. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace blowup
