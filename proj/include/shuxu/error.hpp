#pragma once

#include <stdexcept>
#include <string>

namespace shuxu {

// Bad input data: malformed files, violated record invariants, unusable
// corpora. Maps to CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or arguments. Maps to CLI exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Remote classifier endpoint failure. Maps to CLI exit code 3.
class RemoteError : public std::runtime_error {
 public:
  explicit RemoteError(const std::string& what, int status = 0)
      : std::runtime_error(what), status_(status) {}

  // Last HTTP status seen, 0 if no response was received.
  int status() const noexcept { return status_; }

 private:
  int status_;
};

}  // namespace shuxu
