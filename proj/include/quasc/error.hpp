#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace quasc {

// Categories map one-to-one onto CLI exit codes (usage=1, data=2, numerical=3).
enum class ErrorKind { Usage = 1, Data = 2, Numerical = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

/// Bad or inconsistent input data, including unreadable files.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

/// Collects non-fatal warnings (zero-norm vectors, negative weights, ...).
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string message) { warnings.push_back(std::move(message)); }
  bool empty() const noexcept { return warnings.empty(); }
};

}  // namespace quasc
