#pragma once

#include <stdexcept>
#include <string>

namespace msci {

/// Base class for every error raised by the library. Data errors map to
/// CLI exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A CSV row failed validation. `row` is 1-based and counts the header as row 1.
class RowError : public Error {
 public:
  RowError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// The normal equations of a fit cannot be solved (e.g. all x identical).
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

}  // namespace msci
