#ifndef HETSGD_ERRORS_HPP
#define HETSGD_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hetsgd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyDataset : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An oracle was asked for a full batch with fewer than batch_size calls left.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

class NonpositiveRate : public Error {
 public:
  using Error::Error;
};

/// Bound evaluation outside the region where it is defined (2*lambda*c1 <= 1).
class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class PatternMismatch : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyFile : public Error {
 public:
  using Error::Error;
};

class InconsistentDimension : public Error {
 public:
  InconsistentDimension(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hetsgd

#endif  // HETSGD_ERRORS_HPP
