#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rmsgof {

// Bad user input: malformed files, invalid probabilities, mismatched lengths.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The numbers are valid but the computation cannot be trusted.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonPositiveProbability : public InputError {
 public:
  // line is the 1-based source line when known, 0 otherwise.
  NonPositiveProbability(std::size_t index, double value, std::size_t line = 0);
  std::size_t index() const noexcept { return index_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t index_;
  std::size_t line_;
};

class TooFewBins : public InputError {
 public:
  explicit TooFewBins(std::size_t n);
};

class NotFinite : public InputError {
 public:
  explicit NotFinite(std::size_t index);
};

class UnsupportedBinCount : public InputError {
 public:
  UnsupportedBinCount(const std::string& family, std::size_t n);
};

// Raised while reading model files; line numbers are 1-based.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class LengthMismatch : public InputError {
 public:
  LengthMismatch(std::size_t expected, std::size_t actual);
};

class DegenerateSpectrum : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotBracketed : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace rmsgof
