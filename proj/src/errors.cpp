#include "rmsgof/errors.hpp"

namespace rmsgof {

NonPositiveProbability::NonPositiveProbability(std::size_t index, double value,
                                               std::size_t line)
    : InputError((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                 "probability at bin " + std::to_string(index + 1) + " is not positive (" +
                 std::to_string(value) + ")"),
      index_(index),
      line_(line) {}

TooFewBins::TooFewBins(std::size_t n)
    : InputError("a model needs at least 2 bins, got " + std::to_string(n)) {}

NotFinite::NotFinite(std::size_t index)
    : InputError("weight at bin " + std::to_string(index + 1) + " is not finite") {}

UnsupportedBinCount::UnsupportedBinCount(const std::string& family, std::size_t n)
    : InputError("family " + family + " does not support n = " + std::to_string(n)) {}

ParseError::ParseError(std::size_t line, const std::string& what)
    : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

LengthMismatch::LengthMismatch(std::size_t expected, std::size_t actual)
    : InputError("length mismatch: expected " + std::to_string(expected) + " bins, got " +
                 std::to_string(actual)) {}

}  // namespace rmsgof
