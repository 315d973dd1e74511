#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent caller input (bad dimensions, non-finite
// entries, unparsable files, missing assignment entries, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Matrix is significantly indefinite where positive semidefiniteness
// was required.
class NotPsd : public Error {
 public:
  using Error::Error;
};

// An operation requiring full column rank was given a rank-deficient matrix.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

// No multiplier exists; messages carry the witnessing point or region.
class Infeasible : public Error {
 public:
  using Error::Error;
};

// A piecewise-constant function was evaluated outside its region cover.
class UncoveredPoint : public Error {
 public:
  using Error::Error;
};

// Hypotheses of a closed-form construction do not hold for the input.
class NotApplicable : public Error {
 public:
  using Error::Error;
};

// Arithmetic overflow in exact integer computations.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// Invariant violation that should be unreachable; usually signals
// tolerance misconfiguration.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace finsler
