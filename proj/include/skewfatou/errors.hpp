#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace skewfatou {

// Base class for every failure the library reports. Callers that want a
// single catch site can catch this; the CLI maps it to exit code 2.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

// certify_subhyperbolic could not decide a critical orbit within budget.
class Undecided : public Error {
 public:
  using Error::Error;
};

class NoAttractingMargin : public Error {
 public:
  using Error::Error;
};

class ResonanceBreakdown : public Error {
 public:
  using Error::Error;
};

class BranchCollision : public Error {
 public:
  using Error::Error;
};

class OverflowEscape : public Error {
 public:
  using Error::Error;
};

class StableManifoldBranch : public Error {
 public:
  using Error::Error;
};

class NotResonant : public Error {
 public:
  using Error::Error;
};

class DegenerateFit : public Error {
 public:
  using Error::Error;
};

class EmptyJuliaSample : public Error {
 public:
  using Error::Error;
};

class CountMismatch : public Error {
 public:
  using Error::Error;
};

class PreconditionFail : public Error {
 public:
  using Error::Error;
};

class HypothesisFail : public Error {
 public:
  using Error::Error;
};

class ClosureMismatch : public Error {
 public:
  using Error::Error;
};

class ZeroInput : public Error {
 public:
  using Error::Error;
};

// Map/complex-literal syntax error. position is the 0-based offset of the
// offending character in the input string; the CLI prints it 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position + 1) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace skewfatou
