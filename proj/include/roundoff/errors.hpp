#pragma once

#include <stdexcept>
#include <string>

namespace roundoff {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int col, const std::string& what)
      : Error("syntax error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + what),
        line(line), col(col) {}
  int line;
  int col;
};

class UnknownVariable : public Error {
 public:
  explicit UnknownVariable(const std::string& name) : Error("unknown variable '" + name + "'"), name(name) {}
  std::string name;
};

class ArityMismatch : public Error {
 public:
  using Error::Error;
};

class NestedConditional : public Error {
 public:
  NestedConditional() : Error("nested conditionals are not supported") {}
};

class EmptyBox : public Error {
 public:
  explicit EmptyBox(int index) : Error("empty box interval for variable " + std::to_string(index)), index(index) {}
  int index;
};

class NonDifferentiableAtSymbolLevel : public Error {
 public:
  NonDifferentiableAtSymbolLevel() : Error("cannot differentiate through a conditional") {}
};

class DivisionByZeroInterval : public Error {
 public:
  explicit DivisionByZeroInterval(const std::string& where = "")
      : Error("denominator interval contains zero" + (where.empty() ? std::string() : ": " + where)) {}
};

class DomainViolation : public Error {
 public:
  explicit DomainViolation(const std::string& op) : Error("domain violation in " + op), op(op) {}
  std::string op;
};

class EpsTooLargeForChain : public Error {
 public:
  explicit EpsTooLargeForChain(int k)
      : Error("machine epsilon too large for a product chain of length " + std::to_string(k)), k(k) {}
  int k;
};

class RipFailure : public Error {
 public:
  explicit RipFailure(int witness)
      : Error("no clique ordering satisfies the running intersection property (witness " +
              std::to_string(witness) + ")"),
        witness(witness) {}
  int witness;
};

class OrderTooSmall : public Error {
 public:
  OrderTooSmall(int d, int needed)
      : Error("relaxation order " + std::to_string(d) + " below minimum " + std::to_string(needed)),
        d(d), needed(needed) {}
  int d;
  int needed;
};

class CliqueCoverageFailure : public Error {
 public:
  explicit CliqueCoverageFailure(const std::string& monomial)
      : Error("monomial not covered by any clique: " + monomial) {}
};

class MalformedSolutionFile : public Error {
 public:
  using Error::Error;
};

class ExtractionDegenerate : public Error {
 public:
  ExtractionDegenerate() : Error("all LDL pivots were clipped") {}
};

class MalformedCertificate : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class RejectionSamplingStarved : public Error {
 public:
  explicit RejectionSamplingStarved(double rate)
      : Error("constraint acceptance rate too low: " + std::to_string(rate)), rate(rate) {}
  double rate;
};

}  // namespace roundoff
