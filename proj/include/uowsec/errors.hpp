#ifndef UOWSEC_ERRORS_HPP_
#define UOWSEC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace uowsec {

// Base class for every typed error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside an operation's stated domain.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

// eta at (or numerically indistinguishable from) the singular point of the
// integer-mu expansion: eta = 1 in Format I, eta = 0 in Format II.
class DegenerateEta : public DomainError {
 public:
  explicit DegenerateEta(const std::string& msg) : DomainError(msg) {}
};

// Gamma-function pole hit (nonpositive-integer argument).
class PoleError : public DomainError {
 public:
  explicit PoleError(const std::string& msg) : DomainError(msg) {}
};

// Quadrature failed to reach the requested tolerance within its budget.
// The value accompanying this error must not be trusted.
class NonConvergent : public Error {
 public:
  explicit NonConvergent(const std::string& msg) : Error(msg) {}
};

// A truncated series was evaluated outside its usable range.
class SeriesDiverged : public Error {
 public:
  explicit SeriesDiverged(const std::string& msg) : Error(msg) {}
};

// Configuration file could not be parsed.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Configuration parsed but violates a type invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// A comparison was requested but only one engine's results are present.
class MissingEngine : public Error {
 public:
  explicit MissingEngine(const std::string& msg) : Error(msg) {}
};

}  // namespace uowsec

#endif  // UOWSEC_ERRORS_HPP_
