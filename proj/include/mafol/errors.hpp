#pragma once

#include <stdexcept>
#include <string>

namespace mafol {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation left the domain of a partial function (log/sqrt of a
// nonpositive value, division by a series with zero constant term, ...).
struct DomainError : Error {
  using Error::Error;
};

// A linear system that the surrounding theory promises to be solvable came
// out singular (Levi-degenerate point, ill-conditioned frame, ...).
struct SingularSystemError : Error {
  using Error::Error;
};

struct ParseError : Error {
  std::size_t offset;  // 1-based byte position in the source text
  ParseError(const std::string& msg, std::size_t off)
      : Error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

// A continuation path left the trust region of the Taylor series.
struct TrustRegionError : Error {
  double reached_fraction;  // fraction of the requested path that was covered
  TrustRegionError(const std::string& msg, double reached)
      : Error(msg), reached_fraction(reached) {}
};

struct NewtonError : Error {
  using Error::Error;
};

struct CollarError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace mafol
