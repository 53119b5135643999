#pragma once

#include <stdexcept>
#include <string>

namespace qtrack {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shapes of user-supplied matrices/vectors do not agree.
struct DimensionMismatch : Error {
  using Error::Error;
};

// (A, B) fails the controllability rank test.
struct NotControllable : Error {
  using Error::Error;
};

// A matrix required to be (semi)definite is not; carries which one.
struct NotPositiveDefinite : Error {
  using Error::Error;
};

// Simulation state exceeded the divergence guard norm.
struct DivergedState : Error {
  using Error::Error;
};

// Regression matrix is numerically rank-deficient: the data does not
// excite all weights.
struct ExcitationDeficient : Error {
  using Error::Error;
};

// The closed-form sparse weight count is not an integer for the
// requested (n, m, N, q).
struct NonIntegralCount : Error {
  using Error::Error;
};

// A structural-zero entry of H is non-negligible.
struct StructureViolation : Error {
  using Error::Error;
};

// An iteration failed to converge within its budget.
struct MaxIterationsExceeded : Error {
  using Error::Error;
};

// Weight errors are undefined because the oracle weight vector is zero.
struct ZeroOracle : Error {
  using Error::Error;
};

}  // namespace qtrack
