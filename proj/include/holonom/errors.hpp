#pragma once

#include <stdexcept>
#include <string>

namespace holonom {

// Base for every failure raised by the library. CLI maps these to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class NotUnitary : public Error {
 public:
  using Error::Error;
};

// Eigendecomposition or exponentiation did not converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// An eigenphase sits on the principal-branch cut at pi.
class BranchCutWarning : public Error {
 public:
  BranchCutWarning(double phase)
      : Error("eigenphase " + std::to_string(phase) + " lies on the branch cut at pi"),
        phase_(phase) {}
  double phase() const noexcept { return phase_; }

 private:
  double phase_;
};

// Eigenbasis of Ha is not unique, so the Kac criterion is ill-defined.
class DegenerateEigenbasisWarning : public Error {
 public:
  DegenerateEigenbasisWarning(double gap)
      : Error("degenerate spectrum, eigenvalue gap " + std::to_string(gap)), gap_(gap) {}
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

class SeedNotConverged : public Error {
 public:
  using Error::Error;
};

class MalformedSequence : public Error {
 public:
  using Error::Error;
};

}  // namespace holonom
