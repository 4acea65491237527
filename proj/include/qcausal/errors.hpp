#pragma once

#include <stdexcept>
#include <string>

namespace qcausal {

/// Bad caller input: unknown label, out-of-range probability, malformed file.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical precondition was violated (non-Hermitian input to the
/// eigensolver, a map that fails its trace or positivity checks).
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// build_causal_map produced something that is not a valid causal map.
class ConstructionError : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

/// Conditioning on an outcome whose probability is (numerically) zero.
class ZeroProbabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tomographic inversion failed (rank-deficient design).
class ReconstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qcausal
