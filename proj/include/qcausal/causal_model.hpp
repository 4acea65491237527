#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcausal/linalg.hpp"

namespace qcausal {

/// Unit vector on the Bloch sphere.
struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;

  /// Validating constructor: |(x,y,z)| must be 1 within 1e-9.
  static BlochVector unit(double x, double y, double z);
  /// Normalizes (x,y,z); throws ArgumentError on the zero vector.
  static BlochVector normalized(double x, double y, double z);
  /// polar angle from +z, azimuth from +x.
  static BlochVector from_angles(double polar, double azimuth);
  static BlochVector x_axis() { return {1, 0, 0}; }
  static BlochVector y_axis() { return {0, 1, 0}; }
  static BlochVector z_axis() { return {0, 0, 1}; }

  double norm() const;
  BlochVector operator-() const { return {-x, -y, -z}; }
  /// n . sigma
  ComplexMatrix pauli() const;
  /// (I + sign * n.sigma) / 2
  ComplexMatrix projector(int sign) const;
};

double distance(const BlochVector& a, const BlochVector& b);

/// Trace-preserving qubit channel, stored by its Choi matrix (output (x) input,
/// trace one) together with a Kraus decomposition used for applying it.
class QubitChannel {
 public:
  static QubitChannel from_kraus(std::vector<ComplexMatrix> kraus);
  /// Throws ArgumentError if `choi` is not PSD or not trace preserving.
  static QubitChannel from_choi(const ComplexMatrix& choi);

  const ComplexMatrix& choi() const { return choi_; }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
  ComplexMatrix apply(const ComplexMatrix& rho) const;
  /// Applies the channel to subsystem `target` of a larger state.
  ComplexMatrix apply_on(const ComplexMatrix& state, const SubsystemLayout& layout,
                         const std::string& target) const;

 private:
  ComplexMatrix choi_;
  std::vector<ComplexMatrix> kraus_;
};

/// Two-qubit operation from (D,E) to (B,F): either one unitary or a convex
/// mixture of unitaries. Inputs map to outputs positionally, so the identity
/// wires D to B and E to F.
class TwoQubitGate {
 public:
  enum class Kind { unitary, mixture };
  struct Term {
    double weight;
    ComplexMatrix unitary;
  };

  static TwoQubitGate from_unitary(ComplexMatrix u);
  static TwoQubitGate from_mixture(std::vector<Term> terms);

  Kind kind() const { return kind_; }
  /// Unitary-kind gates have exactly one term with weight 1.
  const std::vector<Term>& terms() const { return terms_; }
  const ComplexMatrix& unitary() const;

  /// Applies the gate to the ordered pair `targets` inside `state`.
  ComplexMatrix apply_on(const ComplexMatrix& state, const SubsystemLayout& layout,
                         const std::vector<std::string>& targets) const;

 private:
  Kind kind_ = Kind::unitary;
  std::vector<Term> terms_;
};

struct DephasingSetting {
  BlochVector axis;
  double p = 0.0;
};

/// Dephasing axes for (E, D, B).
struct DephasingAxes {
  BlochVector e = BlochVector::x_axis();
  BlochVector d = BlochVector::y_axis();
  BlochVector b = BlochVector::z_axis();

  static DephasingAxes xyz() { return {}; }
  static DephasingAxes zzz() {
    return {BlochVector::z_axis(), BlochVector::z_axis(), BlochVector::z_axis()};
  }
};

/// Recipe for the circuit fragment: initial state on C (x) E, optional
/// dephasing of D and E before the gate, the gate DE -> BF, and optional
/// dephasing of B afterwards.
struct FragmentSpec {
  ComplexMatrix initial_state;
  std::optional<DephasingSetting> dephase_d;
  std::optional<DephasingSetting> dephase_e;
  TwoQubitGate gate;
  std::optional<DephasingSetting> dephase_b;
};

/// Trace-one Choi state tau_CBD with layout [C, B, D].
class CausalMap {
 public:
  static const SubsystemLayout& layout();

  /// Validates trace, positivity and trace preservation (tolerance 1e-9).
  /// Throws ContractViolation on failure.
  static CausalMap from_choi(ComplexMatrix tau, std::optional<FragmentSpec> provenance = std::nullopt);

  const ComplexMatrix& choi() const { return tau_; }
  /// Construction recipe, or nullopt for reconstructed maps.
  const std::optional<FragmentSpec>& provenance() const { return provenance_; }
  bool is_reconstructed() const { return !provenance_.has_value(); }

 private:
  ComplexMatrix tau_;
  std::optional<FragmentSpec> provenance_;
};

struct MapDiagnostics {
  double trace_error;
  double min_eigenvalue;
  double hermiticity_error;
  double trace_preservation_error;
};
MapDiagnostics diagnose_choi(const ComplexMatrix& tau);

/// True if m is Hermitian, trace one and PSD, all within `tol`.
bool is_density_operator(const ComplexMatrix& m, double tol = 1e-10);

// -- states, gates, channels -------------------------------------------------

/// (|00> + |11>)(<00| + <11|) / 2
ComplexMatrix phi_plus();

/// cos(theta/2) I + i sin(theta/2) SWAP.
TwoQubitGate partial_swap(double theta);

/// Temporal overlap factor exp(-tau^2 / (2 tau_coh^2)) of two Gaussian pulses.
double q_from_delay(double tau, double tau_coh);

/// q * partial_swap(theta) + (1-q)/2 * identity + (1-q)/2 * swap.
TwoQubitGate delay_gate(double theta, double q);

/// rho -> (1 - p/2) rho + (p/2) (n.sigma) rho (n.sigma).
QubitChannel dephasing(const BlochVector& n, double p);

/// Axes (n_E, n_D, n_B) of the one-parameter dephasing family joining the
/// (x, y, z) triple at eta = 0 to (z, z, z) at eta = pi/4.
DephasingAxes eta_axes(double eta);

/// Runs the fragment on half of a maximally entangled pair and returns the
/// resulting Choi state. Throws ConstructionError if the result is not a
/// valid causal map.
CausalMap build_causal_map(const FragmentSpec& spec);

/// E_CB|D(rho) = 2 Tr_D[tau (I_CB (x) rho^T)].
ComplexMatrix apply_map(const CausalMap& map, const ComplexMatrix& rho_d);

// -- named families -----------------------------------------------------------

/// The experiment's parameter set: initial state Phi+, gate delay_gate(theta, q),
/// and dephasing probability p on D, E, B along `axes` (no dephasing when p == 0).
struct FamilyParams {
  double theta = 1.5707963267948966;
  double q = 1.0;
  double p = 0.0;
  DephasingAxes axes{};
};

FragmentSpec family_fragment(const FamilyParams& params);
inline CausalMap family_map(const FamilyParams& params) {
  return build_causal_map(family_fragment(params));
}

// -- serialization ------------------------------------------------------------

/// {"layout":["C","B","D"],"re":[[..]],"im":[[..]]}
std::string causal_map_to_json(const CausalMap& map);
/// Throws ArgumentError on malformed input, ContractViolation if the matrix
/// is not a valid causal map.
CausalMap causal_map_from_json(std::string_view text);

}  // namespace qcausal
