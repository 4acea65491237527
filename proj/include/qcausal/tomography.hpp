#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qcausal/causal_model.hpp"
#include "qcausal/witnesses.hpp"

namespace qcausal {

enum class PauliAxis { X, Y, Z };

std::string to_string(PauliAxis a);
PauliAxis pauli_axis_from_string(std::string_view s);
BlochVector bloch_of(PauliAxis a);

/// One of the six Pauli eigenstates used as D repreparations.
struct PauliState {
  PauliAxis axis = PauliAxis::Z;
  int sign = +1;

  ComplexMatrix density() const { return bloch_of(axis).projector(sign); }
  friend bool operator==(const PauliState&, const PauliState&) = default;
};

std::string to_string(const PauliState& s);
PauliState pauli_state_from_string(std::string_view s);

struct TomographySetting {
  PauliAxis c_basis = PauliAxis::Z;
  PauliState d_prep;
  PauliAxis b_basis = PauliAxis::Z;

  friend bool operator==(const TomographySetting&, const TomographySetting&) = default;
};

/// The 3 x 6 x 3 grid in canonical order (C axis slowest, then D state, then B axis).
const std::vector<TomographySetting>& tomography_grid();

/// Outcome cells are ordered (c,b) = (+,+), (+,-), (-,+), (-,-).
using OutcomeArray = std::array<double, 4>;
inline constexpr std::array<std::array<int, 2>, 4> kOutcomeCells{{{+1, +1}, {+1, -1}, {-1, +1}, {-1, -1}}};

/// Counts for one setting. Sampled records hold integers; pseudo-count
/// records built from exact probabilities may hold fractional values.
struct CountRecord {
  TomographySetting setting;
  OutcomeArray counts{};
  double shots = 0.0;

  OutcomeArray frequencies() const;
};

/// P(c,b|d) = Tr[(Pi^c (x) Pi^b) E_CB|D(rho_d)].
OutcomeArray outcome_probabilities(const CausalMap& map, const TomographySetting& setting);

/// Multinomial draw of `shots` trials, deterministic in `seed`.
OutcomeArray sample_counts(const OutcomeArray& probabilities, std::uint64_t shots, std::uint64_t seed);

/// Sampled counts for every grid setting; setting k uses a seed derived from (seed, k).
std::vector<CountRecord> simulate_counts(const CausalMap& map, std::uint64_t shots, std::uint64_t seed);

/// Exact probabilities scaled by `shots` (real-valued counts).
std::vector<CountRecord> pseudo_counts(const CausalMap& map, double shots = 1.0);

/// Linear-inversion reconstruction followed by projection onto valid causal
/// maps. Throws ArgumentError listing missing settings and
/// ReconstructionError on a rank-deficient design.
CausalMap reconstruct(const std::vector<CountRecord>& records);

/// Family with every parameter fixed except theta.
struct ThetaFamily {
  double q = 1.0;
  double p = 0.0;
  DephasingAxes axes{};
};

struct FitResult {
  double theta_hat = 0.0;
  /// Sum of squared residuals at theta_hat.
  double residual = 0.0;
  /// Variance estimate for theta_hat from the curvature of the residual.
  double covariance_est = 0.0;
};

/// Least-squares fit of theta in [0, pi] against observed frequencies.
FitResult fit_theta(const std::vector<CountRecord>& records, const ThetaFamily& family);
/// Least-squares fit of theta against the entries of a Choi state.
FitResult fit_theta(const CausalMap& map, const ThetaFamily& family);

// -- prediction from an imperfect base map -------------------------------------

/// Effective imperfections absorbed from a base map: the base is modelled as
///   (1 - map_noise) * build((1 - state_noise) Phi+ + state_noise I/4, delay_gate(theta, visibility))
///     + map_noise * I/8.
struct Imperfections {
  double theta = 0.0;
  double visibility = 1.0;
  double state_noise = 0.0;
  double map_noise = 0.0;
};

struct DelayTransform {
  double q;
};
struct DephasingTransform {
  double p;
};
struct EtaTransform {
  double eta;
};
using MapTransform = std::variant<DelayTransform, DephasingTransform, EtaTransform>;

struct Prediction {
  CausalMap map;
  Imperfections fitted;
  /// Frobenius distance between the base and the fitted model.
  double fit_residual = 0.0;
  std::optional<std::string> warning;
};

Imperfections fit_imperfections(const CausalMap& base, double* residual = nullptr);
CausalMap build_with_imperfections(const Imperfections& imp, const MapTransform& transform);
Prediction predict_from_base(const CausalMap& base, const MapTransform& transform);

// -- bootstrap -------------------------------------------------------------------

struct BootstrapOptions {
  int resamples = 200;
  std::uint64_t seed = 0;
  /// A witness counts as nonzero when value > max(epsilon, z * standard_error).
  double z = 2.0;
  double epsilon = kDefaultEpsilon;
  SearchOptions search{};
};

struct WitnessErrors {
  double c_cd = 0.0;
  double search_cc = 0.0;
  double search_ce = 0.0;
  double search_berkson = 0.0;
  std::array<double, 2> neg_bd{};
  std::array<double, 2> neg_cb{};
  std::array<double, 2> neg_cd{};
};

struct BootstrapReport {
  WitnessReport report;  // point estimate on the reconstruction, classified with bootstrap thresholds
  WitnessErrors errors;
  CausalMap map;
};

BootstrapReport bootstrap_classify(const std::vector<CountRecord>& records, const BootstrapOptions& opts = {});

// -- CSV -------------------------------------------------------------------------

/// Header: setting_c,setting_d,setting_b,c,b,count,shots; one row per cell.
std::string counts_to_csv(const std::vector<CountRecord>& records);
std::vector<CountRecord> counts_from_csv(std::string_view text);

}  // namespace qcausal
