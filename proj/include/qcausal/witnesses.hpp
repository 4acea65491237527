#pragma once

#include <array>
#include <map>
#include <string>

#include "qcausal/causal_model.hpp"
#include "qcausal/linalg.hpp"

namespace qcausal {

inline constexpr double kDefaultEpsilon = 1e-7;

/// Orthogonal rank-one projectors onto the +n and -n eigenstates of n.sigma.
struct ProjectivePair {
  BlochVector bloch;
  ComplexMatrix plus;
  ComplexMatrix minus;

  explicit ProjectivePair(const BlochVector& n);
  const ComplexMatrix& operator[](int sign) const { return sign >= 0 ? plus : minus; }
};

/// System that is measured (C or B) when conditioning the Choi state.
enum class Conditioned { C, B };

/// Normalized two-qubit state left after conditioning on one outcome (or
/// preparing one state on D).
struct InducedState {
  ComplexMatrix state;
  SubsystemLayout layout;
  double prob = 0.0;
  std::string conditioned_label;
  int outcome = +1;
};

/// Tr_sys[(proj (x) I) tau] / P with P = Tr[(proj (x) I) tau]. The result
/// keeps the two remaining labels in canonical order: [B,D] for C and
/// [C,D] for B. Throws ZeroProbabilityError when P < 1e-12.
InducedState induced_state(const CausalMap& map, Conditioned system, const ComplexMatrix& proj,
                           int outcome = +1);

/// State on [C,B] produced by preparing `d_proj` on D. prob is 1/2, the
/// weight of each member of a uniformly prepared orthogonal pair.
InducedState prepared_state_cb(const CausalMap& map, const ComplexMatrix& d_proj, int outcome = +1);

/// (||T_cut(state)||_1 - 1) / 2, clamped to zero below 1e-12.
double negativity(const ComplexMatrix& state, const SubsystemLayout& layout, const std::string& cut_on);
inline double negativity(const InducedState& s) { return negativity(s.state, s.layout, s.layout.labels().back()); }

/// <X (x) Y> - <X (x) I><I (x) Y> on a [C,D] state. Throws ArgumentError on
/// any other layout.
double covariance_xy(const InducedState& state);

/// 2 * sum_b b P(b)^2 cov(tau^b_CD) with b from a sigma_z measurement on B.
double c_cd_witness(const CausalMap& map);

struct SearchOptions {
  int grid_points = 400;
  int max_iterations = 200;
  double simplex_tolerance = 1e-8;
};

struct SearchResult {
  BlochVector basis;
  double min_negativity = 0.0;
};

/// max over D-preparation bases of min_d N(tau^d_CB).
SearchResult search_pathway_cc(const CausalMap& map, const SearchOptions& opts = {});
/// max over C-measurement bases of min_c N(tau^c_BD).
SearchResult search_pathway_ce(const CausalMap& map, const SearchOptions& opts = {});
/// max over B-measurement bases of min_b N(tau^b_CD).
SearchResult search_berkson(const CausalMap& map, const SearchOptions& opts = {});

struct EntanglementBreaking {
  bool common_cause;  // Tr_D tau is PPT on C|B
  bool cause_effect;  // Tr_C tau is PPT on B|D
};
EntanglementBreaking entanglement_breaking_flags(const CausalMap& map, double epsilon = kDefaultEpsilon);

enum class CausalClass { ProbC, ProbQ, PhysC, PhysQ, Coh, Undetermined };
std::string to_string(CausalClass c);
CausalClass causal_class_from_string(const std::string& s);

struct WitnessFlags {
  bool physical_mixture = false;
  bool cc_quantum = false;
  bool ce_quantum = false;
  bool berkson = false;
  bool cc_entanglement_breaking = false;
  bool ce_entanglement_breaking = false;
};

/// Per-witness decision thresholds. A witness counts as nonzero when its
/// value exceeds its threshold.
struct WitnessThresholds {
  double c_cd = kDefaultEpsilon;
  double cc = kDefaultEpsilon;
  double ce = kDefaultEpsilon;
  double berkson = kDefaultEpsilon;
  double entanglement_breaking = kDefaultEpsilon;

  static WitnessThresholds uniform(double eps) { return {eps, eps, eps, eps, eps}; }
};

/// Everything computed for one map. Per-outcome negativities are taken in
/// the reference bases (sigma_x on C, sigma_y on D, sigma_z on B); the
/// search fields hold the optimum over all bases and drive the flags.
struct WitnessReport {
  double c_cd = 0.0;
  std::array<double, 2> neg_bd{};  // {+1, -1}
  std::array<double, 2> neg_cb{};
  std::array<double, 2> neg_cd{};
  SearchResult search_cc;
  SearchResult search_ce;
  SearchResult search_berkson;
  double cc_marginal_negativity = 0.0;  // N(Tr_D tau) on C|B
  double ce_marginal_negativity = 0.0;  // N(Tr_C tau) on B|D
  WitnessFlags flags;
  CausalClass class_label = CausalClass::Undetermined;
  double epsilon = kDefaultEpsilon;

  std::map<std::string, BlochVector> optimal_bases() const;
};

/// Computes all witness values; flags and class are left unset.
WitnessReport evaluate_witnesses(const CausalMap& map, const SearchOptions& opts = {});

/// Derives flags and class label from the values in `report`.
void assign_class(WitnessReport& report, const WitnessThresholds& thresholds);

/// evaluate_witnesses + assign_class with a single threshold.
WitnessReport classify(const CausalMap& map, double epsilon = kDefaultEpsilon, const SearchOptions& opts = {});

/// Flat JSON object; see README for the field list.
std::string witness_report_to_json(const WitnessReport& report, int indent = -1);

}  // namespace qcausal
