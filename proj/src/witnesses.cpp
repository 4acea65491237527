#include "qcausal/witnesses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <numbers>

#include "json.hpp"

#include "qcausal/errors.hpp"
#include "qcausal/optimize.hpp"

namespace qcausal {

namespace {

constexpr double kZeroProb = 1e-12;
constexpr double kNegativityClamp = 1e-12;

const SubsystemLayout kLayoutBD{"B", "D"};
const SubsystemLayout kLayoutCD{"C", "D"};
const SubsystemLayout kLayoutCB{"C", "B"};

}  // namespace

ProjectivePair::ProjectivePair(const BlochVector& n) : bloch(n), plus(n.projector(+1)), minus(n.projector(-1)) {}

InducedState induced_state(const CausalMap& map, Conditioned system, const ComplexMatrix& proj, int outcome) {
  if (proj.dim() != 2) throw ArgumentError("induced_state: projector must be 2x2");
  const std::string label = system == Conditioned::C ? "C" : "B";
  const ComplexMatrix weighted = apply_left(proj, map.choi(), CausalMap::layout(), {label});
  const double p = weighted.trace().real();
  if (p < kZeroProb) {
    throw ZeroProbabilityError("induced_state: outcome on " + label + " has probability " + std::to_string(p));
  }
  InducedState s;
  s.layout = system == Conditioned::C ? kLayoutBD : kLayoutCD;
  s.state = partial_trace(weighted, CausalMap::layout(), s.layout.labels()) * complex(1.0 / p);
  // Tr[(P (x) I) tau] is real for Hermitian P; the conditioned block is only
  // Hermitian after the trace, so symmetrize rounding noise away.
  s.state = s.state.hermitian_part();
  s.prob = p;
  s.conditioned_label = label;
  s.outcome = outcome;
  return s;
}

InducedState prepared_state_cb(const CausalMap& map, const ComplexMatrix& d_proj, int outcome) {
  InducedState s;
  s.state = apply_map(map, d_proj).hermitian_part();
  s.layout = kLayoutCB;
  s.prob = 0.5;
  s.conditioned_label = "D";
  s.outcome = outcome;
  return s;
}

double negativity(const ComplexMatrix& state, const SubsystemLayout& layout, const std::string& cut_on) {
  const double n = 0.5 * (trace_norm(partial_transpose(state, layout, cut_on)) - 1.0);
  return n < kNegativityClamp ? 0.0 : n;
}

double covariance_xy(const InducedState& s) {
  if (s.layout != kLayoutCD) throw ArgumentError("covariance_xy: expected layout [C,D], got " + s.layout.to_string());
  const auto& rho = s.state;
  const double xy = trace_of_product(rho, kron(pauli::X(), pauli::Y())).real();
  const double x = trace_of_product(rho, kron(pauli::X(), pauli::I())).real();
  const double y = trace_of_product(rho, kron(pauli::I(), pauli::Y())).real();
  return xy - x * y;
}

double c_cd_witness(const CausalMap& map) {
  const ProjectivePair zb(BlochVector::z_axis());
  double total = 0.0;
  for (int b : {+1, -1}) {
    try {
      const InducedState s = induced_state(map, Conditioned::B, zb[b], b);
      total += 2.0 * b * s.prob * s.prob * covariance_xy(s);
    } catch (const ZeroProbabilityError&) {
      // P(b)^2 weighting sends this term to zero.
    }
  }
  return total;
}

// -- searches ----------------------------------------------------------------

namespace {

using Objective = std::function<double(const BlochVector&)>;

double min_over_outcomes(const std::function<double(const ComplexMatrix&, int)>& neg_of, const BlochVector& n) {
  const ProjectivePair pair(n);
  double m = std::numeric_limits<double>::infinity();
  for (int s : {+1, -1}) m = std::min(m, neg_of(pair[s], s));
  return m;
}

Objective conditioned_objective(const CausalMap& map, Conditioned system) {
  return [&map, system](const BlochVector& n) {
    return min_over_outcomes(
        [&](const ComplexMatrix& proj, int s) {
          try {
            return negativity(induced_state(map, system, proj, s));
          } catch (const ZeroProbabilityError&) {
            return 0.0;  // an impossible outcome leaves no entangled state
          }
        },
        n);
  };
}

Objective prepared_objective(const CausalMap& map) {
  return [&map](const BlochVector& n) {
    return min_over_outcomes(
        [&](const ComplexMatrix& proj, int s) { return negativity(prepared_state_cb(map, proj, s)); }, n);
  };
}

BlochVector upper(const BlochVector& n) {
  // Canonical representative of the projective pair {n, -n}.
  if (n.z < 0 || (n.z == 0 && (n.y < 0 || (n.y == 0 && n.x < 0)))) return -n;
  return n;
}

SearchResult maximize_over_hemisphere(const Objective& f, const SearchOptions& opts) {
  // Reference axes first so the search never reports less than they give.
  std::vector<BlochVector> grid{BlochVector::x_axis(), BlochVector::y_axis(), BlochVector::z_axis()};
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const int n_pts = std::max(opts.grid_points, 1);
  for (int i = 0; i < n_pts; ++i) {
    const double z = 1.0 - (i + 0.5) / n_pts;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    grid.push_back({r * std::cos(phi), r * std::sin(phi), z});
  }

  SearchResult best{grid.front(), -1.0};
  for (const auto& n : grid) {
    const double v = f(n);
    if (v > best.min_negativity) best = {n, v};
  }

  const double polar0 = std::acos(std::clamp(best.basis.z, -1.0, 1.0));
  const double azimuth0 = std::atan2(best.basis.y, best.basis.x);
  const double step = std::sqrt(2.0 * std::numbers::pi / n_pts);
  auto neg_f = [&](const std::vector<double>& a) { return -f(BlochVector::from_angles(a[0], a[1])); };
  const MinimizeResult r = nelder_mead(neg_f, {polar0, azimuth0}, step, opts.max_iterations, opts.simplex_tolerance);
  if (-r.value > best.min_negativity) best = {BlochVector::from_angles(r.x[0], r.x[1]), -r.value};

  best.basis = upper(best.basis);
  return best;
}

}  // namespace

SearchResult search_pathway_cc(const CausalMap& map, const SearchOptions& opts) {
  return maximize_over_hemisphere(prepared_objective(map), opts);
}

SearchResult search_pathway_ce(const CausalMap& map, const SearchOptions& opts) {
  return maximize_over_hemisphere(conditioned_objective(map, Conditioned::C), opts);
}

SearchResult search_berkson(const CausalMap& map, const SearchOptions& opts) {
  return maximize_over_hemisphere(conditioned_objective(map, Conditioned::B), opts);
}

EntanglementBreaking entanglement_breaking_flags(const CausalMap& map, double epsilon) {
  const auto& tau = map.choi();
  const double n_cb = negativity(partial_trace(tau, CausalMap::layout(), {"C", "B"}), kLayoutCB, "B");
  const double n_bd = negativity(partial_trace(tau, CausalMap::layout(), {"B", "D"}), kLayoutBD, "D");
  return {n_cb < epsilon, n_bd < epsilon};
}

// -- classification ----------------------------------------------------------

std::string to_string(CausalClass c) {
  switch (c) {
    case CausalClass::ProbC: return "ProbC";
    case CausalClass::ProbQ: return "ProbQ";
    case CausalClass::PhysC: return "PhysC";
    case CausalClass::PhysQ: return "PhysQ";
    case CausalClass::Coh: return "Coh";
    case CausalClass::Undetermined: return "undetermined";
  }
  return "undetermined";
}

CausalClass causal_class_from_string(const std::string& s) {
  for (auto c : {CausalClass::ProbC, CausalClass::ProbQ, CausalClass::PhysC, CausalClass::PhysQ, CausalClass::Coh,
                 CausalClass::Undetermined})
    if (to_string(c) == s) return c;
  throw ArgumentError("unknown causal class '" + s + "'");
}

std::map<std::string, BlochVector> WitnessReport::optimal_bases() const {
  return {{"cc", search_cc.basis}, {"ce", search_ce.basis}, {"berkson", search_berkson.basis}};
}

namespace {

std::array<double, 2> reference_negativities(const std::function<double(int)>& neg_of) {
  return {neg_of(+1), neg_of(-1)};
}

}  // namespace

WitnessReport evaluate_witnesses(const CausalMap& map, const SearchOptions& opts) {
  WitnessReport r;
  r.c_cd = c_cd_witness(map);

  const ProjectivePair xc(BlochVector::x_axis()), yd(BlochVector::y_axis()), zb(BlochVector::z_axis());
  auto conditioned = [&](Conditioned sys, const ProjectivePair& pair) {
    return reference_negativities([&](int s) {
      try {
        return negativity(induced_state(map, sys, pair[s], s));
      } catch (const ZeroProbabilityError&) {
        return 0.0;
      }
    });
  };
  r.neg_bd = conditioned(Conditioned::C, xc);
  r.neg_cd = conditioned(Conditioned::B, zb);
  r.neg_cb = reference_negativities([&](int s) { return negativity(prepared_state_cb(map, yd[s], s)); });

  r.search_cc = search_pathway_cc(map, opts);
  r.search_ce = search_pathway_ce(map, opts);
  r.search_berkson = search_berkson(map, opts);

  const auto& tau = map.choi();
  r.cc_marginal_negativity = negativity(partial_trace(tau, CausalMap::layout(), {"C", "B"}), kLayoutCB, "B");
  r.ce_marginal_negativity = negativity(partial_trace(tau, CausalMap::layout(), {"B", "D"}), kLayoutBD, "D");
  return r;
}

void assign_class(WitnessReport& r, const WitnessThresholds& t) {
  WitnessFlags& f = r.flags;
  f.physical_mixture = std::abs(r.c_cd) > t.c_cd;
  f.cc_quantum = r.search_cc.min_negativity > t.cc;
  f.ce_quantum = r.search_ce.min_negativity > t.ce;
  f.berkson = r.search_berkson.min_negativity > t.berkson;
  f.cc_entanglement_breaking = r.cc_marginal_negativity < t.entanglement_breaking;
  f.ce_entanglement_breaking = r.ce_marginal_negativity < t.entanglement_breaking;

  const bool finite = std::isfinite(r.c_cd) && std::isfinite(r.search_cc.min_negativity) &&
                      std::isfinite(r.search_ce.min_negativity) && std::isfinite(r.search_berkson.min_negativity);
  const bool pathway_quantum = f.cc_quantum || f.ce_quantum;
  if (!finite) {
    r.class_label = CausalClass::Undetermined;
  } else if (f.berkson && !(f.cc_entanglement_breaking && f.ce_entanglement_breaking)) {
    r.class_label = CausalClass::Coh;
  } else if (f.physical_mixture) {
    r.class_label = pathway_quantum ? CausalClass::PhysQ : CausalClass::PhysC;
  } else {
    r.class_label = pathway_quantum ? CausalClass::ProbQ : CausalClass::ProbC;
  }
}

WitnessReport classify(const CausalMap& map, double epsilon, const SearchOptions& opts) {
  if (!(epsilon > 0.0)) throw ArgumentError("classify: epsilon must be positive");
  WitnessReport r = evaluate_witnesses(map, opts);
  r.epsilon = epsilon;
  assign_class(r, WitnessThresholds::uniform(epsilon));
  return r;
}

std::string witness_report_to_json(const WitnessReport& r, int indent) {
  auto basis = [](const BlochVector& n) { return nlohmann::json::array({n.x, n.y, n.z}); };
  nlohmann::ordered_json j;
  j["c_cd"] = r.c_cd;
  j["neg_bd_plus"] = r.neg_bd[0];
  j["neg_bd_minus"] = r.neg_bd[1];
  j["neg_cb_plus"] = r.neg_cb[0];
  j["neg_cb_minus"] = r.neg_cb[1];
  j["neg_cd_plus"] = r.neg_cd[0];
  j["neg_cd_minus"] = r.neg_cd[1];
  j["search_cc"] = r.search_cc.min_negativity;
  j["search_ce"] = r.search_ce.min_negativity;
  j["search_berkson"] = r.search_berkson.min_negativity;
  j["basis_cc"] = basis(r.search_cc.basis);
  j["basis_ce"] = basis(r.search_ce.basis);
  j["basis_berkson"] = basis(r.search_berkson.basis);
  j["physical_mixture"] = r.flags.physical_mixture;
  j["cc_quantum"] = r.flags.cc_quantum;
  j["ce_quantum"] = r.flags.ce_quantum;
  j["berkson"] = r.flags.berkson;
  j["cc_entanglement_breaking"] = r.flags.cc_entanglement_breaking;
  j["ce_entanglement_breaking"] = r.flags.ce_entanglement_breaking;
  j["epsilon"] = r.epsilon;
  j["class"] = to_string(r.class_label);
  return j.dump(indent);
}

}  // namespace qcausal
