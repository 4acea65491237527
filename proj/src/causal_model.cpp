#include "qcausal/causal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "qcausal/errors.hpp"

namespace qcausal {

namespace {

constexpr double kUnitTol = 1e-9;
constexpr double kChannelTol = 1e-10;
constexpr double kMapTol = 1e-9;
constexpr double kUnitaryTol = 1e-10;
constexpr double kWeightTol = 1e-12;

const SubsystemLayout kChannelLayout{"out", "in"};

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << name << " must lie in [0, 1], got " << p;
    throw ArgumentError(os.str());
  }
}

}  // namespace

// -- BlochVector -------------------------------------------------------------

BlochVector BlochVector::unit(double x, double y, double z) {
  BlochVector v{x, y, z};
  if (std::abs(v.norm() - 1.0) > kUnitTol) {
    std::ostringstream os;
    os << "Bloch vector (" << x << ", " << y << ", " << z << ") is not unit norm";
    throw ArgumentError(os.str());
  }
  return v;
}

BlochVector BlochVector::normalized(double x, double y, double z) {
  const double n = std::sqrt(x * x + y * y + z * z);
  if (n == 0.0 || !std::isfinite(n)) throw ArgumentError("cannot normalize a zero Bloch vector");
  return {x / n, y / n, z / n};
}

BlochVector BlochVector::from_angles(double polar, double azimuth) {
  return {std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar)};
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

ComplexMatrix BlochVector::pauli() const {
  return {{z, complex(x, -y)}, {complex(x, y), -z}};
}

ComplexMatrix BlochVector::projector(int sign) const {
  const double s = sign >= 0 ? 1.0 : -1.0;
  return 0.5 * (ComplexMatrix::identity(2) + s * pauli());
}

double distance(const BlochVector& a, const BlochVector& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

// -- QubitChannel ------------------------------------------------------------

QubitChannel QubitChannel::from_kraus(std::vector<ComplexMatrix> kraus) {
  ComplexMatrix sum(2);
  ComplexMatrix choi(4);
  for (const auto& k : kraus) {
    if (k.dim() != 2) throw ArgumentError("QubitChannel: Kraus operators must be 2x2");
    sum += k.adjoint() * k;
    // |K>> has components (out, in) = K[out][in].
    std::vector<complex> vec(4);
    for (std::size_t o = 0; o < 2; ++o)
      for (std::size_t i = 0; i < 2; ++i) vec[o * 2 + i] = k(o, i);
    choi += 0.5 * ComplexMatrix::outer(vec);
  }
  if (max_abs_diff(sum, ComplexMatrix::identity(2)) > kChannelTol)
    throw ArgumentError("QubitChannel: Kraus operators are not trace preserving");
  QubitChannel ch;
  ch.choi_ = std::move(choi);
  ch.kraus_ = std::move(kraus);
  return ch;
}

QubitChannel QubitChannel::from_choi(const ComplexMatrix& choi) {
  if (choi.dim() != 4) throw ArgumentError("QubitChannel: Choi matrix must be 4x4");
  const auto es = hermitian_eigensystem(choi);
  if (es.values.front() < -kChannelTol) throw ArgumentError("QubitChannel: Choi matrix is not PSD");
  const ComplexMatrix in_marginal = partial_trace(choi, kChannelLayout, {"in"});
  if (max_abs_diff(in_marginal, 0.5 * ComplexMatrix::identity(2)) > kChannelTol)
    throw ArgumentError("QubitChannel: Choi matrix is not trace preserving");
  std::vector<ComplexMatrix> kraus;
  for (std::size_t k = 0; k < es.values.size(); ++k) {
    if (es.values[k] <= 0.0) continue;
    const double scale = std::sqrt(2.0 * es.values[k]);
    ComplexMatrix op(2);
    for (std::size_t o = 0; o < 2; ++o)
      for (std::size_t i = 0; i < 2; ++i) op(o, i) = scale * es.vectors[k][o * 2 + i];
    kraus.push_back(std::move(op));
  }
  QubitChannel ch;
  ch.choi_ = choi;
  ch.kraus_ = std::move(kraus);
  return ch;
}

ComplexMatrix QubitChannel::apply(const ComplexMatrix& rho) const {
  ComplexMatrix out(2);
  for (const auto& k : kraus_) out += k * rho * k.adjoint();
  return out;
}

ComplexMatrix QubitChannel::apply_on(const ComplexMatrix& state, const SubsystemLayout& layout,
                                     const std::string& target) const {
  ComplexMatrix out(state.dim());
  for (const auto& k : kraus_) out += conjugate(k, state, layout, {target});
  return out;
}

// -- TwoQubitGate ------------------------------------------------------------

namespace {
void check_unitary(const ComplexMatrix& u) {
  if (u.dim() != 4) throw ArgumentError("TwoQubitGate: unitary must be 4x4");
  if (max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(4)) > kUnitaryTol)
    throw ArgumentError("TwoQubitGate: matrix is not unitary");
}
}  // namespace

TwoQubitGate TwoQubitGate::from_unitary(ComplexMatrix u) {
  check_unitary(u);
  TwoQubitGate g;
  g.kind_ = Kind::unitary;
  g.terms_.push_back({1.0, std::move(u)});
  return g;
}

TwoQubitGate TwoQubitGate::from_mixture(std::vector<Term> terms) {
  if (terms.empty()) throw ArgumentError("TwoQubitGate: empty mixture");
  double total = 0.0;
  for (const auto& t : terms) {
    if (t.weight < 0.0) throw ArgumentError("TwoQubitGate: negative mixture weight");
    check_unitary(t.unitary);
    total += t.weight;
  }
  if (std::abs(total - 1.0) > kWeightTol) throw ArgumentError("TwoQubitGate: mixture weights do not sum to 1");
  TwoQubitGate g;
  g.kind_ = Kind::mixture;
  g.terms_ = std::move(terms);
  return g;
}

const ComplexMatrix& TwoQubitGate::unitary() const {
  if (kind_ != Kind::unitary) throw ArgumentError("TwoQubitGate: not a unitary gate");
  return terms_.front().unitary;
}

ComplexMatrix TwoQubitGate::apply_on(const ComplexMatrix& state, const SubsystemLayout& layout,
                                     const std::vector<std::string>& targets) const {
  ComplexMatrix out(state.dim());
  for (const auto& t : terms_) {
    if (t.weight == 0.0) continue;
    out += t.weight * conjugate(t.unitary, state, layout, targets);
  }
  return out;
}

// -- CausalMap ---------------------------------------------------------------

const SubsystemLayout& CausalMap::layout() {
  static const SubsystemLayout kLayout{"C", "B", "D"};
  return kLayout;
}

MapDiagnostics diagnose_choi(const ComplexMatrix& tau) {
  if (tau.dim() != 8) throw ArgumentError("causal map Choi state must be 8x8");
  MapDiagnostics d{};
  d.hermiticity_error = tau.hermiticity_error();
  d.trace_error = std::abs(tau.trace() - 1.0);
  d.min_eigenvalue = min_eigenvalue(tau.hermitian_part());
  const ComplexMatrix rho_d = partial_trace(tau, CausalMap::layout(), {"D"});
  d.trace_preservation_error = max_abs_diff(rho_d, 0.5 * ComplexMatrix::identity(2));
  return d;
}

CausalMap CausalMap::from_choi(ComplexMatrix tau, std::optional<FragmentSpec> provenance) {
  const MapDiagnostics d = diagnose_choi(tau);
  if (d.hermiticity_error > kMapTol || d.trace_error > kMapTol || d.min_eigenvalue < -kMapTol ||
      d.trace_preservation_error > kMapTol) {
    std::ostringstream os;
    os << "invalid causal map: hermiticity error " << d.hermiticity_error << ", trace error "
       << d.trace_error << ", min eigenvalue " << d.min_eigenvalue << ", trace-preservation error "
       << d.trace_preservation_error;
    throw ContractViolation(os.str());
  }
  CausalMap m;
  m.tau_ = std::move(tau);
  m.provenance_ = std::move(provenance);
  return m;
}

bool is_density_operator(const ComplexMatrix& m, double tol) {
  if (m.hermiticity_error() > tol) return false;
  if (std::abs(m.trace() - 1.0) > tol) return false;
  return min_eigenvalue(m.hermitian_part()) >= -tol;
}

// -- constructions -------------------------------------------------------------

ComplexMatrix phi_plus() {
  const double h = 1.0 / std::numbers::sqrt2;
  const std::vector<complex> v{h, 0.0, 0.0, h};
  return ComplexMatrix::outer(v);
}

TwoQubitGate partial_swap(double theta) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  return TwoQubitGate::from_unitary(c * ComplexMatrix::identity(4) + complex(0.0, s) * pauli::swap());
}

double q_from_delay(double tau, double tau_coh) {
  if (!(tau_coh > 0.0)) throw ArgumentError("tau_coh must be positive");
  return std::exp(-tau * tau / (2.0 * tau_coh * tau_coh));
}

TwoQubitGate delay_gate(double theta, double q) {
  check_probability(q, "q");
  if (q == 1.0) return partial_swap(theta);
  const double half = (1.0 - q) / 2.0;
  return TwoQubitGate::from_mixture({{q, partial_swap(theta).unitary()},
                                     {half, ComplexMatrix::identity(4)},
                                     {half, pauli::swap()}});
}

QubitChannel dephasing(const BlochVector& n, double p) {
  check_probability(p, "dephasing probability");
  if (std::abs(n.norm() - 1.0) > kUnitTol) throw ArgumentError("dephasing axis must be a unit vector");
  std::vector<ComplexMatrix> kraus;
  kraus.push_back(std::sqrt(1.0 - p / 2.0) * ComplexMatrix::identity(2));
  if (p > 0.0) kraus.push_back(std::sqrt(p / 2.0) * n.pauli());
  return QubitChannel::from_kraus(std::move(kraus));
}

DephasingAxes eta_axes(double eta) {
  const double c = std::cos(2.0 * eta), s = std::sin(2.0 * eta);
  DephasingAxes axes;
  axes.e = BlochVector::unit(c, 0.0, s);
  axes.d = BlochVector::unit(c * s, -c, s * s);
  axes.b = BlochVector::z_axis();
  return axes;
}

CausalMap build_causal_map(const FragmentSpec& spec) {
  if (spec.initial_state.dim() != 4 || !is_density_operator(spec.initial_state, 1e-10))
    throw ArgumentError("FragmentSpec: initial state must be a 4x4 density operator on C (x) E");

  // Dref is the retained half of the maximally entangled pair fed into D.
  SubsystemLayout layout{"C", "E", "D", "Dref"};
  ComplexMatrix state = kron(spec.initial_state, phi_plus());

  if (spec.dephase_d) state = dephasing(spec.dephase_d->axis, spec.dephase_d->p).apply_on(state, layout, "D");
  if (spec.dephase_e) state = dephasing(spec.dephase_e->axis, spec.dephase_e->p).apply_on(state, layout, "E");

  state = spec.gate.apply_on(state, layout, {"D", "E"});
  // The gate's outputs occupy the input slots: D -> B, E -> F.
  layout = SubsystemLayout{"C", "F", "B", "Dref"};

  if (spec.dephase_b) state = dephasing(spec.dephase_b->axis, spec.dephase_b->p).apply_on(state, layout, "B");

  ComplexMatrix reduced = partial_trace(state, layout, {"C", "B", "Dref"});
  // partial_trace keeps layout order, which is already [C, B, Dref].

  const MapDiagnostics d = diagnose_choi(reduced);
  if (d.hermiticity_error > kMapTol || d.trace_error > kMapTol || d.min_eigenvalue < -kMapTol ||
      d.trace_preservation_error > kMapTol) {
    std::ostringstream os;
    os << "build_causal_map: result violates causal-map invariants (hermiticity " << d.hermiticity_error
       << ", trace " << d.trace_error << ", min eigenvalue " << d.min_eigenvalue << ", TP "
       << d.trace_preservation_error << ")";
    throw ConstructionError(os.str());
  }
  return CausalMap::from_choi(std::move(reduced), spec);
}

ComplexMatrix apply_map(const CausalMap& map, const ComplexMatrix& rho_d) {
  if (rho_d.dim() != 2 || !is_density_operator(rho_d, 1e-10))
    throw ArgumentError("apply_map: input must be a 2x2 density operator");
  const ComplexMatrix weighted = map.choi() * kron(ComplexMatrix::identity(4), rho_d.transpose());
  return 2.0 * partial_trace(weighted, CausalMap::layout(), {"C", "B"});
}

FragmentSpec family_fragment(const FamilyParams& params) {
  check_probability(params.p, "p");
  FragmentSpec spec;
  spec.initial_state = phi_plus();
  spec.gate = delay_gate(params.theta, params.q);
  if (params.p > 0.0) {
    spec.dephase_d = DephasingSetting{params.axes.d, params.p};
    spec.dephase_e = DephasingSetting{params.axes.e, params.p};
    spec.dephase_b = DephasingSetting{params.axes.b, params.p};
  }
  return spec;
}

// -- JSON ---------------------------------------------------------------------

std::string causal_map_to_json(const CausalMap& map) {
  nlohmann::ordered_json j;
  j["layout"] = CausalMap::layout().labels();
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  const auto& tau = map.choi();
  for (std::size_t r = 0; r < tau.dim(); ++r) {
    nlohmann::json rr = nlohmann::json::array(), ir = nlohmann::json::array();
    for (std::size_t c = 0; c < tau.dim(); ++c) {
      rr.push_back(tau(r, c).real());
      ir.push_back(tau(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j.dump();
}

CausalMap causal_map_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArgumentError(std::string("map JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("layout") || !j.contains("re") || !j.contains("im"))
    throw ArgumentError("map JSON: expected object with keys layout, re, im");
  if (j["layout"] != nlohmann::json(CausalMap::layout().labels()))
    throw ArgumentError("map JSON: layout must be [\"C\",\"B\",\"D\"]");
  const auto& re = j["re"];
  const auto& im = j["im"];
  auto check_rows = [](const nlohmann::json& a, const char* name) {
    if (!a.is_array() || a.size() != 8) throw ArgumentError(std::string("map JSON: ") + name + " must be 8x8");
    for (const auto& row : a) {
      if (!row.is_array() || row.size() != 8) throw ArgumentError(std::string("map JSON: ") + name + " must be 8x8");
      for (const auto& x : row)
        if (!x.is_number()) throw ArgumentError(std::string("map JSON: ") + name + " entries must be numbers");
    }
  };
  check_rows(re, "re");
  check_rows(im, "im");
  ComplexMatrix tau(8);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) tau(r, c) = complex(re[r][c].get<double>(), im[r][c].get<double>());
  return CausalMap::from_choi(std::move(tau));
}

}  // namespace qcausal
