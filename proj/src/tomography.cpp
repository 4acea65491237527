#include "qcausal/tomography.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "qcausal/errors.hpp"
#include "qcausal/optimize.hpp"

namespace qcausal {

// -- settings -------------------------------------------------------------------

std::string to_string(PauliAxis a) {
  switch (a) {
    case PauliAxis::X: return "x";
    case PauliAxis::Y: return "y";
    case PauliAxis::Z: return "z";
  }
  return "z";
}

PauliAxis pauli_axis_from_string(std::string_view s) {
  if (s == "x" || s == "X") return PauliAxis::X;
  if (s == "y" || s == "Y") return PauliAxis::Y;
  if (s == "z" || s == "Z") return PauliAxis::Z;
  throw ArgumentError("unknown Pauli axis '" + std::string(s) + "'");
}

BlochVector bloch_of(PauliAxis a) {
  switch (a) {
    case PauliAxis::X: return BlochVector::x_axis();
    case PauliAxis::Y: return BlochVector::y_axis();
    case PauliAxis::Z: return BlochVector::z_axis();
  }
  return BlochVector::z_axis();
}

std::string to_string(const PauliState& s) { return (s.sign >= 0 ? "+" : "-") + to_string(s.axis); }

PauliState pauli_state_from_string(std::string_view s) {
  if (s.size() != 2 || (s[0] != '+' && s[0] != '-'))
    throw ArgumentError("Pauli state must look like +x or -z, got '" + std::string(s) + "'");
  return {pauli_axis_from_string(s.substr(1)), s[0] == '+' ? +1 : -1};
}

const std::vector<TomographySetting>& tomography_grid() {
  static const std::vector<TomographySetting> grid = [] {
    std::vector<TomographySetting> g;
    const std::array axes{PauliAxis::X, PauliAxis::Y, PauliAxis::Z};
    for (auto c : axes)
      for (auto d : axes)
        for (int sign : {+1, -1})
          for (auto b : axes) g.push_back({c, {d, sign}, b});
    return g;
  }();
  return grid;
}

namespace {

std::size_t grid_index(const TomographySetting& s) {
  const auto& g = tomography_grid();
  const auto it = std::find(g.begin(), g.end(), s);
  if (it == g.end()) throw ArgumentError("setting is not on the tomography grid");
  return static_cast<std::size_t>(it - g.begin());
}

std::string describe(const TomographySetting& s) {
  return to_string(s.c_basis) + "/" + to_string(s.d_prep) + "/" + to_string(s.b_basis);
}

}  // namespace

OutcomeArray CountRecord::frequencies() const {
  OutcomeArray f{};
  if (shots <= 0.0) return f;
  for (std::size_t i = 0; i < 4; ++i) f[i] = counts[i] / shots;
  return f;
}

// -- probabilities and sampling ------------------------------------------------------

OutcomeArray outcome_probabilities(const CausalMap& map, const TomographySetting& setting) {
  const ComplexMatrix cb = apply_map(map, setting.d_prep.density());
  const BlochVector nc = bloch_of(setting.c_basis), nb = bloch_of(setting.b_basis);
  OutcomeArray p{};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto [c, b] = kOutcomeCells[i];
    p[i] = std::max(0.0, trace_of_product(kron(nc.projector(c), nb.projector(b)), cb).real());
  }
  return p;
}

OutcomeArray sample_counts(const OutcomeArray& probabilities, std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw ArgumentError("sample_counts: shots must be positive");
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw ArgumentError("sample_counts: probabilities must be nonnegative");
    total += p;
  }
  if (total <= 0.0) throw ArgumentError("sample_counts: probabilities sum to zero");

  std::mt19937_64 rng(seed);
  OutcomeArray counts{};
  std::uint64_t remaining = shots;
  for (std::size_t i = 0; i < 4 && remaining > 0; ++i) {
    double rest = 0.0;
    for (std::size_t j = i + 1; j < 4; ++j) rest += probabilities[j];
    if (rest <= 0.0) {
      counts[i] = static_cast<double>(remaining);
      break;
    }
    const double pi = probabilities[i] / (probabilities[i] + rest);
    std::uint64_t k = 0;
    if (pi > 0.0) {
      std::binomial_distribution<std::uint64_t> dist(remaining, pi);
      k = dist(rng);
    }
    counts[i] = static_cast<double>(k);
    remaining -= k;
  }
  return counts;
}

namespace {
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}
}  // namespace

std::vector<CountRecord> simulate_counts(const CausalMap& map, std::uint64_t shots, std::uint64_t seed) {
  std::vector<CountRecord> records;
  const auto& grid = tomography_grid();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto probs = outcome_probabilities(map, grid[k]);
    records.push_back({grid[k], sample_counts(probs, shots, derive_seed(seed, k)), static_cast<double>(shots)});
  }
  return records;
}

std::vector<CountRecord> pseudo_counts(const CausalMap& map, double shots) {
  std::vector<CountRecord> records;
  for (const auto& s : tomography_grid()) {
    auto p = outcome_probabilities(map, s);
    for (double& x : p) x *= shots;
    records.push_back({s, p, shots});
  }
  return records;
}

// -- reconstruction -------------------------------------------------------------------

namespace {

// tau = (1/8) sum_{abc} r_abc sigma_a (x) sigma_b (x) sigma_c, a,b,c in {I,X,Y,Z}.
const std::array<ComplexMatrix, 4>& pauli_basis() {
  static const std::array<ComplexMatrix, 4> basis{pauli::I(), pauli::X(), pauli::Y(), pauli::Z()};
  return basis;
}

// Tr(Pi^s_n sigma_a) for a Pauli-axis projector.
double projector_component(PauliAxis axis, int sign, int a) {
  if (a == 0) return 1.0;
  const int axis_index = axis == PauliAxis::X ? 1 : axis == PauliAxis::Y ? 2 : 3;
  return a == axis_index ? static_cast<double>(sign) : 0.0;
}

struct Design {
  Eigen::MatrixXd matrix;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
};

const Design& design() {
  static const Design d = [] {
    const auto& grid = tomography_grid();
    Eigen::MatrixXd a(static_cast<Eigen::Index>(grid.size() * 4), 64);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto& s = grid[k];
      for (std::size_t cell = 0; cell < 4; ++cell) {
        const auto [c, b] = kOutcomeCells[cell];
        const auto row = static_cast<Eigen::Index>(k * 4 + cell);
        for (int ia = 0; ia < 4; ++ia)
          for (int ib = 0; ib < 4; ++ib)
            for (int id = 0; id < 4; ++id) {
              // frequency = 2 Tr[(Pi_c (x) Pi_b (x) rho_d^T) tau]; sigma_y^T = -sigma_y.
              double dcomp = projector_component(s.d_prep.axis, s.d_prep.sign, id);
              if (id == 2) dcomp = -dcomp;
              a(row, ia * 16 + ib * 4 + id) =
                  0.25 * projector_component(s.c_basis, c, ia) * projector_component(s.b_basis, b, ib) * dcomp;
            }
      }
    }
    Design out{a, Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(a)};
    return out;
  }();
  return d;
}

ComplexMatrix choi_from_coefficients(const Eigen::VectorXd& r) {
  const auto& p = pauli_basis();
  ComplexMatrix tau(8);
  for (int ia = 0; ia < 4; ++ia)
    for (int ib = 0; ib < 4; ++ib)
      for (int id = 0; id < 4; ++id) {
        const double w = r(ia * 16 + ib * 4 + id) / 8.0;
        if (w == 0.0) continue;
        tau += complex(w) * kron({p[ia], p[ib], p[id]});
      }
  return tau;
}

ComplexMatrix clip_to_psd(const ComplexMatrix& m) {
  const auto es = hermitian_eigensystem(m.hermitian_part());
  ComplexMatrix out(m.dim());
  double total = 0.0;
  for (std::size_t k = 0; k < es.values.size(); ++k) {
    const double v = std::max(0.0, es.values[k]);
    total += v;
    if (v > 0.0) out += complex(v) * ComplexMatrix::outer(es.vectors[k]);
  }
  if (total <= 0.0) return ComplexMatrix::identity(m.dim()) * complex(1.0 / m.dim());
  return out * complex(1.0 / total);
}

ComplexMatrix correct_trace_preservation(const ComplexMatrix& tau) {
  const ComplexMatrix rho_d = partial_trace(tau, CausalMap::layout(), {"D"});
  const ComplexMatrix defect = 0.5 * ComplexMatrix::identity(2) - rho_d;
  return tau + kron(0.25 * ComplexMatrix::identity(4), defect);
}

ComplexMatrix project_to_causal_map(ComplexMatrix tau) {
  constexpr int kAlternations = 50;
  constexpr double kPsdTol = 1e-12;
  for (int i = 0; i < kAlternations; ++i) {
    tau = correct_trace_preservation(clip_to_psd(tau)).hermitian_part();
    if (min_eigenvalue(tau) >= -kPsdTol) return tau;
  }
  // Mixing with I/8 keeps trace and trace preservation and lifts the spectrum.
  const double deficit = -min_eigenvalue(tau);
  if (deficit > 0.0) {
    const double lambda = 8.0 * deficit / (1.0 + 8.0 * deficit);
    tau = (1.0 - lambda) * tau + complex(lambda / 8.0) * ComplexMatrix::identity(8);
  }
  return tau;
}

}  // namespace

CausalMap reconstruct(const std::vector<CountRecord>& records) {
  const auto& grid = tomography_grid();
  std::vector<OutcomeArray> counts(grid.size(), OutcomeArray{});
  std::vector<double> shots(grid.size(), 0.0);
  for (const auto& rec : records) {
    const std::size_t k = grid_index(rec.setting);
    for (std::size_t i = 0; i < 4; ++i) counts[k][i] += rec.counts[i];
    shots[k] += rec.shots;
  }
  std::vector<std::string> missing;
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (shots[k] <= 0.0) missing.push_back(describe(grid[k]));
  if (!missing.empty()) {
    std::ostringstream os;
    os << "reconstruct: " << missing.size() << " of " << grid.size() << " settings missing:";
    for (const auto& m : missing) os << ' ' << m;
    throw ArgumentError(os.str());
  }

  const Design& d = design();
  if (d.qr.rank() != d.matrix.cols())
    throw ReconstructionError("reconstruct: design matrix is rank deficient (rank " + std::to_string(d.qr.rank()) + ")");
  Eigen::VectorXd f(static_cast<Eigen::Index>(grid.size() * 4));
  for (std::size_t k = 0; k < grid.size(); ++k)
    for (std::size_t i = 0; i < 4; ++i) f(static_cast<Eigen::Index>(k * 4 + i)) = counts[k][i] / shots[k];
  const Eigen::VectorXd r = d.qr.solve(f);

  ComplexMatrix tau = choi_from_coefficients(r).hermitian_part();
  tau = project_to_causal_map(std::move(tau));
  return CausalMap::from_choi(std::move(tau));
}

// -- theta fit ---------------------------------------------------------------------------

namespace {

CausalMap theta_family_map(double theta, const ThetaFamily& fam) {
  return family_map({theta, fam.q, fam.p, fam.axes});
}

FitResult fit_scalar(const std::function<double(double)>& sse, std::size_t n_data) {
  constexpr int kCoarse = 72;
  constexpr double kTol = 1e-6;
  const double pi = std::numbers::pi;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kCoarse; ++i) {
    const double v = sse(pi * i / kCoarse);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = pi * std::max(0, best - 1) / kCoarse;
  const double hi = pi * std::min(kCoarse, best + 1) / kCoarse;
  const ScalarMinimum m = golden_section(sse, lo, hi, kTol);

  FitResult r;
  r.theta_hat = m.x;
  r.residual = m.value;
  const double h = 1e-4;
  const double x0 = std::clamp(m.x, h, pi - h);
  const double curvature = (sse(x0 + h) - 2.0 * sse(x0) + sse(x0 - h)) / (h * h);
  const double s2 = n_data > 1 ? m.value / static_cast<double>(n_data - 1) : 0.0;
  r.covariance_est = curvature > 0.0 ? 2.0 * s2 / curvature : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace

FitResult fit_theta(const std::vector<CountRecord>& records, const ThetaFamily& family) {
  if (records.empty()) throw ArgumentError("fit_theta: no records");
  auto sse = [&](double theta) {
    const CausalMap m = theta_family_map(theta, family);
    double s = 0.0;
    for (const auto& rec : records) {
      const auto pred = outcome_probabilities(m, rec.setting);
      const auto obs = rec.frequencies();
      for (std::size_t i = 0; i < 4; ++i) s += (obs[i] - pred[i]) * (obs[i] - pred[i]);
    }
    return s;
  };
  return fit_scalar(sse, records.size() * 4);
}

FitResult fit_theta(const CausalMap& map, const ThetaFamily& family) {
  auto sse = [&](double theta) {
    const double d = (theta_family_map(theta, family).choi() - map.choi()).frobenius_norm();
    return d * d;
  };
  return fit_scalar(sse, 64);
}

// -- prediction --------------------------------------------------------------------------

namespace {

Imperfections decode(const std::vector<double>& u) {
  auto sq = [](double x) { return std::sin(x) * std::sin(x); };
  return {u[0], sq(u[1]), sq(u[2]), sq(u[3])};
}

FragmentSpec imperfect_fragment(const Imperfections& imp, double visibility, double p, const DephasingAxes& axes) {
  FragmentSpec spec = family_fragment({imp.theta, std::clamp(visibility, 0.0, 1.0), p, axes});
  spec.initial_state = (1.0 - imp.state_noise) * phi_plus() + complex(imp.state_noise / 4.0) * ComplexMatrix::identity(4);
  return spec;
}

CausalMap with_map_noise(const CausalMap& m, double noise) {
  if (noise == 0.0) return m;
  ComplexMatrix tau = (1.0 - noise) * m.choi() + complex(noise / 8.0) * ComplexMatrix::identity(8);
  return CausalMap::from_choi(std::move(tau), m.provenance());
}

constexpr double kPredictionWarnResidual = 1e-3;

}  // namespace

CausalMap build_with_imperfections(const Imperfections& imp, const MapTransform& transform) {
  FragmentSpec spec = std::visit(
      [&](const auto& t) -> FragmentSpec {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, DelayTransform>) {
          return imperfect_fragment(imp, imp.visibility * t.q, 0.0, DephasingAxes::xyz());
        } else if constexpr (std::is_same_v<T, DephasingTransform>) {
          return imperfect_fragment(imp, imp.visibility, t.p, DephasingAxes::xyz());
        } else {
          return imperfect_fragment(imp, imp.visibility, 1.0, eta_axes(t.eta));
        }
      },
      transform);
  return with_map_noise(build_causal_map(spec), imp.map_noise);
}

Imperfections fit_imperfections(const CausalMap& base, double* residual) {
  const double theta0 = fit_theta(base, ThetaFamily{}).theta_hat;
  auto objective = [&](const std::vector<double>& u) {
    const Imperfections imp = decode(u);
    return (build_with_imperfections(imp, DelayTransform{1.0}).choi() - base.choi()).frobenius_norm();
  };
  std::vector<double> start{theta0, std::numbers::pi / 2.0, 0.0, 0.0};
  MinimizeResult r = nelder_mead(objective, start, 0.1, 2000, 1e-10);
  // A restart shakes the simplex loose from a collapsed face.
  r = nelder_mead(objective, r.x, 0.02, 2000, 1e-10);
  if (residual) *residual = r.value;
  Imperfections imp = decode(r.x);
  imp.theta = std::remainder(imp.theta, 2.0 * std::numbers::pi);
  return imp;
}

Prediction predict_from_base(const CausalMap& base, const MapTransform& transform) {
  double residual = 0.0;
  const Imperfections imp = fit_imperfections(base, &residual);
  Prediction out{build_with_imperfections(imp, transform), imp, residual, std::nullopt};
  if (residual > kPredictionWarnResidual) {
    std::ostringstream os;
    os << "base map is not well described by the imperfection model (Frobenius residual " << residual << ")";
    out.warning = os.str();
  }
  return out;
}

// -- bootstrap -----------------------------------------------------------------------------

namespace {

double std_error(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

bool integral_counts(const std::vector<CountRecord>& records) {
  for (const auto& r : records) {
    if (r.shots != std::floor(r.shots)) return false;
    for (double c : r.counts)
      if (c != std::floor(c)) return false;
  }
  return true;
}

}  // namespace

BootstrapReport bootstrap_classify(const std::vector<CountRecord>& records, const BootstrapOptions& opts) {
  CausalMap point = reconstruct(records);
  WitnessReport report = evaluate_witnesses(point, opts.search);

  WitnessErrors err;
  if (opts.resamples > 1 && integral_counts(records)) {
    std::vector<double> c_cd, cc, ce, bk;
    std::array<std::vector<double>, 2> bd, cb, cd;
    for (int k = 0; k < opts.resamples; ++k) {
      std::vector<CountRecord> resampled;
      resampled.reserve(records.size());
      for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        const std::uint64_t seed = derive_seed(derive_seed(opts.seed, static_cast<std::uint64_t>(k)), i);
        resampled.push_back({rec.setting, sample_counts(rec.frequencies(), static_cast<std::uint64_t>(rec.shots), seed),
                             rec.shots});
      }
      const WitnessReport w = evaluate_witnesses(reconstruct(resampled), opts.search);
      c_cd.push_back(w.c_cd);
      cc.push_back(w.search_cc.min_negativity);
      ce.push_back(w.search_ce.min_negativity);
      bk.push_back(w.search_berkson.min_negativity);
      for (int s = 0; s < 2; ++s) {
        bd[s].push_back(w.neg_bd[s]);
        cb[s].push_back(w.neg_cb[s]);
        cd[s].push_back(w.neg_cd[s]);
      }
    }
    err.c_cd = std_error(c_cd);
    err.search_cc = std_error(cc);
    err.search_ce = std_error(ce);
    err.search_berkson = std_error(bk);
    for (int s = 0; s < 2; ++s) {
      err.neg_bd[s] = std_error(bd[s]);
      err.neg_cb[s] = std_error(cb[s]);
      err.neg_cd[s] = std_error(cd[s]);
    }
  }

  WitnessThresholds t = WitnessThresholds::uniform(opts.epsilon);
  t.c_cd = std::max(opts.epsilon, opts.z * err.c_cd);
  t.cc = std::max(opts.epsilon, opts.z * err.search_cc);
  t.ce = std::max(opts.epsilon, opts.z * err.search_ce);
  t.berkson = std::max(opts.epsilon, opts.z * err.search_berkson);
  report.epsilon = opts.epsilon;
  assign_class(report, t);
  return {report, err, std::move(point)};
}

// -- CSV -------------------------------------------------------------------------------------

namespace {

std::string format_count(double x) {
  if (x == std::floor(x) && std::abs(x) < 9.0e15) {
    std::ostringstream os;
    os << static_cast<long long>(x);
    return os.str();
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_number(std::string_view s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ArgumentError("counts CSV line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

constexpr std::string_view kCsvHeader = "setting_c,setting_d,setting_b,c,b,count,shots";

}  // namespace

std::string counts_to_csv(const std::vector<CountRecord>& records) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    for (std::size_t i = 0; i < 4; ++i) {
      const auto [c, b] = kOutcomeCells[i];
      os << to_string(r.setting.c_basis) << ',' << to_string(r.setting.d_prep) << ',' << to_string(r.setting.b_basis)
         << ',' << c << ',' << b << ',' << format_count(r.counts[i]) << ',' << format_count(r.shots) << '\n';
    }
  }
  return os.str();
}

std::vector<CountRecord> counts_from_csv(std::string_view text) {
  std::vector<CountRecord> records;
  std::map<std::size_t, std::size_t> slot;  // grid index -> position in records
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kCsvHeader) throw ArgumentError("counts CSV: expected header '" + std::string(kCsvHeader) + "'");
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 7) throw ArgumentError("counts CSV line " + std::to_string(line_no) + ": expected 7 fields");
    TomographySetting s{pauli_axis_from_string(f[0]), pauli_state_from_string(f[1]), pauli_axis_from_string(f[2])};
    const int c = static_cast<int>(parse_number(f[3], line_no));
    const int b = static_cast<int>(parse_number(f[4], line_no));
    const double count = parse_number(f[5], line_no);
    const double shots = parse_number(f[6], line_no);
    if ((c != 1 && c != -1) || (b != 1 && b != -1))
      throw ArgumentError("counts CSV line " + std::to_string(line_no) + ": outcomes must be 1 or -1");
    if (count < 0.0) throw ArgumentError("counts CSV line " + std::to_string(line_no) + ": negative count");

    const std::size_t k = grid_index(s);
    auto it = slot.find(k);
    if (it == slot.end()) {
      it = slot.emplace(k, records.size()).first;
      records.push_back({s, {}, shots});
    }
    CountRecord& rec = records[it->second];
    if (rec.shots != shots)
      throw ArgumentError("counts CSV line " + std::to_string(line_no) + ": inconsistent shots for " + describe(s));
    const std::size_t cell = (c == 1 ? 0 : 2) + (b == 1 ? 0 : 1);
    rec.counts[cell] = count;
  }
  if (!header_seen) throw ArgumentError("counts CSV: empty input");
  for (const auto& r : records) {
    double total = 0.0;
    for (double c : r.counts) total += c;
    if (std::abs(total - r.shots) > 1e-9 * std::max(1.0, r.shots))
      throw ArgumentError("counts CSV: counts for " + describe(r.setting) + " do not sum to shots");
  }
  return records;
}

}  // namespace qcausal
