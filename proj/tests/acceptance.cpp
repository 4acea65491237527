// Acceptance run: one PASS/FAIL line per criterion. Usage: acceptance <path-to-cli> <scratch-dir>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "golden.hpp"
#include "oracle.hpp"
#include "qcausal/sweep.hpp"
#include "qcausal/tomography.hpp"
#include "qcausal/witnesses.hpp"

using namespace qcausal;
namespace fs = std::filesystem;
constexpr double pi = std::numbers::pi;
constexpr double eps = 1e-7;

namespace {

// Collects failed checks for one criterion.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream os;
      os.precision(12);
      os << what << ": got " << got << ", want " << want << " +- " << tol;
      failures.push_back(os.str());
    }
  }
};

std::vector<SweepRow> sweep(SweepFamily family, std::map<std::string, GridSpec> grid = {}) {
  SweepConfig c = SweepConfig::defaults(family);
  for (auto& [k, g] : grid) c.grid[k] = g;
  return run_sweep(c);
}

void criterion1(Check& c) {
  const std::pair<FamilyParams, CausalClass> cases[] = {
      {{pi / 2, 1.0, 0.0, {}}, CausalClass::Coh},
      {{pi / 2, 0.0, 0.0, {}}, CausalClass::ProbQ},
      {{pi / 2, 1.0, 1.0, DephasingAxes::xyz()}, CausalClass::PhysC},
      {{pi / 2, 1.0, 1.0, DephasingAxes::zzz()}, CausalClass::ProbC},
  };
  for (const auto& [fp, want] : cases) {
    const auto got = classify(family_map(fp), eps).class_label;
    c.expect(got == want, "expected " + to_string(want) + ", got " + to_string(got));
  }
  // The same ProbC map after a trip through the JSON format.
  const auto probc = causal_map_from_json(causal_map_to_json(family_map(cases[3].first)));
  c.expect(classify(probc, eps).class_label == CausalClass::ProbC, "ProbC lost through JSON round trip");
}

void criterion2(Check& c) {
  const ComplexMatrix half_id = 0.5 * ComplexMatrix::identity(2);
  const CausalMap id = family_map({0.0, 1.0, 0.0, {}}), sw = family_map({pi, 1.0, 0.0, {}});
  c.expect(max_abs_diff(id.choi(), kron(half_id, phi_plus())) < 1e-10, "theta=0 Choi state");
  c.expect(max_abs_diff(sw.choi(), kron(phi_plus(), half_id)) < 1e-10, "theta=pi Choi state");
  const auto r0 = classify(id, eps), rpi = classify(sw, eps);
  for (int k = 0; k < 2; ++k) {
    c.near(r0.neg_bd[k], 0.5, 1e-12, "theta=0 N_BD");
    c.near(r0.neg_cb[k], 0.0, 1e-12, "theta=0 N_CB");
    c.near(rpi.neg_bd[k], 0.0, 1e-12, "theta=pi N_BD");
    c.near(rpi.neg_cb[k], 0.5, 1e-12, "theta=pi N_CB");
  }
}

double min_pair(const std::array<double, 2>& a) { return std::min(a[0], a[1]); }

void criterion3(Check& c) {
  const auto rows = sweep(SweepFamily::delay);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i].report;
    c.expect(min_pair(r.neg_bd) > eps && min_pair(r.neg_cb) > eps, "pathway negativity vanished at q=" + format_number(rows[i].q));
    if (i > 0) {
      const auto& prev = rows[i - 1].report;
      c.expect(r.c_cd > prev.c_cd, "C_CD not increasing in q at q=" + format_number(rows[i].q));
      c.expect(min_pair(r.neg_cd) > min_pair(prev.neg_cd), "N_CD not increasing in q at q=" + format_number(rows[i].q));
    }
  }
  c.near(rows.front().report.c_cd, 0.0, 1e-12, "C_CD at q=0");
  c.near(min_pair(rows.front().report.neg_cd), 0.0, 1e-12, "N_CD at q=0");

  // The window sits below q* ~ 9e-4, finer than the default grid spacing.
  const auto fine = sweep(SweepFamily::delay, {{"q", {0.0, 2e-3, 41}}});
  int window = 0;
  for (const auto& row : fine) {
    if (std::max(row.report.neg_cd[0], row.report.neg_cd[1]) < eps && row.report.c_cd > 10 * eps) {
      ++window;
      c.expect(row.report.class_label == CausalClass::PhysQ, "window point not PhysQ at q=" + format_number(row.q));
    }
  }
  c.expect(window > 0, "no grid point with N_CD < eps and C_CD > 10 eps");

  // Crossing located by bisection on the library agrees with the oracle value.
  double lo = 1e-5, hi = 1e-2;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (min_pair(classify(family_map({pi / 2, mid, 0.0, {}}), eps, {20, 10, 1e-6}).neg_cd) > eps ? hi : lo) = mid;
  }
  c.near(0.5 * (lo + hi), golden::kQStar, 1e-9, "q* crossing");
  const auto oracle_tau = oracle::choi_state(family_fragment({pi / 2, golden::kQStar, 0.0, {}}));
  c.near(oracle::negativity(oracle::condition(oracle_tau, 1, oracle::projector(0, 0, 1, 1)).state, 1), eps, 1e-12,
         "oracle N_CD at q*");
}

void criterion4(Check& c) {
  const auto rows = sweep(SweepFamily::theta_p);
  const int np = SweepConfig::defaults(SweepFamily::theta_p).grid.at("p").steps;
  std::size_t arg_bd = 0, arg_cb = 0, arg_cd = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i].report;
    const std::size_t base = i - i % np;  // p = 0 row for this theta
    c.near(r.c_cd, rows[base].report.c_cd, 1e-9, "C_CD depends on p at theta=" + format_number(rows[i].theta));
    c.near(r.neg_bd[0], r.neg_bd[1], 1e-9, "N_BD outcomes differ");
    c.near(r.neg_cb[0], r.neg_cb[1], 1e-9, "N_CB outcomes differ");
    c.near(r.neg_cd[0], r.neg_cd[1], 1e-9, "N_CD outcomes differ");
    if (i % np == 0) {
      if (r.neg_bd[0] > rows[arg_bd].report.neg_bd[0]) arg_bd = i;
      if (r.neg_cb[0] > rows[arg_cb].report.neg_cb[0]) arg_cb = i;
      if (r.neg_cd[0] > rows[arg_cd].report.neg_cd[0]) arg_cd = i;
    }
  }
  c.near(rows[arg_bd].theta, 0.0, 1e-12, "argmax N_BD");
  c.near(rows[arg_cb].theta, pi, 1e-12, "argmax N_CB");
  c.near(rows[arg_cd].theta, pi / 2, 1e-12, "argmax N_CD");
  c.near(rows[12 * np].report.c_cd, golden::kCcdMax, 1e-12, "C_CD at theta=pi/2");
  c.near(oracle::c_cd(oracle::choi_state(family_fragment({}))), golden::kCcdMax, 1e-12, "oracle C_CD at theta=pi/2");
  c.near(rows[12 * np].report.neg_cd[0], golden::kNcdCoh, 1e-12, "N_CD at theta=pi/2");
}

void criterion5(Check& c) {
  const auto rows = sweep(SweepFamily::eta);
  c.near(rows.back().report.c_cd, 0.0, 1e-9, "C_CD at eta=pi/4");
  c.near(rows.front().report.c_cd, golden::kCcdEtaZero, 1e-9, "C_CD at eta=0");
  c.near(oracle::c_cd(oracle::choi_state(family_fragment({pi / 2, 1.0, 1.0, eta_axes(0.0)}))), golden::kCcdEtaZero,
         1e-12, "oracle C_CD at eta=0");
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    c.expect(rows[i].report.c_cd > eps, "C_CD vanished at eta=" + format_number(*rows[i].eta));
  c.expect(rows.front().report.class_label == CausalClass::PhysC, "eta=0 not PhysC");
  c.expect(rows.back().report.class_label == CausalClass::ProbC, "eta=pi/4 not ProbC");
}

void criterion6(Check& c) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const FragmentSpec spec = oracle::random_fragment(rng);
    const CausalMap m = build_causal_map(spec);
    const oracle::Mat tau = oracle::choi_state(spec);
    const std::string tag = " (spec " + std::to_string(trial) + ")";
    c.expect((oracle::to_eigen(m.choi()) - tau).norm() < 1e-8, "Choi state" + tag);
    const WitnessReport r = classify(m, eps, {100, 80, 1e-8});
    c.near(r.c_cd, oracle::c_cd(tau), 1e-8, "C_CD" + tag);
    for (int k = 0; k < 2; ++k) {
      const int s = k == 0 ? +1 : -1;
      c.near(r.neg_bd[k], oracle::negativity(oracle::condition(tau, 0, oracle::projector(1, 0, 0, s)).state, 1), 1e-8,
             "N_BD" + tag);
      c.near(r.neg_cd[k], oracle::negativity(oracle::condition(tau, 1, oracle::projector(0, 0, 1, s)).state, 1), 1e-8,
             "N_CD" + tag);
      c.near(r.neg_cb[k], oracle::negativity(oracle::prepared(tau, oracle::projector(0, 1, 0, s)), 1), 1e-8,
             "N_CB" + tag);
    }
    c.near(r.cc_marginal_negativity, oracle::negativity(oracle::trace_out(tau, 2, 3), 1), 1e-8, "Tr_D marginal" + tag);
    c.near(r.ce_marginal_negativity, oracle::negativity(oracle::trace_out(tau, 0, 3), 1), 1e-8, "Tr_C marginal" + tag);
    // Search optima re-evaluated by the oracle at the reported bases.
    auto at = [&](const BlochVector& n, const std::function<oracle::Mat(const oracle::Mat&)>& state) {
      return std::min(oracle::negativity(state(oracle::projector(n.x, n.y, n.z, +1)), 1),
                      oracle::negativity(state(oracle::projector(n.x, n.y, n.z, -1)), 1));
    };
    c.near(r.search_cc.min_negativity, at(r.search_cc.basis, [&](const oracle::Mat& p) { return oracle::prepared(tau, p); }),
           1e-8, "cc search" + tag);
    c.near(r.search_ce.min_negativity,
           at(r.search_ce.basis, [&](const oracle::Mat& p) { return oracle::condition(tau, 0, p).state; }), 1e-8,
           "ce search" + tag);
    c.near(r.search_berkson.min_negativity,
           at(r.search_berkson.basis, [&](const oracle::Mat& p) { return oracle::condition(tau, 1, p).state; }), 1e-8,
           "Berkson search" + tag);
  }
}

void criterion7(Check& c) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const FamilyParams fp{pi * u(rng), u(rng), u(rng), trial % 2 ? DephasingAxes::xyz() : eta_axes(pi / 4 * u(rng))};
    const CausalMap m = family_map(fp);
    c.expect((reconstruct(pseudo_counts(m, 1.0)).choi() - m.choi()).frobenius_norm() < 1e-9, "noiseless reconstruction");
  }
  std::vector<double> errors;
  int theta_hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const double theta = 0.1 + (pi - 0.2) * u(rng);
    const CausalMap m = family_map({theta, 1.0, 0.0, {}});
    const auto records = simulate_counts(m, 100000, seed);
    errors.push_back((reconstruct(records).choi() - m.choi()).frobenius_norm());
    if (std::abs(fit_theta(records, ThetaFamily{}).theta_hat - theta) < pi / 180) ++theta_hits;
  }
  std::sort(errors.begin(), errors.end());
  const double median = 0.5 * (errors[9] + errors[10]);
  c.expect(median < 0.02, "median Frobenius error " + format_number(median));
  c.expect(theta_hits >= 19, "theta within 1 degree for " + std::to_string(theta_hits) + "/20 seeds");
}

void criterion8(Check& c) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 1000; ++trial) {
    const int dim = 1 + trial % 16;
    const oracle::Mat h = oracle::random_hermitian(rng, dim);
    const auto got = hermitian_eigenvalues(oracle::from_eigen(h));
    const auto want = oracle::eigenvalues(h);
    for (int k = 0; k < dim; ++k) c.near(got[k], want[k], 1e-8, "eigenvalue vs Sturm oracle, dim " + std::to_string(dim));
    if (dim <= 6) {
      auto roots = oracle::poly_roots(oracle::char_poly(h));
      std::vector<double> re;
      for (const auto& z : roots) re.push_back(z.real());
      std::sort(re.begin(), re.end());
      for (int k = 0; k < dim; ++k) c.near(got[k], re[k], 1e-8, "eigenvalue vs characteristic polynomial, dim " + std::to_string(dim));
    }
  }
  const SubsystemLayout two{"A", "B"};
  c.near(negativity(phi_plus(), two, "B"), 0.5, 1e-12, "negativity of Phi+");
  auto werner = [](double w) { return w * phi_plus() + (1 - w) * 0.25 * ComplexMatrix::identity(4); };
  c.expect(negativity(werner(1.0 / 3.0), two, "B") == 0.0, "Werner w=1/3 separable");
  c.expect(negativity(werner(1.0 / 3.0 - 1e-9), two, "B") == 0.0, "Werner just below 1/3 separable");
  c.expect(negativity(werner(1.0 / 3.0 + 1e-9), two, "B") > 0.0, "Werner just above 1/3 entangled");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void criterion9(Check& c, const std::string& cli, const fs::path& scratch) {
  if (cli.empty()) {
    c.expect(false, "CLI path not given");
    return;
  }
  fs::remove_all(scratch);
  fs::create_directories(scratch);
  std::ofstream(scratch / "sweep.cfg") << "family=theta_p\nsteps=4x3\nformat=json\n";
  const std::vector<std::pair<std::string, std::vector<std::string>>> commands = {
      {"sweep --family delay --steps 6 --out {}/out.csv", {"out.csv"}},
      {"sweep --config {}/../sweep.cfg --out {}/out.json", {"out.json"}},
      {"sweep --family eta --steps 3 --shots 2000 --seed 5 --resamples 5 --out {}/shots.csv", {"shots.csv"}},
      {"classify --theta 1.1 --p 0.2 --q 0.6 --out {}/report.json", {"report.json"}},
      {"dump-map --theta 0.3 --eta 0.4 --p 0.5 --out {}/map.json", {"map.json"}},
      {"tomo --theta 1.5708 --shots 20000 --seed 1 --resamples 10 --out {}/tomo", {"tomo/counts.csv", "tomo/map.json", "tomo/report.json"}},
      {"tomo --theta 0.9 --out {}/pseudo", {"pseudo/counts.csv", "pseudo/map.json", "pseudo/report.json"}},
  };
  for (const auto& [args, outputs] : commands) {
    std::string runs[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path dir = scratch / ("run" + std::to_string(run));
      fs::create_directories(dir);
      std::string a = args;
      for (std::size_t pos; (pos = a.find("{}")) != std::string::npos;) a.replace(pos, 2, dir.string());
      const std::string cmd = "\"" + cli + "\" " + a;
      if (std::system(cmd.c_str()) != 0) {
        c.expect(false, "command failed: " + cmd);
        return;
      }
      for (const auto& o : outputs) runs[run] += slurp(dir / o) + '\x1e';
    }
    c.expect(!runs[0].empty() && runs[0] == runs[1], "outputs differ between runs: " + args);
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const fs::path scratch = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "qcausal_acceptance";

  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"paradigm classification", criterion1},
      {"pure-relation endpoints", criterion2},
      {"delay sweep structure", criterion3},
      {"theta-p sweep structure", criterion4},
      {"eta sweep structure", criterion5},
      {"oracle equivalence on 50 random fragments", criterion6},
      {"tomography round trip", criterion7},
      {"numerical foundations", criterion8},
      {"CLI determinism", [&](Check& c) { criterion9(c, cli, scratch); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    try {
      criteria[i].second(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = check.failures.empty();
    failed += !ok;
    std::printf("[%s] %zu. %s\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str());
    for (std::size_t k = 0; k < std::min<std::size_t>(check.failures.size(), 5); ++k)
      std::printf("       %s\n", check.failures[k].c_str());
    if (check.failures.size() > 5) std::printf("       ... %zu more\n", check.failures.size() - 5);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
