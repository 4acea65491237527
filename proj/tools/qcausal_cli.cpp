// qcausal command-line front end: sweep, classify, tomo, dump-map.

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "qcausal/causal_model.hpp"
#include "qcausal/sweep.hpp"
#include "qcausal/tomography.hpp"
#include "qcausal/witnesses.hpp"

namespace fs = std::filesystem;
using namespace qcausal;

namespace {

enum ExitCode { kOk = 0, kIoError = 1, kConfigError = 2, kContractError = 3 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write " + path.string());
}

// Flags are collected as strings and layered over the optional config file.
struct Options {
  std::string config;
  std::map<std::string, std::string> flags;

  void add(CLI::App* app, const std::string& name, const std::string& help) {
    app->add_option_function<std::string>(
        "--" + name, [this, name](const std::string& v) { flags[name] = v; }, help);
  }

  std::map<std::string, std::string> merged() const {
    std::map<std::string, std::string> out;
    if (!config.empty()) out = parse_key_value(read_file(config));
    for (const auto& [k, v] : flags) out[k] = v;
    // Accept both spellings; the file format uses underscores.
    if (auto it = out.find("tau-coh"); it != out.end()) {
      out["tau_coh"] = it->second;
      out.erase(it);
    }
    return out;
  }
};

double number(const std::map<std::string, std::string>& o, const std::string& key, double fallback) {
  const auto it = o.find(key);
  if (it == o.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used == it->second.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + it->second + "'");
}

std::uint64_t integer(const std::map<std::string, std::string>& o, const std::string& key) {
  const std::string& v = o.at(key);
  try {
    std::size_t used = 0;
    if (!v.empty() && v.front() != '-') {
      const auto u = std::stoull(v, &used);
      if (used == v.size()) return u;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'");
}

void reject_unknown(const std::map<std::string, std::string>& o, std::initializer_list<std::string_view> known) {
  for (const auto& [k, v] : o) {
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError(k + ": unknown option");
  }
}

FamilyParams family_params(const std::map<std::string, std::string>& o) {
  FamilyParams fp;
  fp.theta = number(o, "theta", fp.theta);
  fp.p = number(o, "p", fp.p);
  fp.q = number(o, "q", fp.q);
  if (o.contains("tau")) {
    if (o.contains("q")) throw ConfigError("tau: give either q or tau, not both");
    if (!o.contains("tau_coh")) throw ConfigError("tau: requires tau_coh");
    const double tau_coh = number(o, "tau_coh", 1.0);
    if (!(tau_coh > 0.0)) throw ConfigError("tau_coh: must be positive");
    fp.q = q_from_delay(number(o, "tau", 0.0), tau_coh);
  }
  const auto axes = o.find("axes");
  if (o.contains("eta") && axes != o.end()) throw ConfigError("eta: give either eta or axes, not both");
  if (o.contains("eta")) {
    const double eta = number(o, "eta", 0.0);
    if (!(eta >= 0.0 && eta <= 0.7853981633974484)) throw ConfigError("eta: outside [0, pi/4]");
    fp.axes = eta_axes(eta);
  } else if (axes != o.end()) {
    if (axes->second == "xyz") fp.axes = DephasingAxes::xyz();
    else if (axes->second == "zzz") fp.axes = DephasingAxes::zzz();
    else throw ConfigError("axes: expected xyz or zzz, got '" + axes->second + "'");
  }
  if (!(fp.theta >= 0.0 && fp.theta <= 3.141592653589794)) throw ConfigError("theta: outside [0, pi]");
  if (!(fp.p >= 0.0 && fp.p <= 1.0)) throw ConfigError("p: outside [0, 1]");
  if (!(fp.q >= 0.0 && fp.q <= 1.0)) throw ConfigError("q: outside [0, 1]");
  return fp;
}

constexpr std::array<std::string_view, 7> kParamKeys = {"theta", "p", "q", "tau", "tau_coh", "eta", "axes"};

CausalMap map_from_options(const std::map<std::string, std::string>& o) {
  if (const auto it = o.find("map"); it != o.end()) {
    for (std::string_view k : kParamKeys) {
      if (o.contains(std::string(k))) throw ConfigError(std::string(k) + ": cannot be combined with map");
    }
    return causal_map_from_json(read_file(it->second));
  }
  return family_map(family_params(o));
}

double epsilon_of(const std::map<std::string, std::string>& o) {
  const double eps = number(o, "epsilon", kDefaultEpsilon);
  if (!(eps > 0.0)) throw ConfigError("epsilon: must be positive");
  return eps;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") std::cout << text;
  else write_file(out, text);
}

void add_param_flags(Options& opts, CLI::App* app) {
  opts.add(app, "theta", "Partial-swap angle in [0, pi]");
  opts.add(app, "p", "Dephasing probability");
  opts.add(app, "q", "Two-photon overlap factor");
  opts.add(app, "tau", "Delay, converted to q with --tau-coh");
  opts.add(app, "tau-coh", "Coherence time");
  opts.add(app, "eta", "Dephasing-axis interpolation in [0, pi/4]");
  opts.add(app, "axes", "Dephasing axes: xyz or zzz");
  opts.add(app, "epsilon", "Zero threshold for witnesses");
  app->add_option("--config", opts.config, "key=value file; flags override its entries");
}

// -- subcommands ------------------------------------------------------------------

int cmd_sweep(const Options& opts) {
  const auto o = opts.merged();
  const SweepConfig config = sweep_config_from_options(o);
  const auto rows = run_sweep(config);
  emit(config.output, config.format == OutputFormat::json ? sweep_to_json(rows) : sweep_to_csv(rows));
  return kOk;
}

int cmd_classify(const Options& opts) {
  const auto o = opts.merged();
  reject_unknown(o, {"theta", "p", "q", "tau", "tau_coh", "eta", "axes", "epsilon", "map", "out"});
  const CausalMap map = map_from_options(o);
  emit(o.contains("out") ? o.at("out") : "", witness_report_to_json(classify(map, epsilon_of(o)), 2) + "\n");
  return kOk;
}

int cmd_dump_map(const Options& opts) {
  const auto o = opts.merged();
  reject_unknown(o, {"theta", "p", "q", "tau", "tau_coh", "eta", "axes", "map", "out"});
  emit(o.contains("out") ? o.at("out") : "", causal_map_to_json(map_from_options(o)) + "\n");
  return kOk;
}

int cmd_tomo(const Options& opts) {
  const auto o = opts.merged();
  reject_unknown(o, {"theta", "p", "q", "tau", "tau_coh", "eta", "axes", "epsilon", "shots", "seed", "resamples",
                     "out"});
  if (!o.contains("out")) throw ConfigError("out: tomo needs an output directory");
  const FamilyParams fp = family_params(o);
  const CausalMap truth = family_map(fp);
  const double eps = epsilon_of(o);

  std::vector<CountRecord> records;
  nlohmann::ordered_json report;
  CausalMap reconstructed = truth;
  if (o.contains("shots")) {
    const std::uint64_t shots = integer(o, "shots");
    if (shots == 0) throw ConfigError("shots: must be positive");
    const std::uint64_t seed = o.contains("seed") ? integer(o, "seed") : 0;
    records = simulate_counts(truth, shots, seed);
    BootstrapOptions bo;
    bo.seed = seed;
    bo.epsilon = eps;
    if (o.contains("resamples")) bo.resamples = static_cast<int>(integer(o, "resamples"));
    const BootstrapReport br = bootstrap_classify(records, bo);
    reconstructed = br.map;
    report = nlohmann::ordered_json::parse(witness_report_to_json(br.report));
    const WitnessErrors& e = br.errors;
    report["standard_errors"] = {{"c_cd", e.c_cd},
                                 {"neg_bd_plus", e.neg_bd[0]},
                                 {"neg_bd_minus", e.neg_bd[1]},
                                 {"neg_cb_plus", e.neg_cb[0]},
                                 {"neg_cb_minus", e.neg_cb[1]},
                                 {"neg_cd_plus", e.neg_cd[0]},
                                 {"neg_cd_minus", e.neg_cd[1]},
                                 {"search_cc", e.search_cc},
                                 {"search_ce", e.search_ce},
                                 {"search_berkson", e.search_berkson}};
    report["resamples"] = bo.resamples;
  } else {
    records = pseudo_counts(truth, 1.0);
    reconstructed = reconstruct(records);
    report = nlohmann::ordered_json::parse(witness_report_to_json(classify(reconstructed, eps)));
  }
  const FitResult fit = fit_theta(records, ThetaFamily{fp.q, fp.p, fp.axes});
  report["theta_fit"] = {{"theta_hat", fit.theta_hat}, {"residual", fit.residual}, {"variance", fit.covariance_est}};
  report["frobenius_error"] = (reconstructed.choi() - truth.choi()).frobenius_norm();

  const fs::path dir = o.at("out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "counts.csv", counts_to_csv(records));
  write_file(dir / "map.json", causal_map_to_json(reconstructed) + "\n");
  write_file(dir / "report.json", report.dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum causal map witnesses, sweeps and simulated tomography"};
  app.require_subcommand(1);

  Options sweep_opts, classify_opts, tomo_opts, dump_opts;

  auto* sweep = app.add_subcommand("sweep", "Run a transition sweep and write CSV or JSON");
  sweep_opts.add(sweep, "family", "delay, theta_p or eta");
  sweep_opts.add(sweep, "theta", "Fixed partial-swap angle");
  sweep_opts.add(sweep, "p", "Fixed dephasing probability");
  sweep_opts.add(sweep, "q", "Fixed overlap factor");
  sweep_opts.add(sweep, "tau", "Largest delay of the delay sweep (needs --tau-coh)");
  sweep_opts.add(sweep, "tau-coh", "Coherence time; the delay sweep then runs over tau");
  sweep_opts.add(sweep, "steps", "Grid points: N, or NxM for theta_p");
  sweep_opts.add(sweep, "epsilon", "Zero threshold for witnesses");
  sweep_opts.add(sweep, "shots", "Shots per setting; omit for exact theory");
  sweep_opts.add(sweep, "seed", "Base seed for simulated tomography");
  sweep_opts.add(sweep, "resamples", "Bootstrap resamples per grid point");
  sweep_opts.add(sweep, "threads", "Worker threads (0: all cores)");
  sweep_opts.add(sweep, "out", "Output file (default stdout)");
  sweep_opts.add(sweep, "format", "csv or json");
  sweep->add_option_function<std::vector<std::string>>(
      "--grid",
      [&](const std::vector<std::string>& specs) {
        for (const auto& s : specs) {
          const auto eq = s.find('=');
          if (eq == std::string::npos) throw CLI::ValidationError("--grid", "expected name=start:stop:steps");
          sweep_opts.flags["grid." + s.substr(0, eq)] = s.substr(eq + 1);
        }
      },
      "Override a swept range: name=start:stop:steps");
  sweep->add_option("--config", sweep_opts.config, "key=value file; flags override its entries");

  auto* classify_cmd = app.add_subcommand("classify", "Print the witness report of one map as JSON");
  add_param_flags(classify_opts, classify_cmd);
  classify_opts.add(classify_cmd, "map", "Map JSON file instead of parameters");
  classify_opts.add(classify_cmd, "out", "Output file (default stdout)");

  auto* tomo = app.add_subcommand("tomo", "Simulated tomography: counts.csv, map.json, report.json");
  add_param_flags(tomo_opts, tomo);
  tomo_opts.add(tomo, "shots", "Shots per setting; omit for exact pseudo-counts");
  tomo_opts.add(tomo, "seed", "Sampling and bootstrap seed");
  tomo_opts.add(tomo, "resamples", "Bootstrap resamples");
  tomo_opts.add(tomo, "out", "Output directory");

  auto* dump = app.add_subcommand("dump-map", "Write a family map as JSON");
  add_param_flags(dump_opts, dump);
  dump_opts.add(dump, "map", "Map JSON file to normalize");
  dump_opts.add(dump, "out", "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*sweep) return cmd_sweep(sweep_opts);
    if (*classify_cmd) return cmd_classify(classify_opts);
    if (*tomo) return cmd_tomo(tomo_opts);
    if (*dump) return cmd_dump_map(dump_opts);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ContractViolation& e) {
    std::cerr << "numerical contract violation: " << e.what() << '\n';
    return kContractError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kOk;
}
