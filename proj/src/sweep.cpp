#include "qcausal/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "qcausal/tomography.hpp"

namespace qcausal {

std::string to_string(SweepFamily f) {
  switch (f) {
    case SweepFamily::delay: return "delay";
    case SweepFamily::theta_p: return "theta_p";
    case SweepFamily::eta: return "eta";
  }
  return "delay";
}

SweepFamily sweep_family_from_string(std::string_view s) {
  if (s == "delay") return SweepFamily::delay;
  if (s == "theta_p") return SweepFamily::theta_p;
  if (s == "eta") return SweepFamily::eta;
  throw ConfigError("family: expected delay, theta_p or eta, got '" + std::string(s) + "'");
}

std::vector<double> GridSpec::values() const {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(std::max(steps, 0)));
  for (int i = 0; i < steps; ++i) {
    // Endpoints are hit exactly.
    v.push_back(i == steps - 1 ? stop : start + (stop - start) * i / (steps - 1));
  }
  return v;
}

SweepConfig SweepConfig::defaults(SweepFamily family) {
  SweepConfig c;
  c.family = family;
  const double pi = std::numbers::pi;
  switch (family) {
    case SweepFamily::delay:
      c.grid["q"] = {0.0, 1.0, 41};
      break;
    case SweepFamily::theta_p:
      c.grid["theta"] = {0.0, pi, 25};
      c.grid["p"] = {0.0, 0.3, 16};
      break;
    case SweepFamily::eta:
      c.grid["eta"] = {0.0, pi / 4.0, 21};
      c.p = 1.0;
      break;
  }
  return c;
}

namespace {

void check_range(const std::string& field, double v, double lo, double hi) {
  // Grid endpoints computed from pi may overshoot by an ulp.
  const double slack = 1e-12 * std::max(1.0, std::abs(hi));
  if (!(v >= lo - slack && v <= hi + slack)) {
    std::ostringstream os;
    os << field << ": value " << v << " outside [" << lo << ", " << hi << "]";
    throw ConfigError(os.str());
  }
}

std::vector<std::string> expected_grid_keys(const SweepConfig& c) {
  switch (c.family) {
    case SweepFamily::delay: return {c.tau_coh ? "tau" : "q"};
    case SweepFamily::theta_p: return {"theta", "p"};
    case SweepFamily::eta: return {"eta"};
  }
  return {};
}

}  // namespace

void SweepConfig::validate() const {
  const double pi = std::numbers::pi;
  const auto keys = expected_grid_keys(*this);
  for (const auto& [name, g] : grid) {
    if (std::find(keys.begin(), keys.end(), name) == keys.end())
      throw ConfigError("grid." + name + ": not a swept parameter of family " + to_string(family));
  }
  for (const auto& k : keys) {
    const auto it = grid.find(k);
    if (it == grid.end()) throw ConfigError("grid." + k + ": missing for family " + to_string(family));
    const GridSpec& g = it->second;
    if (g.steps < 2) throw ConfigError("grid." + k + ".steps: must be at least 2");
    for (double v : {g.start, g.stop}) {
      const std::string f = "grid." + k;
      if (k == "q" || k == "p") check_range(f, v, 0.0, 1.0);
      if (k == "theta") check_range(f, v, 0.0, pi);
      if (k == "eta") check_range(f, v, 0.0, pi / 4.0);
      if (k == "tau" && !(v >= 0.0 && std::isfinite(v))) throw ConfigError(f + ": delays must be nonnegative");
    }
  }
  check_range("theta", theta, 0.0, pi);
  check_range("p", p, 0.0, 1.0);
  check_range("q", q, 0.0, 1.0);
  if (tau_coh && !(*tau_coh > 0.0)) throw ConfigError("tau_coh: must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon: must be positive");
  if (shots && *shots == 0) throw ConfigError("shots: must be positive");
  if (resamples < 0) throw ConfigError("resamples: must be nonnegative");
  if (threads < 0) throw ConfigError("threads: must be nonnegative");
}

// -- option parsing ---------------------------------------------------------------

std::map<std::string, std::string> parse_key_value(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    out[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

namespace {

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v.front() == '-') throw std::invalid_argument(v);
    const unsigned long long u = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return u;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'");
  }
}

GridSpec to_grid(const std::string& key, const std::string& v) {
  // start:stop:steps
  const auto a = v.find(':');
  const auto b = a == std::string::npos ? std::string::npos : v.find(':', a + 1);
  if (a == std::string::npos || b == std::string::npos)
    throw ConfigError(key + ": expected start:stop:steps, got '" + v + "'");
  return {to_double(key, v.substr(0, a)), to_double(key, v.substr(a + 1, b - a - 1)),
          static_cast<int>(to_uint(key, v.substr(b + 1)))};
}

}  // namespace

SweepConfig sweep_config_from_options(const std::map<std::string, std::string>& options) {
  const auto fam_it = options.find("family");
  SweepConfig c = SweepConfig::defaults(fam_it == options.end() ? SweepFamily::delay
                                                                 : sweep_family_from_string(fam_it->second));
  std::optional<double> tau_stop;
  std::optional<std::string> steps;
  std::map<std::string, GridSpec> explicit_grid;

  for (const auto& [key, value] : options) {
    if (key == "family") continue;
    if (key == "theta") c.theta = to_double(key, value);
    else if (key == "p") c.p = to_double(key, value);
    else if (key == "q") c.q = to_double(key, value);
    else if (key == "tau") tau_stop = to_double(key, value);
    else if (key == "tau_coh" || key == "tau-coh") c.tau_coh = to_double(key, value);
    else if (key == "epsilon") c.epsilon = to_double(key, value);
    else if (key == "shots") c.shots = to_uint(key, value);
    else if (key == "seed") c.seed = to_uint(key, value);
    else if (key == "out") c.output = value;
    else if (key == "format") {
      if (value == "csv") c.format = OutputFormat::csv;
      else if (value == "json") c.format = OutputFormat::json;
      else throw ConfigError("format: expected csv or json, got '" + value + "'");
    } else if (key == "steps") steps = value;
    else if (key == "resamples") c.resamples = static_cast<int>(to_uint(key, value));
    else if (key == "threads") c.threads = static_cast<int>(to_uint(key, value));
    else if (key == "search_points") c.search.grid_points = static_cast<int>(to_uint(key, value));
    else if (key.rfind("grid.", 0) == 0) explicit_grid[key.substr(5)] = to_grid(key, value);
    else throw ConfigError(key + ": unknown option");
  }

  if (c.family == SweepFamily::delay && c.tau_coh) {
    // Sweep the delay itself; default range covers three coherence times.
    c.grid.erase("q");
    c.grid["tau"] = {0.0, tau_stop.value_or(3.0 * *c.tau_coh), 41};
  } else if (tau_stop) {
    throw ConfigError("tau: requires tau_coh and family delay");
  }

  if (steps) {
    std::vector<int> counts;
    std::string rest = *steps;
    for (std::size_t pos; (pos = rest.find('x')) != std::string::npos; rest = rest.substr(pos + 1))
      counts.push_back(static_cast<int>(to_uint("steps", rest.substr(0, pos))));
    counts.push_back(static_cast<int>(to_uint("steps", rest)));
    const auto keys = expected_grid_keys(c);
    if (counts.size() == 1) {
      for (const auto& k : keys) c.grid[k].steps = counts[0];
    } else if (counts.size() == keys.size()) {
      for (std::size_t i = 0; i < keys.size(); ++i) c.grid[keys[i]].steps = counts[i];
    } else {
      throw ConfigError("steps: expected one count or one per swept parameter");
    }
  }
  for (const auto& [k, g] : explicit_grid) c.grid[k] = g;
  c.validate();
  return c;
}

// -- evaluation ----------------------------------------------------------------------

namespace {

struct GridPoint {
  std::string param_name;
  FamilyParams params;
  std::optional<double> eta;
  std::optional<double> tau;
};

std::vector<GridPoint> expand(const SweepConfig& c) {
  std::vector<GridPoint> pts;
  switch (c.family) {
    case SweepFamily::delay: {
      if (c.tau_coh) {
        for (double tau : c.grid.at("tau").values()) {
          GridPoint g{"tau", {c.theta, q_from_delay(tau, *c.tau_coh), c.p, DephasingAxes::xyz()}, std::nullopt, tau};
          pts.push_back(g);
        }
      } else {
        for (double q : c.grid.at("q").values())
          pts.push_back({"q", {c.theta, q, c.p, DephasingAxes::xyz()}, std::nullopt, std::nullopt});
      }
      break;
    }
    case SweepFamily::theta_p:
      for (double theta : c.grid.at("theta").values())
        for (double p : c.grid.at("p").values())
          pts.push_back({"theta_p", {theta, c.q, p, DephasingAxes::xyz()}, std::nullopt, std::nullopt});
      break;
    case SweepFamily::eta:
      for (double eta : c.grid.at("eta").values())
        pts.push_back({"eta", {c.theta, c.q, c.p, eta_axes(eta)}, eta, std::nullopt});
      break;
  }
  return pts;
}

WitnessReport evaluate_point(const SweepConfig& c, const GridPoint& g, std::size_t index) {
  const CausalMap map = family_map(g.params);
  if (!c.shots) return classify(map, c.epsilon, c.search);
  const std::uint64_t seed = c.seed.value_or(0) + index;
  const auto records = simulate_counts(map, *c.shots, seed);
  BootstrapOptions opts;
  opts.resamples = c.resamples;
  opts.seed = seed;
  opts.epsilon = c.epsilon;
  opts.search = c.search;
  return bootstrap_classify(records, opts).report;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  config.validate();
  const auto points = expand(config);
  std::vector<SweepRow> rows(points.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < points.size();) {
      try {
        const GridPoint& g = points[i];
        rows[i] = {g.param_name, g.params.theta, g.params.p, g.params.q, g.eta, g.tau, evaluate_point(config, g, i)};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned n_threads = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
  n_threads = std::clamp<unsigned>(n_threads, 1, static_cast<unsigned>(std::max<std::size_t>(points.size(), 1)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

// -- output ------------------------------------------------------------------------------

std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    const auto& w = r.report;
    os << r.param_name << ',' << format_number(r.theta) << ',' << format_number(r.p) << ',' << format_number(r.q)
       << ',' << (r.eta ? format_number(*r.eta) : "") << ',' << format_number(w.c_cd) << ','
       << format_number(w.neg_bd[0]) << ',' << format_number(w.neg_bd[1]) << ',' << format_number(w.neg_cb[0]) << ','
       << format_number(w.neg_cb[1]) << ',' << format_number(w.neg_cd[0]) << ',' << format_number(w.neg_cd[1]) << ','
       << to_string(w.class_label) << '\n';
  }
  return os.str();
}

std::string sweep_to_json(const std::vector<SweepRow>& rows) {
  // Numbers go through format_number so JSON and CSV agree digit for digit.
  auto num = [](double x) { return nlohmann::json::parse(format_number(x)); };
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    const auto& w = r.report;
    nlohmann::ordered_json j;
    j["param_name"] = r.param_name;
    j["theta"] = num(r.theta);
    j["p"] = num(r.p);
    j["q"] = num(r.q);
    j["eta"] = r.eta ? num(*r.eta) : nlohmann::json(nullptr);
    if (r.tau) j["tau"] = num(*r.tau);
    j["c_cd"] = num(w.c_cd);
    j["neg_bd_plus"] = num(w.neg_bd[0]);
    j["neg_bd_minus"] = num(w.neg_bd[1]);
    j["neg_cb_plus"] = num(w.neg_cb[0]);
    j["neg_cb_minus"] = num(w.neg_cb[1]);
    j["neg_cd_plus"] = num(w.neg_cd[0]);
    j["neg_cd_minus"] = num(w.neg_cd[1]);
    j["search_cc"] = num(w.search_cc.min_negativity);
    j["search_ce"] = num(w.search_ce.min_negativity);
    j["search_berkson"] = num(w.search_berkson.min_negativity);
    j["class"] = to_string(w.class_label);
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace qcausal
