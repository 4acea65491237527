#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcausal/causal_model.hpp"
#include "qcausal/errors.hpp"
#include "qcausal/witnesses.hpp"

namespace qcausal {

/// Invalid sweep or command configuration; the message names the field.
class ConfigError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

enum class SweepFamily { delay, theta_p, eta };
std::string to_string(SweepFamily f);
SweepFamily sweep_family_from_string(std::string_view s);

enum class OutputFormat { csv, json };

/// Inclusive linear grid.
struct GridSpec {
  double start = 0.0;
  double stop = 1.0;
  int steps = 2;

  std::vector<double> values() const;
};

struct SweepConfig {
  SweepFamily family = SweepFamily::delay;
  /// Swept parameters: "q" or "tau" for delay, "theta" and "p" for theta_p,
  /// "eta" for eta.
  std::map<std::string, GridSpec> grid;
  double theta = 1.5707963267948966;
  double p = 0.0;
  double q = 1.0;
  std::optional<double> tau_coh;
  double epsilon = kDefaultEpsilon;
  std::string output;
  OutputFormat format = OutputFormat::csv;
  std::optional<std::uint64_t> seed;
  /// Absent means exact theory; otherwise each point goes through simulated tomography.
  std::optional<std::uint64_t> shots;
  int resamples = 50;
  int threads = 0;  // 0: hardware concurrency
  SearchOptions search{};

  /// Default grids for each family.
  static SweepConfig defaults(SweepFamily family);
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Builds a SweepConfig from key=value options (as read from a config file
/// or flags). Unknown keys are rejected.
SweepConfig sweep_config_from_options(const std::map<std::string, std::string>& options);

/// Parses "key=value" lines; '#' starts a comment.
std::map<std::string, std::string> parse_key_value(std::string_view text);

struct SweepRow {
  std::string param_name;
  double theta = 0.0;
  double p = 0.0;
  double q = 1.0;
  std::optional<double> eta;
  std::optional<double> tau;
  WitnessReport report;
};

std::vector<SweepRow> run_sweep(const SweepConfig& config);

inline constexpr std::string_view kSweepCsvHeader =
    "param_name,theta,p,q,eta,c_cd,neg_bd_plus,neg_bd_minus,neg_cb_plus,neg_cb_minus,neg_cd_plus,neg_cd_minus,class";

std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string sweep_to_json(const std::vector<SweepRow>& rows);

/// 9 significant digits, with -0 printed as 0.
std::string format_number(double x);

}  // namespace qcausal
