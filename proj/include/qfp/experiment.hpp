#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qfp/analysis.hpp"
#include "qfp/baseline.hpp"
#include "qfp/codes.hpp"
#include "qfp/protocol.hpp"

namespace qfp::cli {

enum class OutputFormat { csv, json };

// Where the robust rule's threshold q_E - delta_q comes from during simulation:
// the closed-form fractions (with the configured delta-q convention) or the
// simulated per-slot law (midpoint between its q_E and q_D).
enum class ThresholdSource { closed_form, model };

inline constexpr std::string_view kSweepSchema = "qfp-sweep-v1";

// Everything a command needs. Loaded from a flat "key = value" file and
// overridden by command-line flags; see docs/config.md for the keys.
struct ExperimentConfig {
  // code
  codes::Backend backend = codes::Backend::justesen;
  std::uint64_t n = 1024;
  double c = 3.0;
  std::uint64_t m = 0;  // random_linear / repetition only
  double delta = 0.75;  // random_linear only
  std::uint64_t code_seed = 0;

  // noise
  double alpha_sq = 88.8;
  double eta = 1.0;
  double nu = 1.0;
  double p_dark = 0.0;

  double target_error = 1e-6;
  double eps_trace = 1e-6;
  // Sweep rows count as feasible while robust_bound <= target_error * slack.
  // The solved photon numbers meet the target only as m -> infinity, so a
  // slack of 1 would flag every finite row.
  double feasibility_slack = 10.0;
  std::vector<std::uint64_t> sweep;
  std::optional<double> sweep_alpha_sq_ideal;  // fixed photon numbers for sweep rows;
  std::optional<double> sweep_alpha_sq_noisy;  // solved from target_error when absent

  std::uint64_t trials = 1000;
  std::optional<std::uint64_t> master_seed;
  unsigned threads = 1;

  protocol::DecisionRule mode = protocol::DecisionRule::ideal;
  analysis::DeltaQConvention delta_q_convention = analysis::DeltaQConvention::printed;
  analysis::EffectiveClickMode click_mode = analysis::EffectiveClickMode::approximate;
  protocol::DoubleClickPolicy double_click_policy = protocol::DoubleClickPolicy::exclude;
  protocol::Verdict zero_click_verdict = protocol::Verdict::equal;
  protocol::InputRegime regime = protocol::InputRegime::worst_case;
  ThresholdSource threshold_source = ThresholdSource::model;

  std::optional<std::filesystem::path> output;
  OutputFormat format = OutputFormat::csv;

  // Throws ParameterError naming the first invalid field.
  void validate() const;

  // Serialized key = value text; parse_config(to_text()) reproduces *this.
  std::string to_text() const;
};

std::vector<std::uint64_t> default_sweep();

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Applies one "key = value" assignment; throws ParameterError for unknown keys
// or malformed values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

codes::CodeRequest code_request(const ExperimentConfig& config);
analysis::NoiseModel noise_model(const ExperimentConfig& config);

// Agreement ceiling used by the analytic side: the Justesen bound for the
// requested c (justesen) or the instantiated code's delta otherwise.
double analytic_delta(const ExperimentConfig& config);

// Fixed 12-significant-digit rendering shared by every output path.
std::string format_real(double value);

struct SweepRow {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  double classical_bits = 0.0;
  double quantum_ideal_bits = 0.0;
  double quantum_noisy_bits = 0.0;
  double alpha_sq_ideal = 0.0;
  double alpha_sq_noisy = 0.0;
  std::uint64_t delta_n = 0;
  double eps_trace_achieved = 0.0;
  double ideal_bound = 0.0;
  double robust_bound = 0.0;
  std::uint64_t delta_n_noisy = 0;
  bool feasible = true;
};

struct SweepPhotonNumbers {
  double ideal = 0.0;
  double noisy = 0.0;
};

// Fixed photon numbers used for every sweep row.
SweepPhotonNumbers sweep_photon_numbers(const ExperimentConfig& config);

std::vector<SweepRow> compute_sweep(const ExperimentConfig& config);

void write_sweep(const std::vector<SweepRow>& rows, OutputFormat format, std::ostream& out);

// Commands. Each validates the config first and writes its report to `out`.
void cmd_encode(const ExperimentConfig& config, const std::filesystem::path& input,
                const std::filesystem::path& output, std::ostream& out);
void cmd_simulate(const ExperimentConfig& config, const std::optional<std::filesystem::path>& x_file,
                  const std::optional<std::filesystem::path>& x_prime_file, std::ostream& out);
void cmd_sweep(const ExperimentConfig& config, std::ostream& out);
void cmd_bounds(const ExperimentConfig& config, std::ostream& out);
void cmd_optimize(const ExperimentConfig& config, std::ostream& out);

}  // namespace qfp::cli
