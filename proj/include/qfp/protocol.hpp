#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "qfp/bitstring.hpp"
#include "qfp/codes.hpp"
#include "qfp/rng.hpp"

namespace qfp::protocol {

// Physical parameters of one protocol run.
struct ProtocolParams {
  double alpha_sq = 0.0;  // source mean photon number |alpha|^2 per party
  double eta = 1.0;       // channel + detector transmittance
  double nu = 1.0;        // interferometer visibility
  double p_dark = 0.0;    // dark-count probability per detector per slot
  std::size_t m = 1;      // time-bin modes

  // Throws ParameterError when any field is out of range.
  void validate() const;

  double detected_alpha_sq() const { return eta * alpha_sq; }

  // Probability that a slot carries a photon click: 1 - exp(-2 eta alpha^2 / m).
  double slot_click_probability() const;
};

enum class SlotOutcome : std::uint8_t { none = 0, zero = 1, one = 2, both = 3 };

// Outcome distribution of one slot, indexed by SlotOutcome.
using SlotDistribution = std::array<double, 4>;

// Exact per-slot law of slot_outcome. "Correct" detector is "0" when the
// codeword bits agree and "1" otherwise.
SlotDistribution slot_distribution(const ProtocolParams& params, bool bits_agree);

// One slot. Draws exactly four uniforms, in this order:
//   1. photon click        (u < p_c)
//   2. detector assignment (u < nu -> parity-correct detector)
//   3. dark count, detector "0" (u < p_dark)
//   4. dark count, detector "1" (u < p_dark)
SlotOutcome slot_outcome(const ProtocolParams& params, bool bits_agree, RandomStream& rng);

struct RunTally {
  std::size_t zeros = 0;         // slots with a lone "0" click (Z)
  std::size_t clicks = 0;        // slots with exactly one click (C)
  std::size_t no_click = 0;
  std::size_t double_click = 0;

  std::size_t ones() const { return clicks - zeros; }
  std::optional<double> f0() const;

  RunTally& operator+=(const RunTally& other);
  friend bool operator==(const RunTally&, const RunTally&) = default;
};

RunTally simulate_run(const ProtocolParams& params, const BitString& ex, const BitString& ex_prime,
                      RandomStream& rng);
RunTally simulate_run(const ProtocolParams& params, const codes::Codeword& ex, const codes::Codeword& ex_prime,
                      RandomStream& rng);

enum class DecisionRule { ideal, robust };
enum class Verdict { equal, different };
enum class DoubleClickPolicy { exclude, count_one };

std::string_view to_string(DecisionRule rule);
std::string_view to_string(Verdict verdict);
std::string_view to_string(DoubleClickPolicy policy);
DecisionRule parse_decision_rule(std::string_view name);
DoubleClickPolicy parse_double_click_policy(std::string_view name);

// How the referee treats double clicks (ideal rule) and runs without a
// single click (robust rule).
struct RefereePolicy {
  DoubleClickPolicy double_click = DoubleClickPolicy::exclude;
  Verdict zero_click_verdict = Verdict::equal;
};

struct Decision {
  Verdict verdict = Verdict::equal;
  DecisionRule rule = DecisionRule::ideal;
  bool inconclusive = false;
};

Decision decide_ideal(const RunTally& tally, const RefereePolicy& policy = {});

// Equal iff f0 > q_E - delta_q. Requires 0 <= delta_q <= q_E <= 1.
Decision decide_robust(const RunTally& tally, double q_e, double delta_q, const RefereePolicy& policy = {});

struct RuleConfig {
  DecisionRule rule = DecisionRule::ideal;
  double q_e = 1.0;      // robust rule only
  double delta_q = 0.0;  // robust rule only
  RefereePolicy policy;
};

Decision decide(const RunTally& tally, const RuleConfig& rule);

// Mean "0"-fraction among single clicks under the per-slot law, for inputs
// whose codewords agree on a fraction `agree_fraction` of slots. Used to set
// robust-rule thresholds consistent with the simulated detector model.
struct ModelFractions {
  double q_e = 0.0;
  double q_d = 0.0;
  double single_click = 0.0;  // probability a slot yields exactly one click
};
ModelFractions model_fractions(const ProtocolParams& params, double agree_fraction);

inline constexpr std::size_t kDefaultExactCapacity = 5000;

// Exact error probability for a pair of inputs whose codewords agree on
// `agree_count` of the m slots (agree_count == m means equal inputs).
// Convolves the m per-slot categorical laws into the joint law of (C, Z)
// and sums the region where the referee answers wrongly.
double exact_error_probability(const ProtocolParams& params, std::size_t agree_count, const RuleConfig& rule,
                               std::size_t capacity = kDefaultExactCapacity);

enum class InputRegime { worst_case, random_distinct, equal };
std::string_view to_string(InputRegime regime);
InputRegime parse_input_regime(std::string_view name);

struct ErrorEstimate {
  double rate = 0.0;
  double std_err = 0.0;
  std::uint64_t errors = 0;
  std::uint64_t trials = 0;
  RunTally totals;                   // summed over all trials
  std::uint64_t verdict_equal = 0;
  std::uint64_t verdict_different = 0;
  std::uint64_t inconclusive = 0;
};

struct EstimateOptions {
  InputRegime regime = InputRegime::worst_case;
  std::uint64_t trials = 1;
  std::uint64_t master_seed = 0;
  unsigned threads = 1;
};

// Monte Carlo error rate. Trial i draws from RandomStream(mix64(master_seed, i)),
// so the result is independent of `threads`. Worst-case pairs differ in
// exactly distance_floor(code.spec()) slots; params.m is taken from the code.
ErrorEstimate estimate_error_rate(const ProtocolParams& params, const codes::Code& code, const RuleConfig& rule,
                                  const EstimateOptions& options);

// Same, for a fixed codeword pair (the referee's view of a concrete input pair).
ErrorEstimate estimate_error_rate(const ProtocolParams& params, const BitString& ex, const BitString& ex_prime,
                                  const RuleConfig& rule, const EstimateOptions& options);

}  // namespace qfp::protocol
