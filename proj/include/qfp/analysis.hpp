#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "qfp/protocol.hpp"

namespace qfp::analysis {

// Counts here reach ~10^14 (m = c * n for n up to 10^14), hence 64-bit.
using Count = std::uint64_t;

// Probability of a photon click in one slot: 1 - exp(-2 a / m), where a is
// the detected (eta-attenuated) mean photon number.
double click_prob(double alpha_sq_detected, Count m);

// The printed closed form of the robust-rule margin equals q_E - q_D, while
// its definition is (q_E - q_D) / 2. Both are selectable.
enum class DeltaQConvention { printed, halved };

// p'_c ~= p_c + p_dark (approximate), or the exact probability that either
// detector fires, 1 - (1 - p_c)(1 - p_dark)^2.
enum class EffectiveClickMode { approximate, exact };

std::string_view to_string(DeltaQConvention convention);
DeltaQConvention parse_delta_q_convention(std::string_view name);

struct ExpectedFractions {
  double q_e = 0.0;
  double q_d = 0.0;
  double delta_q = 0.0;
  double p_c = 0.0;
  double p_c_eff = 0.0;
};

// q_D = pf [nu delta + (1 - nu)(1 - delta)] + p_dark / (2 (p_c + p_dark))
// q_E = pf nu + p_dark / (2 (p_c + p_dark)),   pf = p_c / (p_c + p_dark)
// with p_c from the detected mean photon number eta * alpha_sq over params.m.
ExpectedFractions expected_fractions(const protocol::ProtocolParams& params, double delta,
                                     DeltaQConvention convention = DeltaQConvention::printed,
                                     EffectiveClickMode click_mode = EffectiveClickMode::approximate);

// Delta_q with dark counts negligible (p_c >> p_dark): (1 - delta)(2 nu - 1), halved if requested.
double delta_q_without_dark_counts(double nu, double delta, DeltaQConvention convention);

// [1 - p_c (1 - delta)]^m, clamped to [0, 1].
double ideal_error_bound(Count m, double p_c, double delta);

// exp(-2 (1 - delta) a): the m -> infinity form of ideal_error_bound.
double ideal_error_asymptote(double alpha_sq_detected, double delta);

// [1 - p'_c (1 - exp(-2 delta_q^2))]^m, clamped to [0, 1].
double robust_error_bound(Count m, double p_c_eff, double delta_q);

// exp(-2 a (1 - exp(-2 delta_q^2))): the m -> infinity form without dark counts.
double robust_error_asymptote(double alpha_sq_detected, double delta_q);

// P(Z = l | C = k) when k of m slots click uniformly at random and `agree`
// slots would report "0". Evaluated through log-gamma.
double hypergeometric_pmf(Count m, Count agree, Count k, Count l);

// Whether P(Z = k | C = k) <= (agree / m)^k. Both sides are formed as
// products of per-factor ratios so rounding cannot reorder them.
bool binomial_ratio_inequality_check(Count m, Count agree, Count k);

// exp(-2 k delta_q^2)
double hoeffding_tail_bound(Count k, double delta_q);

// log2 [2 delta_n * binom(N + m - 1, m - 1)] with N = ceil(alpha_sq) + delta_n.
double dimension_bound(double alpha_sq, Count delta_n, Count m);

// (N) log2(m + N - 1) + log2(2 delta_n) with the same N; never below dimension_bound.
double dimension_bound_loose(double alpha_sq, Count delta_n, Count m);

// 2 e^{-a} (e a / (a + delta_n))^{a + delta_n}, evaluated in log space. May exceed 1.
double poisson_tail(double alpha_sq, Count delta_n);

// min(2 sqrt(eps_prime), 2)
double trace_distance_bound(double eps_prime);

// Smallest delta_n >= 1 with trace_distance_bound(poisson_tail(a, delta_n)) <= eps_target.
Count min_delta_n(double alpha_sq, double eps_target);

struct DimensionReport {
  Count delta_n = 0;
  double eps_prime = 0.0;
  double eps = 0.0;
  double log2_dim = 0.0;
};

DimensionReport dimension_report(double alpha_sq, double eps_target, Count m);

// m = ceil(c n) modes.
Count modes_for(Count n, double c);

// Transmitted information in bits: dimension_bound(a, min_delta_n(a, eps), ceil(c n)).
double quantum_info_cost(Count n, double c, double alpha_sq, double eps_target);

struct NoiseModel {
  double eta = 1.0;
  double nu = 1.0;
  double p_dark = 0.0;
};

enum class BoundMode { ideal, robust };

struct PhotonSolveOptions {
  BoundMode mode = BoundMode::ideal;
  // Finite number of modes, or nullopt for the m -> infinity form (where the
  // robust bound drops dark counts, i.e. the p_c >> p_dark regime).
  std::optional<Count> m;
  DeltaQConvention convention = DeltaQConvention::printed;
  EffectiveClickMode click_mode = EffectiveClickMode::approximate;
};

// Error bound at source mean photon number `alpha_sq` (detected value eta * alpha_sq).
double error_bound_at(double alpha_sq, double delta, const NoiseModel& noise, const PhotonSolveOptions& options);

inline constexpr double kPhotonBracketHigh = 1e9;

// Source alpha^2 at which the selected bound equals target_error, by bisection
// on [0, 1e9] to 1e-9 relative tolerance. Returns 0 when the bound is already
// at or below target at alpha^2 = 0. Throws InfeasibleError when the bound at
// the upper bracket still exceeds target.
double required_mean_photon_number(double target_error, double delta, const NoiseModel& noise,
                                   const PhotonSolveOptions& options);

}  // namespace qfp::analysis
