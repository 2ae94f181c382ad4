#include "qfp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qfp/errors.hpp"

namespace qfp::analysis {

namespace {

constexpr Count kDirectSumLimit = 10'000'000;

// ln binom(a, b). Small sides are summed term by term as log1p((a - r) / i),
// which stays accurate when a is ~10^14 and lgamma differences would not.
double log_choose(Count a, Count b) {
  if (b > a) return -std::numeric_limits<double>::infinity();
  const Count r = std::min(b, a - b);
  if (r <= kDirectSumLimit) {
    const auto rest = static_cast<double>(a - r);
    double total = 0.0;
    for (Count i = 1; i <= r; ++i) total += std::log1p(rest / static_cast<double>(i));
    return total;
  }
  const auto da = static_cast<double>(a);
  const auto db = static_cast<double>(b);
  return std::lgamma(da + 1.0) - std::lgamma(db + 1.0) - std::lgamma(da - db + 1.0);
}

double log_choose_gamma(Count a, Count b) {
  const auto da = static_cast<double>(a);
  const auto db = static_cast<double>(b);
  return std::lgamma(da + 1.0) - std::lgamma(db + 1.0) - std::lgamma(da - db + 1.0);
}

Count photon_window_top(double alpha_sq, Count delta_n) {
  return static_cast<Count>(std::ceil(alpha_sq)) + delta_n;
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

double click_prob(double alpha_sq_detected, Count m) {
  if (!(alpha_sq_detected >= 0.0)) throw DomainError("mean photon number must be >= 0");
  if (m == 0) throw DomainError("m must be at least 1");
  return -std::expm1(-2.0 * alpha_sq_detected / static_cast<double>(m));
}

std::string_view to_string(DeltaQConvention convention) {
  return convention == DeltaQConvention::printed ? "printed" : "halved";
}

DeltaQConvention parse_delta_q_convention(std::string_view name) {
  if (name == "printed") return DeltaQConvention::printed;
  if (name == "halved") return DeltaQConvention::halved;
  throw ParameterError("unknown delta-q convention '" + std::string(name) + "'");
}

ExpectedFractions expected_fractions(const protocol::ProtocolParams& params, double delta,
                                     DeltaQConvention convention, EffectiveClickMode click_mode) {
  params.validate();
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  ExpectedFractions out;
  out.p_c = click_prob(params.detected_alpha_sq(), params.m);
  const double pd = params.p_dark;
  const double total = out.p_c + pd;
  if (total <= 0.0) throw ParameterError("degenerate parameters: p_c + p_dark == 0");
  const double pf = out.p_c / total;
  const double dark_share = pd / (2.0 * total);
  const double nu = params.nu;
  out.q_d = pf * (nu * delta + (1.0 - nu) * (1.0 - delta)) + dark_share;
  out.q_e = pf * nu + dark_share;
  out.delta_q = pf * (1.0 - delta) * (2.0 * nu - 1.0);
  if (convention == DeltaQConvention::halved) out.delta_q /= 2.0;
  out.p_c_eff = click_mode == EffectiveClickMode::approximate
                    ? std::min(1.0, total)
                    : 1.0 - (1.0 - out.p_c) * (1.0 - pd) * (1.0 - pd);
  return out;
}

double delta_q_without_dark_counts(double nu, double delta, DeltaQConvention convention) {
  const double full = (1.0 - delta) * (2.0 * nu - 1.0);
  return convention == DeltaQConvention::halved ? full / 2.0 : full;
}

double ideal_error_bound(Count m, double p_c, double delta) {
  check_probability(p_c, "p_c");
  check_probability(delta, "delta");
  const double step = p_c * (1.0 - delta);
  if (step >= 1.0) return 0.0;
  return std::clamp(std::exp(static_cast<double>(m) * std::log1p(-step)), 0.0, 1.0);
}

double ideal_error_asymptote(double alpha_sq_detected, double delta) {
  if (!(alpha_sq_detected >= 0.0)) throw DomainError("mean photon number must be >= 0");
  if (!(delta < 1.0)) throw DomainError("delta must be < 1");
  return std::exp(-2.0 * (1.0 - delta) * alpha_sq_detected);
}

double robust_error_bound(Count m, double p_c_eff, double delta_q) {
  check_probability(p_c_eff, "p'_c");
  if (!(delta_q >= 0.0)) throw DomainError("delta_q must be >= 0");
  const double step = p_c_eff * -std::expm1(-2.0 * delta_q * delta_q);
  if (step >= 1.0) return 0.0;
  return std::clamp(std::exp(static_cast<double>(m) * std::log1p(-step)), 0.0, 1.0);
}

double robust_error_asymptote(double alpha_sq_detected, double delta_q) {
  if (!(alpha_sq_detected >= 0.0)) throw DomainError("mean photon number must be >= 0");
  return std::exp(-2.0 * alpha_sq_detected * -std::expm1(-2.0 * delta_q * delta_q));
}

double hypergeometric_pmf(Count m, Count agree, Count k, Count l) {
  if (agree > m || k > m || l > k || l > agree || k - l > m - agree) {
    throw DomainError("hypergeometric arguments out of range (m=" + std::to_string(m) + ", agree=" +
                      std::to_string(agree) + ", k=" + std::to_string(k) + ", l=" + std::to_string(l) + ")");
  }
  const double log_p = log_choose_gamma(agree, l) + log_choose_gamma(m - agree, k - l) - log_choose_gamma(m, k);
  return std::exp(log_p);
}

bool binomial_ratio_inequality_check(Count m, Count agree, Count k) {
  if (m == 0 || agree > m || k > m) throw DomainError("binomial ratio check needs agree <= m, k <= m, m >= 1");
  if (k > agree) return true;  // left side is zero
  const double ratio = static_cast<double>(agree) / static_cast<double>(m);
  double lhs = 1.0;
  double rhs = 1.0;
  for (Count i = 0; i < k; ++i) {
    lhs *= static_cast<double>(agree - i) / static_cast<double>(m - i);
    rhs *= ratio;
  }
  return lhs <= rhs;
}

double hoeffding_tail_bound(Count k, double delta_q) {
  if (!(delta_q >= 0.0)) throw DomainError("delta_q must be >= 0");
  return std::exp(-2.0 * static_cast<double>(k) * delta_q * delta_q);
}

double dimension_bound(double alpha_sq, Count delta_n, Count m) {
  if (delta_n < 1 || m < 1) throw DomainError("dimension bound needs delta_n >= 1 and m >= 1");
  if (!(alpha_sq >= 0.0)) throw DomainError("alpha_sq must be >= 0");
  const Count top = photon_window_top(alpha_sq, delta_n);
  const double log_binom = log_choose(top + m - 1, m - 1);
  return std::log2(2.0 * static_cast<double>(delta_n)) + log_binom / std::numbers::ln2;
}

double dimension_bound_loose(double alpha_sq, Count delta_n, Count m) {
  if (delta_n < 1 || m < 1) throw DomainError("dimension bound needs delta_n >= 1 and m >= 1");
  const auto top = static_cast<double>(photon_window_top(alpha_sq, delta_n));
  return top * std::log2(static_cast<double>(m) + top - 1.0) + std::log2(2.0 * static_cast<double>(delta_n));
}

double poisson_tail(double alpha_sq, Count delta_n) {
  if (!(alpha_sq >= 0.0)) throw DomainError("alpha_sq must be >= 0");
  const auto d = static_cast<double>(delta_n);
  if (alpha_sq == 0.0) return delta_n == 0 ? 2.0 : 0.0;
  const double upper = alpha_sq + d;
  const double log_bound = std::numbers::ln2 - alpha_sq + upper * (1.0 + std::log(alpha_sq) - std::log(upper));
  return std::exp(log_bound);
}

double trace_distance_bound(double eps_prime) {
  if (!(eps_prime >= 0.0)) throw DomainError("eps_prime must be >= 0");
  return std::min(2.0 * std::sqrt(eps_prime), 2.0);
}

Count min_delta_n(double alpha_sq, double eps_target) {
  if (!(eps_target > 0.0 && eps_target < 2.0)) throw DomainError("eps_target must lie in (0, 2)");
  auto ok = [&](Count d) { return trace_distance_bound(poisson_tail(alpha_sq, d)) <= eps_target; };
  if (ok(1)) return 1;
  // The bound decreases in delta_n: bracket by doubling, then bisect.
  Count lo = 1;
  Count hi = 2;
  while (!ok(hi)) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const Count mid = lo + (hi - lo) / 2;
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

DimensionReport dimension_report(double alpha_sq, double eps_target, Count m) {
  DimensionReport out;
  out.delta_n = min_delta_n(alpha_sq, eps_target);
  out.eps_prime = poisson_tail(alpha_sq, out.delta_n);
  out.eps = 2.0 * std::sqrt(out.eps_prime);
  out.log2_dim = dimension_bound(alpha_sq, out.delta_n, m);
  return out;
}

Count modes_for(Count n, double c) {
  if (n < 1) throw DomainError("n must be at least 1");
  if (!(c >= 1.0)) throw DomainError("c must be >= 1");
  return static_cast<Count>(std::ceil(c * static_cast<double>(n) - 1e-9));
}

double quantum_info_cost(Count n, double c, double alpha_sq, double eps_target) {
  return dimension_bound(alpha_sq, min_delta_n(alpha_sq, eps_target), modes_for(n, c));
}

double error_bound_at(double alpha_sq, double delta, const NoiseModel& noise, const PhotonSolveOptions& options) {
  const double detected = noise.eta * alpha_sq;
  if (options.mode == BoundMode::ideal) {
    if (!options.m) return ideal_error_asymptote(detected, delta);
    return ideal_error_bound(*options.m, click_prob(detected, *options.m), delta);
  }
  if (!options.m) {
    return robust_error_asymptote(detected, delta_q_without_dark_counts(noise.nu, delta, options.convention));
  }
  if (alpha_sq == 0.0 && noise.p_dark == 0.0) return 1.0;
  protocol::ProtocolParams params{alpha_sq, noise.eta, noise.nu, noise.p_dark, static_cast<std::size_t>(*options.m)};
  const ExpectedFractions f = expected_fractions(params, delta, options.convention, options.click_mode);
  return robust_error_bound(*options.m, f.p_c_eff, f.delta_q);
}

double required_mean_photon_number(double target_error, double delta, const NoiseModel& noise,
                                   const PhotonSolveOptions& options) {
  if (!(target_error > 0.0 && target_error <= 1.0)) throw DomainError("target error must lie in (0, 1]");
  if (!(delta >= 0.0 && delta < 1.0)) throw DomainError("delta must lie in [0, 1)");
  if (!(noise.eta > 0.0 && noise.eta <= 1.0)) throw ParameterError("eta must lie in (0, 1]");
  auto bound = [&](double a) { return error_bound_at(a, delta, noise, options); };
  if (bound(0.0) <= target_error) return 0.0;
  double lo = 0.0;
  double hi = kPhotonBracketHigh;
  if (bound(hi) > target_error) {
    throw InfeasibleError("error target " + std::to_string(target_error) +
                          " unreachable for alpha^2 <= 1e9 (bound there is " + std::to_string(bound(hi)) + ")");
  }
  for (int iter = 0; iter < 400 && hi - lo > 1e-9 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (bound(mid) > target_error) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace qfp::analysis
