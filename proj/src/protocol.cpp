#include "qfp/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "qfp/errors.hpp"

namespace qfp::protocol {

namespace {

bool robust_says_equal(std::size_t zeros, std::size_t clicks, double threshold) {
  return static_cast<double>(zeros) / static_cast<double>(clicks) > threshold;
}

}  // namespace

void ProtocolParams::validate() const {
  if (!(alpha_sq >= 0.0) || !std::isfinite(alpha_sq)) throw ParameterError("alpha_sq must be finite and >= 0");
  if (!(eta > 0.0 && eta <= 1.0)) throw ParameterError("eta must lie in (0, 1]");
  if (!(nu >= 0.5 && nu <= 1.0)) throw ParameterError("nu must lie in [1/2, 1]");
  if (!(p_dark >= 0.0 && p_dark < 1.0)) throw ParameterError("p_dark must lie in [0, 1)");
  if (m == 0) throw ParameterError("m must be at least 1");
}

double ProtocolParams::slot_click_probability() const {
  return -std::expm1(-2.0 * detected_alpha_sq() / static_cast<double>(m));
}

SlotDistribution slot_distribution(const ProtocolParams& params, bool bits_agree) {
  const double pc = params.slot_click_probability();
  const double pd = params.p_dark;
  const double nu = params.nu;
  const double none = (1.0 - pc) * (1.0 - pd) * (1.0 - pd);
  const double correct_only = (1.0 - pc) * pd * (1.0 - pd) + pc * nu * (1.0 - pd);
  const double wrong_only = (1.0 - pc) * pd * (1.0 - pd) + pc * (1.0 - nu) * (1.0 - pd);
  const double both = (1.0 - pc) * pd * pd + pc * pd;
  if (bits_agree) return {none, correct_only, wrong_only, both};
  return {none, wrong_only, correct_only, both};
}

namespace {

SlotOutcome draw_slot(double pc, double nu, double p_dark, bool bits_agree, RandomStream& rng) {
  const double u_photon = rng.uniform();
  const double u_assign = rng.uniform();
  const double u_dark0 = rng.uniform();
  const double u_dark1 = rng.uniform();

  const bool photon = u_photon < pc;
  const bool lands_correct = u_assign < nu;
  // Correct detector is "0" for agreeing bits, "1" otherwise.
  const bool photon_on_zero = photon && (lands_correct == bits_agree);
  const bool photon_on_one = photon && !photon_on_zero;
  const bool zero = photon_on_zero || u_dark0 < p_dark;
  const bool one = photon_on_one || u_dark1 < p_dark;
  if (zero && one) return SlotOutcome::both;
  if (zero) return SlotOutcome::zero;
  if (one) return SlotOutcome::one;
  return SlotOutcome::none;
}

}  // namespace

SlotOutcome slot_outcome(const ProtocolParams& params, bool bits_agree, RandomStream& rng) {
  return draw_slot(params.slot_click_probability(), params.nu, params.p_dark, bits_agree, rng);
}

std::optional<double> RunTally::f0() const {
  if (clicks == 0) return std::nullopt;
  return static_cast<double>(zeros) / static_cast<double>(clicks);
}

RunTally& RunTally::operator+=(const RunTally& other) {
  zeros += other.zeros;
  clicks += other.clicks;
  no_click += other.no_click;
  double_click += other.double_click;
  return *this;
}

namespace {

RunTally simulate_slots(const ProtocolParams& params, const std::vector<std::uint8_t>& agree, RandomStream& rng) {
  const double pc = params.slot_click_probability();
  RunTally tally;
  for (std::uint8_t a : agree) {
    switch (draw_slot(pc, params.nu, params.p_dark, a != 0, rng)) {
      case SlotOutcome::none:
        ++tally.no_click;
        break;
      case SlotOutcome::zero:
        ++tally.zeros;
        ++tally.clicks;
        break;
      case SlotOutcome::one:
        ++tally.clicks;
        break;
      case SlotOutcome::both:
        ++tally.double_click;
        break;
    }
  }
  return tally;
}

std::vector<std::uint8_t> agreement_mask(const BitString& a, const BitString& b) {
  std::vector<std::uint8_t> mask(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) mask[i] = a.get(i) == b.get(i) ? 1 : 0;
  return mask;
}

}  // namespace

RunTally simulate_run(const ProtocolParams& params, const BitString& ex, const BitString& ex_prime,
                      RandomStream& rng) {
  if (ex.size() != params.m || ex_prime.size() != params.m) {
    throw DimensionError("codewords of length " + std::to_string(ex.size()) + " and " +
                         std::to_string(ex_prime.size()) + " for m = " + std::to_string(params.m));
  }
  return simulate_slots(params, agreement_mask(ex, ex_prime), rng);
}

RunTally simulate_run(const ProtocolParams& params, const codes::Codeword& ex, const codes::Codeword& ex_prime,
                      RandomStream& rng) {
  return simulate_run(params, ex.bits, ex_prime.bits, rng);
}

std::string_view to_string(DecisionRule rule) { return rule == DecisionRule::ideal ? "ideal" : "robust"; }
std::string_view to_string(Verdict verdict) { return verdict == Verdict::equal ? "equal" : "different"; }
std::string_view to_string(DoubleClickPolicy policy) {
  return policy == DoubleClickPolicy::exclude ? "exclude" : "count-one";
}

DecisionRule parse_decision_rule(std::string_view name) {
  if (name == "ideal") return DecisionRule::ideal;
  if (name == "robust") return DecisionRule::robust;
  throw ParameterError("unknown decision rule '" + std::string(name) + "'");
}

DoubleClickPolicy parse_double_click_policy(std::string_view name) {
  if (name == "exclude") return DoubleClickPolicy::exclude;
  if (name == "count-one") return DoubleClickPolicy::count_one;
  throw ParameterError("unknown double-click policy '" + std::string(name) + "'");
}

Decision decide_ideal(const RunTally& tally, const RefereePolicy& policy) {
  const bool saw_one =
      tally.ones() > 0 || (policy.double_click == DoubleClickPolicy::count_one && tally.double_click > 0);
  return {saw_one ? Verdict::different : Verdict::equal, DecisionRule::ideal, false};
}

Decision decide_robust(const RunTally& tally, double q_e, double delta_q, const RefereePolicy& policy) {
  if (!(delta_q >= 0.0 && delta_q <= q_e && q_e <= 1.0)) {
    throw ParameterError("robust rule requires 0 <= delta_q <= q_E <= 1");
  }
  if (tally.clicks == 0) return {policy.zero_click_verdict, DecisionRule::robust, true};
  const bool equal = robust_says_equal(tally.zeros, tally.clicks, q_e - delta_q);
  return {equal ? Verdict::equal : Verdict::different, DecisionRule::robust, false};
}

Decision decide(const RunTally& tally, const RuleConfig& rule) {
  if (rule.rule == DecisionRule::ideal) return decide_ideal(tally, rule.policy);
  return decide_robust(tally, rule.q_e, rule.delta_q, rule.policy);
}

ModelFractions model_fractions(const ProtocolParams& params, double agree_fraction) {
  const SlotDistribution agree = slot_distribution(params, true);
  const double single = agree[1] + agree[2];
  ModelFractions out;
  out.single_click = single;
  if (single <= 0.0) throw ParameterError("no single clicks possible: alpha_sq and p_dark are both zero");
  out.q_e = agree[1] / single;
  out.q_d = agree_fraction * out.q_e + (1.0 - agree_fraction) * (agree[2] / single);
  return out;
}

double exact_error_probability(const ProtocolParams& params, std::size_t agree_count, const RuleConfig& rule,
                               std::size_t capacity) {
  params.validate();
  const std::size_t m = params.m;
  if (agree_count > m) throw ParameterError("agree_count exceeds m");
  if (m > capacity) {
    throw CapacityError("exact error computation capped at m = " + std::to_string(capacity) + ", got " +
                        std::to_string(m));
  }
  const bool equal_inputs = agree_count == m;
  const std::size_t disagree_count = m - agree_count;
  const SlotDistribution agree = slot_distribution(params, true);
  const SlotDistribution disagree = slot_distribution(params, false);

  if (rule.rule == DecisionRule::ideal) {
    // Verdict "equal" is the event that no slot shows a lone "1" (nor, under
    // count-one, a double click). Slots are independent, so its probability
    // is the product of per-slot "quiet" probabilities.
    const bool count_one = rule.policy.double_click == DoubleClickPolicy::count_one;
    auto loud = [&](const SlotDistribution& d) { return d[2] + (count_one ? d[3] : 0.0); };
    const double log_quiet = static_cast<double>(agree_count) * std::log1p(-loud(agree)) +
                             static_cast<double>(disagree_count) * std::log1p(-loud(disagree));
    return equal_inputs ? -std::expm1(log_quiet) : std::exp(log_quiet);
  }

  if (!(rule.delta_q >= 0.0 && rule.delta_q <= rule.q_e && rule.q_e <= 1.0)) {
    throw ParameterError("robust rule requires 0 <= delta_q <= q_E <= 1");
  }

  // Joint law of (C, Z), stored triangularly: row c holds z = 0..c.
  auto row = [](std::size_t c) { return c * (c + 1) / 2; };
  std::vector<double> dist(row(m + 1), 0.0);
  dist[0] = 1.0;
  std::size_t processed = 0;
  auto convolve = [&](const SlotDistribution& d, std::size_t count) {
    const double quiet = d[0] + d[3];  // no click or double click: neither C nor Z moves
    const double z_step = d[1];
    const double o_step = d[2];
    for (std::size_t s = 0; s < count; ++s) {
      ++processed;
      for (std::size_t c = processed + 1; c-- > 0;) {
        double* cur = dist.data() + row(c);
        const double* prev = c > 0 ? dist.data() + row(c - 1) : nullptr;
        for (std::size_t z = c + 1; z-- > 0;) {
          double v = quiet * cur[z];
          if (prev != nullptr) {
            if (z > 0) v += z_step * prev[z - 1];
            if (z < c) v += o_step * prev[z];
          }
          cur[z] = v;
        }
      }
    }
  };
  convolve(agree, agree_count);
  convolve(disagree, disagree_count);

  const double threshold = rule.q_e - rule.delta_q;
  const Verdict correct = equal_inputs ? Verdict::equal : Verdict::different;
  double error = 0.0;
  if (rule.policy.zero_click_verdict != correct) error += dist[0];
  for (std::size_t c = 1; c <= m; ++c) {
    const double* cur = dist.data() + row(c);
    for (std::size_t z = 0; z <= c; ++z) {
      const Verdict v = robust_says_equal(z, c, threshold) ? Verdict::equal : Verdict::different;
      if (v != correct) error += cur[z];
    }
  }
  return std::clamp(error, 0.0, 1.0);
}

std::string_view to_string(InputRegime regime) {
  switch (regime) {
    case InputRegime::worst_case:
      return "worst_case";
    case InputRegime::random_distinct:
      return "random_distinct";
    case InputRegime::equal:
      return "equal";
  }
  return "unknown";
}

InputRegime parse_input_regime(std::string_view name) {
  if (name == "worst_case") return InputRegime::worst_case;
  if (name == "random_distinct") return InputRegime::random_distinct;
  if (name == "equal") return InputRegime::equal;
  throw ParameterError("unknown input regime '" + std::string(name) + "'");
}

namespace {

void record(ErrorEstimate& acc, const RunTally& tally, const Decision& decision, bool inputs_equal) {
  acc.totals += tally;
  ++acc.trials;
  if (decision.verdict == Verdict::equal) {
    ++acc.verdict_equal;
  } else {
    ++acc.verdict_different;
  }
  if (decision.inconclusive) ++acc.inconclusive;
  const bool wrong = (decision.verdict == Verdict::equal) != inputs_equal;
  if (wrong) ++acc.errors;
}

void merge(ErrorEstimate& into, const ErrorEstimate& part) {
  into.totals += part.totals;
  into.trials += part.trials;
  into.errors += part.errors;
  into.verdict_equal += part.verdict_equal;
  into.verdict_different += part.verdict_different;
  into.inconclusive += part.inconclusive;
}

void finalize(ErrorEstimate& est) {
  if (est.trials == 0) return;
  const auto n = static_cast<double>(est.trials);
  est.rate = static_cast<double>(est.errors) / n;
  est.std_err = std::sqrt(est.rate * (1.0 - est.rate) / n);
}

// Runs trial(i, acc) for i in [0, trials) over `threads` contiguous chunks.
template <typename Trial>
ErrorEstimate run_trials(std::uint64_t trials, unsigned threads, const Trial& trial) {
  if (trials == 0) throw ParameterError("trials must be at least 1");
  const unsigned workers = static_cast<unsigned>(std::clamp<std::uint64_t>(threads == 0 ? 1 : threads, 1, trials));
  std::vector<ErrorEstimate> parts(workers);
  auto chunk = [&](unsigned w) {
    const std::uint64_t begin = trials * w / workers;
    const std::uint64_t end = trials * (w + 1) / workers;
    for (std::uint64_t i = begin; i < end; ++i) trial(i, parts[w]);
  };
  if (workers == 1) {
    chunk(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(chunk, w);
    for (auto& t : pool) t.join();
  }
  ErrorEstimate total;
  for (const auto& part : parts) merge(total, part);
  finalize(total);
  return total;
}

}  // namespace

ErrorEstimate estimate_error_rate(const ProtocolParams& params, const BitString& ex, const BitString& ex_prime,
                                  const RuleConfig& rule, const EstimateOptions& options) {
  params.validate();
  if (ex.size() != params.m || ex_prime.size() != params.m) {
    throw DimensionError("codeword length does not match m = " + std::to_string(params.m));
  }
  const auto mask = agreement_mask(ex, ex_prime);
  const bool inputs_equal = ex == ex_prime;
  return run_trials(options.trials, options.threads, [&](std::uint64_t i, ErrorEstimate& acc) {
    RandomStream rng(mix64(options.master_seed, i));
    const RunTally tally = simulate_slots(params, mask, rng);
    record(acc, tally, decide(tally, rule), inputs_equal);
  });
}

ErrorEstimate estimate_error_rate(const ProtocolParams& params, const codes::Code& code, const RuleConfig& rule,
                                  const EstimateOptions& options) {
  ProtocolParams p = params;
  p.m = code.spec().m;
  p.validate();

  if (options.regime != InputRegime::random_distinct) {
    BitString ex(p.m);
    BitString ex_prime(p.m);
    if (options.regime == InputRegime::worst_case) {
      const std::size_t distance = std::min(codes::distance_floor(code.spec()), p.m);
      for (std::size_t i = 0; i < distance; ++i) ex_prime.set(i, true);
    }
    return estimate_error_rate(p, ex, ex_prime, rule, options);
  }

  const std::size_t n = code.spec().n;
  return run_trials(options.trials, options.threads, [&](std::uint64_t i, ErrorEstimate& acc) {
    RandomStream rng(mix64(options.master_seed, i));
    BitString x(n);
    BitString y(n);
    for (std::size_t j = 0; j < n; ++j) {
      x.set(j, (rng() >> 63) != 0);
      y.set(j, (rng() >> 63) != 0);
    }
    if (x == y) y.flip(rng.below(n));
    const auto ex = code.encode(x);
    const auto ey = code.encode(y);
    const RunTally tally = simulate_slots(p, agreement_mask(ex.bits, ey.bits), rng);
    record(acc, tally, decide(tally, rule), false);
  });
}

}  // namespace qfp::protocol
