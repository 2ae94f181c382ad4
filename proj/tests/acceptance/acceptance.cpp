// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failed criteria.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qfp/analysis.hpp"
#include "qfp/baseline.hpp"
#include "qfp/codes.hpp"
#include "qfp/experiment.hpp"
#include "qfp/protocol.hpp"

using namespace qfp;
using analysis::Count;

namespace {

const double kDelta3 = 83.0 / 90.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

std::string report_field(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
  }
  return {};
}

cli::ExperimentConfig noisy_config() {
  return cli::parse_config("eta = 0.1\nnu = 0.98\np_dark = 4e-8\ntarget_error = 1e-6\neps_trace = 1e-6\nc = 3\n");
}

Outcome ideal_photon_number() {
  const auto t0 = std::chrono::steady_clock::now();
  analysis::PhotonSolveOptions ideal;
  const double a = analysis::required_mean_photon_number(1e-6, kDelta3, {}, ideal);
  const double t = seconds_since(t0);
  const double rel = std::fabs(a / 88.8 - 1);
  return {rel <= 0.01 && t < 1.0, fmt("alpha^2 = %.4f (%.3f%% from 88.8), %.3f s", a, 100 * rel, t)};
}

Outcome noisy_photon_number() {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream out;
  cli::cmd_optimize(noisy_config(), out);
  const double t = seconds_since(t0);
  const std::string report = out.str();
  const double a = std::stod(report_field(report, "robust_alpha_sq"));
  const std::string convention = report_field(report, "robust_delta_q_convention");
  const double rel = std::fabs(a / 6651 - 1);
  return {rel <= 0.15 && convention == "printed" && t < 1.0,
          fmt("alpha^2 = %.1f (%.2f%% from 6651), convention reported as '%s', %.3f s", a, 100 * rel,
              convention.c_str(), t)};
}

Outcome separation() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = cli::compute_sweep(noisy_config());
  const double t = seconds_since(t0);
  const Count n13 = 10000000000000ULL;
  const double ratio = baseline::classical_cost(n13, 1e-6) / analysis::quantum_info_cost(n13, 3, 88.8, 1e-6);
  double sweep_ratio = 0.0;
  double classical_1e6 = 0.0;
  for (const auto& r : rows) {
    if (r.n == n13) sweep_ratio = r.classical_bits / r.quantum_ideal_bits;
    if (r.n == 1000000) classical_1e6 = r.classical_bits;
  }
  return {ratio >= 100 && sweep_ratio >= 100 && classical_1e6 == 20000.0 && rows.size() == 12 && t < 10.0,
          fmt("ratio at n=1e13: %.0f (sweep row %.0f), classical bits at n=1e6: %.0f, 12-row sweep %.3f s", ratio,
              sweep_ratio, classical_1e6, t)};
}

Outcome dark_count_cliff() {
  const auto rows = cli::compute_sweep(noisy_config());
  bool low_ok = true;
  bool high_ok = true;
  std::string marks;
  for (const auto& r : rows) {
    marks += fmt("%.0e:%s ", static_cast<double>(r.n), r.feasible ? "ok" : "X");
    if (r.n <= 1000000000000ULL && !r.feasible) low_ok = false;
    if (r.n >= 10000000000000ULL && r.feasible) high_ok = false;
  }
  return {low_ok && high_ok, "rows " + marks + (low_ok ? "" : "(infeasible below 1e13)")};
}

// Per-slot outcome patterns aggregated into P(zeros, ones, doubles) by visiting
// all 4^m patterns.
using Table = std::vector<double>;

Table enumerate_table(std::size_t m, std::size_t agree, const protocol::ProtocolParams& p) {
  const double pc = -std::expm1(-2.0 * p.eta * p.alpha_sq / static_cast<double>(m));
  const auto la = oracle::slot_law(pc, p.nu, p.p_dark, true);
  const auto ld = oracle::slot_law(pc, p.nu, p.p_dark, false);
  const std::size_t side = m + 1;
  Table table(side * side * side, 0.0);
  oracle::enumerate_patterns(m, agree, la, ld, [&](const oracle::PatternStats& s, double prob) {
    table[(s.zeros * side + s.ones) * side + s.doubles] += prob;
  });
  return table;
}

double table_error(const Table& table, std::size_t m, bool equal_inputs, const protocol::RuleConfig& rule) {
  const std::size_t side = m + 1;
  double err = 0.0;
  for (std::size_t z = 0; z <= m; ++z) {
    for (std::size_t o = 0; z + o <= m; ++o) {
      for (std::size_t d = 0; z + o + d <= m; ++d) {
        const double prob = table[(z * side + o) * side + d];
        bool says_equal;
        if (rule.rule == protocol::DecisionRule::ideal) {
          const bool count_doubles = rule.policy.double_click == protocol::DoubleClickPolicy::count_one;
          says_equal = o == 0 && !(count_doubles && d > 0);
        } else if (z + o == 0) {
          says_equal = rule.policy.zero_click_verdict == protocol::Verdict::equal;
        } else {
          says_equal = static_cast<double>(z) / static_cast<double>(z + o) > rule.q_e - rule.delta_q;
        }
        if (says_equal != equal_inputs) err += prob;
      }
    }
  }
  return err;
}

Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::array<protocol::ProtocolParams, 3> noise{{
      {1.5, 1.0, 1.0, 0.0, 1},
      {2.0, 0.8, 0.9, 0.02, 1},
      {4.0, 0.5, 0.98, 0.1, 1},
  }};
  std::size_t configs = 0;
  std::size_t enum_fail = 0;
  std::size_t mc_fail = 0;
  double worst_diff = 0.0;
  double worst_z = 0.0;
  std::uint64_t seed = 1;
  for (std::size_t m : {1U, 2U, 5U, 12U}) {
    for (auto base : noise) {
      protocol::ProtocolParams p = base;
      p.m = m;
      const auto mf = protocol::model_fractions(p, 0.5);
      std::vector<protocol::RuleConfig> rules(3);
      rules[0].rule = protocol::DecisionRule::ideal;
      rules[1].rule = protocol::DecisionRule::ideal;
      rules[1].policy.double_click = protocol::DoubleClickPolicy::count_one;
      rules[2].rule = protocol::DecisionRule::robust;
      rules[2].q_e = mf.q_e;
      rules[2].delta_q = (mf.q_e - mf.q_d) / 2;
      for (std::size_t agree = 0; agree <= m; ++agree) {
        const Table table = enumerate_table(m, agree, p);
        BitString ex(m);
        BitString ey(m);
        for (std::size_t i = agree; i < m; ++i) ey.set(i, true);
        for (std::size_t r = 0; r < rules.size(); ++r) {
          ++configs;
          const double exact = protocol::exact_error_probability(p, agree, rules[r]);
          const double brute = table_error(table, m, agree == m, rules[r]);
          worst_diff = std::max(worst_diff, std::fabs(exact - brute));
          if (std::fabs(exact - brute) > 1e-12) ++enum_fail;
          if (r == 1) continue;  // Monte Carlo on the two base rules
          protocol::EstimateOptions o;
          o.trials = 1000000;
          o.master_seed = seed++;
          const auto est = protocol::estimate_error_rate(p, ex, ey, rules[r], o);
          const double sigma = std::sqrt(exact * (1 - exact) / 1e6);
          const double diff = std::fabs(est.rate - exact);
          if (sigma > 0) worst_z = std::max(worst_z, diff / sigma);
          if (diff > 5 * sigma + 1e-15) ++mc_fail;
        }
      }
    }
  }
  const double t = seconds_since(t0);
  return {enum_fail == 0 && mc_fail == 0 && t < 120.0,
          fmt("%zu configs: max |exact - enumeration| = %.2e, %zu enumeration and %zu Monte Carlo mismatches "
              "(worst %.2f sigma), %.1f s",
              configs, worst_diff, enum_fail, mc_fail, worst_z, t)};
}

Outcome bound_validity() {
  std::size_t points = 0;
  std::size_t violations = 0;
  // 100 parameter points x {ideal, robust}.
  for (std::size_t m : {10U, 20U, 50U, 100U, 200U}) {
    for (double delta : {0.5, 0.75, 0.9, 0.95}) {
      for (double a : {0.5, 2.0, 8.0, 30.0, 100.0}) {
        const auto agree = static_cast<std::size_t>(std::floor(delta * static_cast<double>(m)));
        {
          ++points;
          protocol::ProtocolParams p{a, 1.0, 1.0, 0.0, m};
          protocol::RuleConfig rule;
          const double bound = analysis::ideal_error_bound(m, p.slot_click_probability(), delta);
          const double worst = protocol::exact_error_probability(p, agree, rule);
          const double equal = protocol::exact_error_probability(p, m, rule);
          if (worst > bound * (1 + 1e-12) || equal > bound * (1 + 1e-12)) ++violations;
        }
        {
          ++points;
          protocol::ProtocolParams p{a, 0.9, 0.95, 0.01, m};
          const auto mf = protocol::model_fractions(p, delta);
          protocol::RuleConfig rule;
          rule.rule = protocol::DecisionRule::robust;
          rule.q_e = mf.q_e;
          rule.delta_q = (mf.q_e - mf.q_d) / 2;
          const double p_c_eff = std::min(1.0, p.slot_click_probability() + p.p_dark);
          const double bound = analysis::robust_error_bound(m, p_c_eff, rule.delta_q);
          const double worst = protocol::exact_error_probability(p, agree, rule);
          const double equal = protocol::exact_error_probability(p, m, rule);
          if (worst > bound * (1 + 1e-12) || equal > bound * (1 + 1e-12)) ++violations;
        }
      }
    }
  }
  std::size_t poisson_bad = 0;
  for (double a : {0.5, 5.0, 30.0, 88.8, 200.0}) {
    for (Count dn = 1; dn <= 1000; dn += 9) {
      if (oracle::poisson_two_sided_tail(a, dn) > analysis::poisson_tail(a, dn) * (1 + 1e-9) + 1e-300) ++poisson_bad;
    }
  }
  std::size_t hoeffding_bad = 0;
  for (Count m = 2; m <= 60; ++m) {
    for (Count agree = 0; agree <= m; ++agree) {
      const double mean = static_cast<double>(agree) / static_cast<double>(m);
      for (Count k = 1; k <= m; ++k) {
        for (double dq : {0.02, 0.1, 0.25}) {
          double tail = 0.0;
          for (Count l = 0; l <= k; ++l) {
            if (l > agree || k - l > m - agree) continue;
            if (static_cast<double>(l) / static_cast<double>(k) <= mean - dq) tail += oracle::hypergeom(m, agree, k, l);
          }
          if (tail > analysis::hoeffding_tail_bound(k, dq) * (1 + 1e-12)) ++hoeffding_bad;
        }
      }
    }
  }
  std::size_t ratio_bad = 0;
  for (Count m = 1; m <= 25; ++m)
    for (Count agree = 0; agree <= m; ++agree)
      for (Count k = 0; k <= m; ++k) ratio_bad += analysis::binomial_ratio_inequality_check(m, agree, k) ? 0 : 1;
  const std::size_t total = violations + poisson_bad + hoeffding_bad + ratio_bad;
  return {total == 0 && points == 200,
          fmt("%zu grid points: %zu bound violations; Poisson %zu, Hoeffding %zu, binomial-ratio %zu", points,
              violations, poisson_bad, hoeffding_bad, ratio_bad)};
}

Outcome tightness_point() {
  const double v = analysis::dimension_bound(1.0, 1, 2);
  const auto counted = oracle::count_mode_states(2, 2);
  const bool point_ok = std::fabs(v - std::log2(6.0)) < 1e-12 && std::fabs(v - std::log2(static_cast<double>(counted))) < 1e-12;
  std::vector<double> costs;
  for (Count n = 10000; n <= 1000000000000ULL; n *= 100) costs.push_back(analysis::quantum_info_cost(n, 3, 88.8, 1e-6));
  double worst = 0.0;
  for (std::size_t i = 2; i < costs.size(); ++i) {
    const double ratio = (costs[i] - costs[i - 1]) / (costs[i - 1] - costs[i - 2]);
    worst = std::max(worst, std::fabs(ratio - 1));
  }
  return {point_ok && worst <= 0.02,
          fmt("log2 d = %.12f, counted %llu states; increment ratios within %.3f%% of 1", v,
              static_cast<unsigned long long>(counted), 100 * worst)};
}

Outcome code_correctness() {
  std::size_t checked = 0;
  std::size_t bad = 0;
  for (std::size_t n = 1; n <= 8; ++n) {
    for (std::size_t r : {1U, 3U}) {
      codes::CodeRequest req;
      req.backend = codes::Backend::repetition;
      req.n = n;
      req.m = n * r;
      const codes::Code code(req);
      const auto rep = codes::verify_min_distance(code, 12);
      ++checked;
      if (!rep.exhaustive || rep.min_distance != codes::distance_floor(code.spec())) ++bad;
    }
  }
  for (std::size_t n : {6U, 8U, 10U, 12U}) {
    codes::CodeRequest req;
    req.backend = codes::Backend::random_linear;
    req.n = n;
    req.m = 3 * n;
    req.delta = 0.8;
    req.seed = n;
    const codes::Code code(req);
    const auto rep = codes::verify_min_distance(code, 12);
    ++checked;
    if (!rep.exhaustive || rep.min_distance < codes::distance_floor(code.spec())) ++bad;
  }

  codes::CodeRequest jreq;
  jreq.backend = codes::Backend::justesen;
  jreq.n = 1024;
  jreq.c = 3;
  const codes::Code justesen(jreq);
  const std::filesystem::path dir = QFP_GOLDEN_DIR;
  bool golden = true;
  for (const std::string stem : {"justesen_n1024_c3", "justesen_n1024_c3_unit"}) {
    try {
      const auto x = read_bitstring_file(dir / (stem + "_input.qfp"));
      golden = golden && justesen.encode(x).bits == read_bitstring_file(dir / (stem + "_codeword.qfp"));
    } catch (const std::exception&) {
      golden = false;
    }
  }
  RandomStream rng(1000);
  std::size_t linear_bad = 0;
  for (int t = 0; t < 1000; ++t) {
    BitString x(1360);
    BitString y(1360);
    for (std::size_t i = 0; i < 1360; ++i) {
      x.set(i, (rng() >> 63) != 0);
      y.set(i, (rng() >> 63) != 0);
    }
    if (justesen.encode(x ^ y).bits != (justesen.encode(x).bits ^ justesen.encode(y).bits)) ++linear_bad;
  }
  return {bad == 0 && golden && linear_bad == 0,
          fmt("%zu small codes, %zu below floor; golden vectors %s; %zu linearity failures in 1000 pairs", checked,
              bad, golden ? "match" : "DIFFER", linear_bad)};
}

Outcome determinism() {
  auto sweep_cfg = noisy_config();
  auto sim_cfg = cli::parse_config(
      "backend = random_linear\nn = 8\nm = 24\ndelta = 0.75\nalpha_sq = 3\nnu = 0.95\np_dark = 0.01\n"
      "mode = robust\ntrials = 50000\nseed = 31337\nregime = random_distinct\n");
  std::vector<std::string> sweeps;
  std::vector<std::string> sims;
  for (unsigned threads : {1U, 4U, 1U, 7U}) {
    sweep_cfg.threads = threads;
    sim_cfg.threads = threads;
    std::ostringstream a;
    cli::cmd_sweep(sweep_cfg, a);
    sweeps.push_back(a.str());
    std::ostringstream b;
    cli::cmd_simulate(sim_cfg, std::nullopt, std::nullopt, b);
    sims.push_back(b.str());
  }
  bool same = true;
  for (std::size_t i = 1; i < sweeps.size(); ++i) same = same && sweeps[i] == sweeps[0] && sims[i] == sims[0];
  return {same, fmt("sweep (%zu bytes) and simulate (%zu bytes) identical across thread counts 1/4/1/7: %s",
                    sweeps[0].size(), sims[0].size(), same ? "yes" : "no")};
}

Outcome classical_baseline() {
  codes::CodeRequest req;
  req.backend = codes::Backend::random_linear;
  req.n = 9;
  req.m = 36;
  req.delta = 0.8;
  req.seed = 2;
  const codes::Code code(req);
  RandomStream rng(55);
  std::size_t equal_errors = 0;
  for (int t = 0; t < 100000; ++t) {
    BitString x(9);
    for (std::size_t i = 0; i < 9; ++i) x.set(i, (rng() >> 63) != 0);
    if (baseline::grid_protocol_trial(code, x, x, 1, rng) != protocol::Verdict::equal) ++equal_errors;
  }

  std::size_t exact_bad = 0;
  std::size_t pairs = 0;
  std::vector<codes::Code> small;
  {
    codes::CodeRequest r;
    r.backend = codes::Backend::repetition;
    r.n = 4;
    r.m = 16;
    small.emplace_back(r);
    r.n = 1;
    r.m = 4;
    small.emplace_back(r);
  }
  small.emplace_back(req);
  {
    codes::CodeRequest r = req;
    r.n = 10;
    r.m = 49;
    r.seed = 4;
    small.emplace_back(r);
  }
  for (const auto& c : small) {
    const std::size_t n = c.spec().n;
    const double mm = static_cast<double>(c.spec().m);
    for (std::uint64_t i = 0; i < (1ULL << n); ++i) {
      const auto a = c.encode(codes::message_from_index(n, i)).bits;
      for (std::uint64_t j = i + 1; j < (1ULL << n); j += 5) {
        const auto b = c.encode(codes::message_from_index(n, j)).bits;
        ++pairs;
        const double d = static_cast<double>(oracle::naive_hamming(a, b));
        if (baseline::grid_mismatch_probability(a, b) != d / mm) ++exact_bad;
      }
    }
  }

  // Sampled single rounds on one distinct pair.
  const auto a = code.encode(codes::message_from_index(9, 3)).bits;
  const auto b = code.encode(codes::message_from_index(9, 300)).bits;
  const double p = static_cast<double>(oracle::naive_hamming(a, b)) / 36.0;
  std::size_t mism = 0;
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) mism += baseline::grid_protocol_trial(a, b, 1, rng) == protocol::Verdict::different;
  const double rate = static_cast<double>(mism) / trials;
  const double sigma = std::sqrt(p * (1 - p) / trials);
  const bool sampled_ok = std::fabs(rate - p) <= 3 * sigma;
  return {equal_errors == 0 && exact_bad == 0 && sampled_ok,
          fmt("equal-input errors %zu/100000; %zu enumerated pairs, %zu off d/m; sampled %.4f vs %.4f (%.2f sigma)",
              equal_errors, pairs, exact_bad, rate, p, std::fabs(rate - p) / sigma)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 ideal photon number", ideal_photon_number},
      {"2 noisy photon number", noisy_photon_number},
      {"3 quantum/classical separation", separation},
      {"4 dark-count cliff", dark_count_cliff},
      {"5 exact oracle equivalence", oracle_equivalence},
      {"6 bound validity", bound_validity},
      {"7 dimension tightness and log growth", tightness_point},
      {"8 code correctness", code_correctness},
      {"9 determinism", determinism},
      {"10 classical baseline", classical_baseline},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %-38s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
