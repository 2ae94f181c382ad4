#include "qfp/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qfp/errors.hpp"

namespace qfp::cli {

namespace {

using analysis::Count;
using nlohmann::ordered_json;

constexpr std::size_t kRobustExactCap = 500;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_real(std::string_view key, std::string_view value) {
  const std::string text = trim(value);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty() || !std::isfinite(out)) {
    throw ParameterError("config key '" + std::string(key) + "': expected a real number, got '" + text + "'");
  }
  return out;
}

// Integers may be written as 1000 or 1e3.
std::uint64_t parse_count(std::string_view key, std::string_view value) {
  const std::string text = trim(value);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec == std::errc{} && ptr == text.data() + text.size() && !text.empty()) return out;
  const double real = parse_real(key, text);
  if (real < 0.0 || real > 9.2e18 || std::floor(real) != real) {
    throw ParameterError("config key '" + std::string(key) + "': expected a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::uint64_t>(real);
}

std::string format_exact(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double rounded12(double value) { return std::stod(format_real(value)); }

std::string_view to_string(OutputFormat format) { return format == OutputFormat::csv ? "csv" : "json"; }
std::string_view to_string(ThresholdSource source) { return source == ThresholdSource::closed_form ? "closed_form" : "model"; }
std::string_view to_string(analysis::EffectiveClickMode mode) {
  return mode == analysis::EffectiveClickMode::approximate ? "approximate" : "exact";
}

// Key/value report; rendered as aligned text (csv format) or a JSON object.
class Report {
 public:
  void add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }
  void add(std::string key, double value) { add(std::move(key), format_real(value)); }
  void add_count(std::string key, std::uint64_t value) { add(std::move(key), std::to_string(value)); }

  void write(OutputFormat format, std::ostream& out) const {
    if (format == OutputFormat::json) {
      ordered_json obj = ordered_json::object();
      for (const auto& [k, v] : entries_) obj[k] = v;
      out << obj.dump(2) << '\n';
      return;
    }
    for (const auto& [k, v] : entries_) out << k << ": " << v << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Runs body(i) for i in [0, count) on `threads` workers.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, const Body& body) {
  const unsigned workers = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

void write_to(const ExperimentConfig& config, std::ostream& fallback, const auto& writer) {
  if (!config.output) {
    writer(fallback);
    return;
  }
  std::ofstream file(*config.output, std::ios::binary | std::ios::trunc);
  if (!file) throw Error("cannot open " + config.output->string() + " for writing");
  writer(file);
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

std::vector<std::uint64_t> default_sweep() {
  std::vector<std::uint64_t> out;
  std::uint64_t n = 1000;
  for (int i = 3; i <= 14; ++i, n *= 10) out.push_back(n);
  return out;
}

void ExperimentConfig::validate() const {
  if (n < 1) throw ParameterError("n must be at least 1");
  switch (backend) {
    case codes::Backend::justesen:
      if (!(c > 2.0)) throw ParameterError("justesen backend requires c > 2");
      break;
    case codes::Backend::repetition:
      if (m < n || m % n != 0) throw ParameterError("repetition backend requires m to be a multiple of n");
      break;
    case codes::Backend::random_linear:
      if (n > 16) throw ParameterError("random_linear backend supports n <= 16");
      if (m < n) throw ParameterError("random_linear backend requires m >= n");
      if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
      break;
  }
  if (!(c >= 1.0)) throw ParameterError("c must be >= 1");
  protocol::ProtocolParams params{alpha_sq, eta, nu, p_dark, 1};
  params.validate();
  if (!(target_error > 0.0 && target_error < 1.0)) throw ParameterError("target_error must lie in (0, 1)");
  if (!(eps_trace > 0.0 && eps_trace < 2.0)) throw ParameterError("eps_trace must lie in (0, 2)");
  if (!(feasibility_slack >= 1.0 && std::isfinite(feasibility_slack))) {
    throw ParameterError("feasibility_slack must be >= 1");
  }
  if (sweep.empty()) throw ParameterError("sweep list must not be empty");
  for (auto v : sweep) {
    if (v < 1) throw ParameterError("sweep entries must be >= 1");
  }
  for (const auto& a : {sweep_alpha_sq_ideal, sweep_alpha_sq_noisy}) {
    if (a && !(*a >= 0.0 && std::isfinite(*a))) throw ParameterError("sweep photon numbers must be >= 0");
  }
  if (trials < 1) throw ParameterError("trials must be at least 1");
  if (threads < 1) throw ParameterError("threads must be at least 1");
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream out;
  out << "backend = " << codes::to_string(backend) << '\n';
  out << "n = " << n << '\n';
  out << "c = " << format_exact(c) << '\n';
  out << "m = " << m << '\n';
  out << "delta = " << format_exact(delta) << '\n';
  out << "code_seed = " << code_seed << '\n';
  out << "alpha_sq = " << format_exact(alpha_sq) << '\n';
  out << "eta = " << format_exact(eta) << '\n';
  out << "nu = " << format_exact(nu) << '\n';
  out << "p_dark = " << format_exact(p_dark) << '\n';
  out << "target_error = " << format_exact(target_error) << '\n';
  out << "eps_trace = " << format_exact(eps_trace) << '\n';
  out << "feasibility_slack = " << format_exact(feasibility_slack) << '\n';
  out << "sweep = ";
  for (std::size_t i = 0; i < sweep.size(); ++i) out << (i ? "," : "") << sweep[i];
  out << '\n';
  if (sweep_alpha_sq_ideal) out << "sweep_alpha_sq_ideal = " << format_exact(*sweep_alpha_sq_ideal) << '\n';
  if (sweep_alpha_sq_noisy) out << "sweep_alpha_sq_noisy = " << format_exact(*sweep_alpha_sq_noisy) << '\n';
  out << "trials = " << trials << '\n';
  if (master_seed) out << "seed = " << *master_seed << '\n';
  out << "threads = " << threads << '\n';
  out << "mode = " << protocol::to_string(mode) << '\n';
  out << "delta_q_convention = " << analysis::to_string(delta_q_convention) << '\n';
  out << "p_c_eff_mode = " << to_string(click_mode) << '\n';
  out << "double_click_policy = " << protocol::to_string(double_click_policy) << '\n';
  out << "zero_click_verdict = " << protocol::to_string(zero_click_verdict) << '\n';
  out << "regime = " << protocol::to_string(regime) << '\n';
  out << "threshold_source = " << to_string(threshold_source) << '\n';
  if (output) out << "output = " << output->string() << '\n';
  out << "format = " << to_string(format) << '\n';
  return out.str();
}

void apply_setting(ExperimentConfig& config, std::string_view raw_key, std::string_view raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "backend") {
    config.backend = codes::parse_backend(value);
  } else if (key == "n") {
    config.n = parse_count(key, value);
  } else if (key == "c") {
    config.c = parse_real(key, value);
  } else if (key == "m") {
    config.m = parse_count(key, value);
  } else if (key == "delta") {
    config.delta = parse_real(key, value);
  } else if (key == "code_seed") {
    config.code_seed = parse_count(key, value);
  } else if (key == "alpha_sq") {
    config.alpha_sq = parse_real(key, value);
  } else if (key == "eta") {
    config.eta = parse_real(key, value);
  } else if (key == "nu") {
    config.nu = parse_real(key, value);
  } else if (key == "p_dark") {
    config.p_dark = parse_real(key, value);
  } else if (key == "target_error") {
    config.target_error = parse_real(key, value);
  } else if (key == "eps_trace") {
    config.eps_trace = parse_real(key, value);
  } else if (key == "feasibility_slack") {
    config.feasibility_slack = parse_real(key, value);
  } else if (key == "sweep") {
    config.sweep.clear();
    std::string_view rest = value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      config.sweep.push_back(parse_count(key, rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  } else if (key == "sweep_alpha_sq_ideal") {
    config.sweep_alpha_sq_ideal = parse_real(key, value);
  } else if (key == "sweep_alpha_sq_noisy") {
    config.sweep_alpha_sq_noisy = parse_real(key, value);
  } else if (key == "trials") {
    config.trials = parse_count(key, value);
  } else if (key == "seed") {
    config.master_seed = parse_count(key, value);
  } else if (key == "threads") {
    config.threads = static_cast<unsigned>(parse_count(key, value));
  } else if (key == "mode") {
    config.mode = protocol::parse_decision_rule(value);
  } else if (key == "delta_q_convention") {
    config.delta_q_convention = analysis::parse_delta_q_convention(value);
  } else if (key == "p_c_eff_mode") {
    if (value == "approximate") {
      config.click_mode = analysis::EffectiveClickMode::approximate;
    } else if (value == "exact") {
      config.click_mode = analysis::EffectiveClickMode::exact;
    } else {
      throw ParameterError("p_c_eff_mode must be approximate or exact");
    }
  } else if (key == "double_click_policy") {
    config.double_click_policy = protocol::parse_double_click_policy(value);
  } else if (key == "zero_click_verdict") {
    if (value == "equal") {
      config.zero_click_verdict = protocol::Verdict::equal;
    } else if (value == "different") {
      config.zero_click_verdict = protocol::Verdict::different;
    } else {
      throw ParameterError("zero_click_verdict must be equal or different");
    }
  } else if (key == "regime") {
    config.regime = protocol::parse_input_regime(value);
  } else if (key == "threshold_source") {
    if (value == "closed_form") {
      config.threshold_source = ThresholdSource::closed_form;
    } else if (value == "model") {
      config.threshold_source = ThresholdSource::model;
    } else {
      throw ParameterError("threshold_source must be closed_form or model");
    }
  } else if (key == "output") {
    config.output = value;
  } else if (key == "format") {
    if (value == "csv") {
      config.format = OutputFormat::csv;
    } else if (value == "json") {
      config.format = OutputFormat::json;
    } else {
      throw ParameterError("format must be csv or json");
    }
  } else {
    throw ParameterError("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  config.sweep = default_sweep();
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParameterError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

codes::CodeRequest code_request(const ExperimentConfig& config) {
  codes::CodeRequest req;
  req.backend = config.backend;
  req.n = static_cast<std::size_t>(config.n);
  req.c = config.c;
  req.m = static_cast<std::size_t>(config.m);
  req.delta = config.delta;
  req.seed = config.code_seed;
  return req;
}

analysis::NoiseModel noise_model(const ExperimentConfig& config) { return {config.eta, config.nu, config.p_dark}; }

double analytic_delta(const ExperimentConfig& config) {
  switch (config.backend) {
    case codes::Backend::justesen:
      return codes::justesen_delta_bound(config.c);
    case codes::Backend::repetition:
      return 1.0 - 1.0 / static_cast<double>(config.n);
    case codes::Backend::random_linear:
      return config.delta;
  }
  return config.delta;
}

SweepPhotonNumbers sweep_photon_numbers(const ExperimentConfig& config) {
  const double delta = analytic_delta(config);
  SweepPhotonNumbers out;
  if (config.sweep_alpha_sq_ideal) {
    out.ideal = *config.sweep_alpha_sq_ideal;
  } else {
    analysis::PhotonSolveOptions ideal;
    ideal.mode = analysis::BoundMode::ideal;
    out.ideal = analysis::required_mean_photon_number(config.target_error, delta, {}, ideal);
  }
  if (config.sweep_alpha_sq_noisy) {
    out.noisy = *config.sweep_alpha_sq_noisy;
  } else {
    analysis::PhotonSolveOptions robust;
    robust.mode = analysis::BoundMode::robust;
    robust.convention = config.delta_q_convention;
    robust.click_mode = config.click_mode;
    out.noisy = analysis::required_mean_photon_number(config.target_error, delta, noise_model(config), robust);
  }
  return out;
}

std::vector<SweepRow> compute_sweep(const ExperimentConfig& config) {
  config.validate();
  const double delta = analytic_delta(config);
  const SweepPhotonNumbers photons = sweep_photon_numbers(config);
  const Count delta_n_ideal = analysis::min_delta_n(photons.ideal, config.eps_trace);
  const Count delta_n_noisy = analysis::min_delta_n(photons.noisy, config.eps_trace);
  const double eps_ideal = analysis::trace_distance_bound(analysis::poisson_tail(photons.ideal, delta_n_ideal));

  std::vector<SweepRow> rows(config.sweep.size());
  parallel_for(rows.size(), config.threads, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.n = config.sweep[i];
    row.m = analysis::modes_for(row.n, config.c);
    row.classical_bits = baseline::classical_cost(row.n, config.target_error);
    row.alpha_sq_ideal = photons.ideal;
    row.alpha_sq_noisy = photons.noisy;
    row.delta_n = delta_n_ideal;
    row.delta_n_noisy = delta_n_noisy;
    row.eps_trace_achieved = eps_ideal;
    row.quantum_ideal_bits = analysis::dimension_bound(photons.ideal, delta_n_ideal, row.m);
    row.quantum_noisy_bits = analysis::dimension_bound(photons.noisy, delta_n_noisy, row.m);
    row.ideal_bound = analysis::ideal_error_bound(row.m, analysis::click_prob(photons.ideal, row.m), delta);
    protocol::ProtocolParams noisy{photons.noisy, config.eta, config.nu, config.p_dark,
                                   static_cast<std::size_t>(row.m)};
    const auto fractions =
        analysis::expected_fractions(noisy, delta, config.delta_q_convention, config.click_mode);
    row.robust_bound = analysis::robust_error_bound(row.m, fractions.p_c_eff, fractions.delta_q);
    row.feasible = row.robust_bound <= config.target_error * config.feasibility_slack;
  });
  return rows;
}

void write_sweep(const std::vector<SweepRow>& rows, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::json) {
    ordered_json doc = ordered_json::object();
    doc["schema"] = kSweepSchema;
    doc["rows"] = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json row = ordered_json::object();
      row["n"] = r.n;
      row["m"] = r.m;
      row["classical_bits"] = rounded12(r.classical_bits);
      row["quantum_ideal_bits"] = rounded12(r.quantum_ideal_bits);
      row["quantum_noisy_bits"] = rounded12(r.quantum_noisy_bits);
      row["alpha_sq_ideal"] = rounded12(r.alpha_sq_ideal);
      row["alpha_sq_noisy"] = rounded12(r.alpha_sq_noisy);
      row["delta_n"] = r.delta_n;
      row["eps_trace_achieved"] = rounded12(r.eps_trace_achieved);
      row["ideal_bound"] = rounded12(r.ideal_bound);
      row["robust_bound"] = rounded12(r.robust_bound);
      row["delta_n_noisy"] = r.delta_n_noisy;
      row["status"] = r.feasible ? "ok" : "infeasible";
      doc["rows"].push_back(std::move(row));
    }
    out << doc.dump(2) << '\n';
    return;
  }
  out << "# " << kSweepSchema << '\n';
  out << "n,m,classical_bits,quantum_ideal_bits,quantum_noisy_bits,alpha_sq_ideal,alpha_sq_noisy,delta_n,"
         "eps_trace_achieved,ideal_bound,robust_bound,delta_n_noisy,status\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.m << ',' << format_real(r.classical_bits) << ',' << format_real(r.quantum_ideal_bits)
        << ',' << format_real(r.quantum_noisy_bits) << ',' << format_real(r.alpha_sq_ideal) << ','
        << format_real(r.alpha_sq_noisy) << ',' << r.delta_n << ',' << format_real(r.eps_trace_achieved) << ','
        << format_real(r.ideal_bound) << ',' << format_real(r.robust_bound) << ',' << r.delta_n_noisy << ','
        << (r.feasible ? "ok" : "infeasible") << '\n';
  }
}

void cmd_encode(const ExperimentConfig& config, const std::filesystem::path& input,
                const std::filesystem::path& output, std::ostream& out) {
  config.validate();
  const codes::Code code(code_request(config));
  const BitString x = read_bitstring_file(input);
  const codes::Codeword word = code.encode(x);
  write_bitstring_file(output, word.bits);
  Report report;
  report.add("backend", std::string(codes::to_string(code.spec().backend)));
  report.add_count("n", code.spec().n);
  report.add_count("m", code.spec().m);
  report.add("c", code.spec().c);
  report.add("delta", code.spec().delta);
  report.add_count("input_bits", x.size());
  report.add("output", output.string());
  report.write(config.format, out);
}

void cmd_simulate(const ExperimentConfig& config, const std::optional<std::filesystem::path>& x_file,
                  const std::optional<std::filesystem::path>& x_prime_file, std::ostream& out) {
  config.validate();
  if (!config.master_seed) throw ParameterError("simulate requires an explicit seed (--seed or 'seed' key)");
  if (x_file.has_value() != x_prime_file.has_value()) {
    throw ParameterError("simulate needs both input files or neither");
  }
  const codes::Code code(code_request(config));
  const codes::CodeSpec& spec = code.spec();
  const protocol::ProtocolParams params{config.alpha_sq, config.eta, config.nu, config.p_dark, spec.m};
  params.validate();

  protocol::RuleConfig rule;
  rule.rule = config.mode;
  rule.policy = {config.double_click_policy, config.zero_click_verdict};
  double bound_margin = 0.0;
  double bound_click = 0.0;
  if (config.mode == protocol::DecisionRule::robust) {
    if (config.threshold_source == ThresholdSource::closed_form) {
      const auto f = analysis::expected_fractions(params, spec.delta, config.delta_q_convention, config.click_mode);
      rule.q_e = f.q_e;
      rule.delta_q = std::min(f.delta_q, f.q_e);
      bound_click = f.p_c_eff;
    } else {
      const auto f = protocol::model_fractions(params, spec.delta);
      rule.q_e = f.q_e;
      rule.delta_q = (f.q_e - f.q_d) / 2.0;
      bound_click = f.single_click;
    }
    bound_margin = rule.delta_q;
  }

  protocol::EstimateOptions options;
  options.trials = config.trials;
  options.master_seed = *config.master_seed;
  options.threads = config.threads;
  options.regime = config.regime;

  protocol::ErrorEstimate est;
  std::optional<std::size_t> agree_count;
  std::string pair_source;
  if (x_file) {
    const auto ex = code.encode(read_bitstring_file(*x_file));
    const auto ey = code.encode(read_bitstring_file(*x_prime_file));
    agree_count = spec.m - hamming_distance(ex.bits, ey.bits);
    pair_source = "files";
    est = protocol::estimate_error_rate(params, ex.bits, ey.bits, rule, options);
  } else {
    pair_source = std::string(protocol::to_string(config.regime));
    if (config.regime == protocol::InputRegime::worst_case) {
      agree_count = spec.m - std::min(codes::distance_floor(spec), spec.m);
    } else if (config.regime == protocol::InputRegime::equal) {
      agree_count = spec.m;
    }
    est = protocol::estimate_error_rate(params, code, rule, options);
  }

  const double bound = config.mode == protocol::DecisionRule::ideal
                           ? analysis::ideal_error_bound(spec.m, params.slot_click_probability(), spec.delta)
                           : analysis::robust_error_bound(spec.m, std::min(bound_click, 1.0), bound_margin);

  Report report;
  report.add("backend", std::string(codes::to_string(spec.backend)));
  report.add_count("n", spec.n);
  report.add_count("m", spec.m);
  report.add("c", spec.c);
  report.add("delta", spec.delta);
  report.add("alpha_sq", config.alpha_sq);
  report.add("eta", config.eta);
  report.add("nu", config.nu);
  report.add("p_dark", config.p_dark);
  report.add("rule", std::string(protocol::to_string(config.mode)));
  report.add("double_click_policy", std::string(protocol::to_string(config.double_click_policy)));
  if (config.mode == protocol::DecisionRule::robust) {
    report.add("threshold_source", std::string(to_string(config.threshold_source)));
    report.add("delta_q_convention", std::string(analysis::to_string(config.delta_q_convention)));
    report.add("q_E", rule.q_e);
    report.add("delta_q", rule.delta_q);
    report.add("threshold", rule.q_e - rule.delta_q);
  }
  report.add("pair", pair_source);
  if (agree_count) report.add_count("agree_count", *agree_count);
  report.add_count("trials", est.trials);
  report.add_count("seed", *config.master_seed);
  report.add_count("total_zeros", est.totals.zeros);
  report.add_count("total_clicks", est.totals.clicks);
  report.add_count("total_no_click", est.totals.no_click);
  report.add_count("total_double_click", est.totals.double_click);
  report.add("mean_clicks_per_run", static_cast<double>(est.totals.clicks) / static_cast<double>(est.trials));
  report.add_count("verdict_equal", est.verdict_equal);
  report.add_count("verdict_different", est.verdict_different);
  report.add_count("inconclusive", est.inconclusive);
  report.add_count("errors", est.errors);
  report.add("empirical_error_rate", est.rate);
  report.add("std_err", est.std_err);
  report.add("analytic_bound", bound);
  if (agree_count) {
    const std::size_t cap =
        config.mode == protocol::DecisionRule::robust ? kRobustExactCap : protocol::kDefaultExactCapacity;
    if (spec.m <= cap) {
      report.add("exact_error", protocol::exact_error_probability(params, *agree_count, rule, cap));
    } else {
      report.add("exact_error", "skipped (m above exact cap " + std::to_string(cap) + ")");
    }
  }
  write_to(config, out, [&](std::ostream& os) { report.write(config.format, os); });
}

void cmd_sweep(const ExperimentConfig& config, std::ostream& out) {
  const auto rows = compute_sweep(config);
  write_to(config, out, [&](std::ostream& os) { write_sweep(rows, config.format, os); });
}

void cmd_bounds(const ExperimentConfig& config, std::ostream& out) {
  config.validate();
  const double delta = analytic_delta(config);
  const Count m = analysis::modes_for(config.n, config.c);
  const protocol::ProtocolParams params{config.alpha_sq, config.eta, config.nu, config.p_dark,
                                        static_cast<std::size_t>(m)};
  using analysis::DeltaQConvention;
  using analysis::EffectiveClickMode;
  const auto printed = analysis::expected_fractions(params, delta, DeltaQConvention::printed, config.click_mode);
  const auto halved = analysis::expected_fractions(params, delta, DeltaQConvention::halved, config.click_mode);
  const auto exact_click =
      analysis::expected_fractions(params, delta, config.delta_q_convention, EffectiveClickMode::exact);
  const auto& selected = config.delta_q_convention == DeltaQConvention::printed ? printed : halved;
  const double detected = params.detected_alpha_sq();
  const auto dim = analysis::dimension_report(config.alpha_sq, config.eps_trace, m);

  Report report;
  report.add_count("n", config.n);
  report.add_count("m", m);
  report.add("c", config.c);
  report.add("delta", delta);
  report.add("alpha_sq", config.alpha_sq);
  report.add("alpha_sq_detected", detected);
  report.add("p_c", printed.p_c);
  report.add("p_c_eff_approximate", std::min(1.0, printed.p_c + config.p_dark));
  report.add("p_c_eff_exact", exact_click.p_c_eff);
  report.add("q_E", printed.q_e);
  report.add("q_D", printed.q_d);
  report.add("delta_q_printed", printed.delta_q);
  report.add("delta_q_halved", halved.delta_q);
  report.add("delta_q_convention", std::string(analysis::to_string(config.delta_q_convention)));
  report.add("ideal_bound", analysis::ideal_error_bound(m, printed.p_c, delta));
  report.add("ideal_asymptote", analysis::ideal_error_asymptote(detected, delta));
  report.add("robust_bound", analysis::robust_error_bound(m, selected.p_c_eff, selected.delta_q));
  report.add("robust_asymptote",
             analysis::robust_error_asymptote(
                 detected, analysis::delta_q_without_dark_counts(config.nu, delta, config.delta_q_convention)));
  report.add_count("delta_n", dim.delta_n);
  report.add("eps_prime", dim.eps_prime);
  report.add("eps", dim.eps);
  report.add("log2_dim", dim.log2_dim);
  report.add("log2_dim_loose", analysis::dimension_bound_loose(config.alpha_sq, dim.delta_n, m));
  write_to(config, out, [&](std::ostream& os) { report.write(config.format, os); });
}

void cmd_optimize(const ExperimentConfig& config, std::ostream& out) {
  config.validate();
  const double delta = analytic_delta(config);
  const analysis::NoiseModel noise = noise_model(config);

  analysis::PhotonSolveOptions ideal;
  ideal.mode = analysis::BoundMode::ideal;
  const double alpha_ideal = analysis::required_mean_photon_number(config.target_error, delta, {}, ideal);

  analysis::PhotonSolveOptions robust;
  robust.mode = analysis::BoundMode::robust;
  robust.convention = config.delta_q_convention;
  robust.click_mode = config.click_mode;
  double alpha_robust = 0.0;
  try {
    alpha_robust = analysis::required_mean_photon_number(config.target_error, delta, noise, robust);
  } catch (const InfeasibleError&) {
    throw InfeasibleError("robust mode infeasible: visibility nu = " + format_real(config.nu) +
                          " leaves no margin between q_E and q_D");
  }

  Report report;
  report.add("target_error", config.target_error);
  report.add("delta", delta);
  report.add("ideal_alpha_sq", alpha_ideal);
  report.add("ideal_total_mean_photon_number", 2.0 * alpha_ideal);
  report.add("robust_delta_q_convention", std::string(analysis::to_string(config.delta_q_convention)));
  report.add("robust_regime", "p_c >> p_dark (m -> infinity)");
  report.add("robust_eta", config.eta);
  report.add("robust_nu", config.nu);
  report.add("robust_alpha_sq", alpha_robust);
  report.add("robust_alpha_sq_detected", config.eta * alpha_robust);
  report.add("robust_total_mean_photon_number", 2.0 * alpha_robust);
  report.add("reference_alpha_sq_ideal", 88.8);
  report.add("reference_alpha_sq_noisy", 6651.0);
  report.add("ideal_relative_deviation", alpha_ideal / 88.8 - 1.0);
  report.add("robust_relative_deviation", alpha_robust / 6651.0 - 1.0);

  if (config.p_dark > 0.0) {
    // Finite-m solve at the configured n, where dark counts enter.
    const Count m = analysis::modes_for(config.n, config.c);
    analysis::PhotonSolveOptions finite = robust;
    finite.m = m;
    report.add_count("finite_m", m);
    try {
      report.add("robust_alpha_sq_finite_m",
                 analysis::required_mean_photon_number(config.target_error, delta, noise, finite));
    } catch (const InfeasibleError&) {
      throw InfeasibleError("robust mode infeasible at m = " + std::to_string(m) +
                            ": dark counts (p_dark = " + format_real(config.p_dark) +
                            ") dominate the click statistics");
    }
  }
  write_to(config, out, [&](std::ostream& os) { report.write(config.format, os); });
}

}  // namespace qfp::cli
