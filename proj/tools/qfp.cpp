// qfp: command-line front end for the fingerprinting library.
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qfp/errors.hpp"
#include "qfp/experiment.hpp"

namespace {

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> mode;
  std::optional<std::string> convention;
  std::optional<std::string> double_click;
  std::optional<unsigned> threads;
  std::vector<std::string> settings;
};

qfp::cli::ExperimentConfig resolve(const Overrides& o) {
  using qfp::cli::apply_setting;
  qfp::cli::ExperimentConfig cfg = o.config ? qfp::cli::load_config(*o.config) : qfp::cli::parse_config("");
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw qfp::ParameterError("--set expects key=value, got '" + s + "'");
    apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.trials) cfg.trials = *o.trials;
  if (o.out) cfg.output = *o.out;
  if (o.format) apply_setting(cfg, "format", *o.format);
  if (o.mode) apply_setting(cfg, "mode", *o.mode);
  if (o.convention) apply_setting(cfg, "delta_q_convention", *o.convention);
  if (o.double_click) apply_setting(cfg, "double_click_policy", *o.double_click);
  if (o.threads) cfg.threads = *o.threads;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum fingerprinting with coherent states: encoder, simulator, bounds and sweeps"};
  app.require_subcommand(1);

  Overrides o;
  app.add_option("--config", o.config, "flat key = value config file");
  app.add_option("--seed", o.seed, "master seed for randomized commands");
  app.add_option("--trials", o.trials, "Monte Carlo trials");
  app.add_option("--out", o.out, "output path (stdout when absent)");
  app.add_option("--format", o.format, "csv or json");
  app.add_option("--mode", o.mode, "decision rule: ideal or robust");
  app.add_option("--delta-q-convention", o.convention, "printed or halved");
  app.add_option("--double-click-policy", o.double_click, "exclude or count-one");
  app.add_option("--threads", o.threads, "worker threads");
  app.add_option("--set", o.settings, "extra key=value config assignment (repeatable)");

  auto* encode = app.add_subcommand("encode", "encode a QFP1 input file into a QFP1 codeword file");
  std::string input;
  encode->add_option("input", input, "input bit string (QFP1)")->required();

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo runs of the protocol");
  std::optional<std::string> x_file;
  std::optional<std::string> x_prime_file;
  simulate->add_option("--x", x_file, "Alice's input (QFP1)");
  simulate->add_option("--x-prime", x_prime_file, "Bob's input (QFP1)");

  auto* sweep = app.add_subcommand("sweep", "transmitted information versus input size");
  auto* bounds = app.add_subcommand("bounds", "analytic quantities for one configuration");
  auto* optimize = app.add_subcommand("optimize", "mean photon number needed for the target error");

  CLI11_PARSE(app, argc, argv);

  try {
    if (encode->parsed()) {
      if (!o.out) throw qfp::ParameterError("encode requires --out for the codeword file");
      auto cfg = resolve(o);
      const std::filesystem::path output = *cfg.output;
      cfg.output.reset();
      qfp::cli::cmd_encode(cfg, input, output, std::cout);
    } else {
      const auto cfg = resolve(o);
      if (simulate->parsed()) {
        std::optional<std::filesystem::path> x;
        std::optional<std::filesystem::path> xp;
        if (x_file) x = *x_file;
        if (x_prime_file) xp = *x_prime_file;
        qfp::cli::cmd_simulate(cfg, x, xp, std::cout);
      } else if (sweep->parsed()) {
        qfp::cli::cmd_sweep(cfg, std::cout);
      } else if (bounds->parsed()) {
        qfp::cli::cmd_bounds(cfg, std::cout);
      } else if (optimize->parsed()) {
        qfp::cli::cmd_optimize(cfg, std::cout);
      }
    }
  } catch (const qfp::InfeasibleError& e) {
    std::cerr << "qfp: infeasible: " << e.what() << '\n';
    return 3;
  } catch (const qfp::Error& e) {
    std::cerr << "qfp: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qfp: unexpected error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
