#include "qfp/baseline.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "qfp/errors.hpp"

namespace qfp::baseline {

std::uint64_t repetitions_for(double target_error, double per_round_error) {
  if (!(target_error > 0.0 && target_error < 1.0)) throw ParameterError("target error must lie in (0, 1)");
  if (!(per_round_error > 0.0 && per_round_error < 1.0)) {
    throw ParameterError("per-round error must lie in (0, 1)");
  }
  const double raw = std::log(target_error) / std::log(per_round_error);
  // Tolerate round-off when the ratio is an exact integer.
  const auto reps = static_cast<std::uint64_t>(std::ceil(raw - 1e-12));
  return reps == 0 ? 1 : reps;
}

double per_round_bits(std::uint64_t n, const ClassicalCostModel& model) {
  if (n < 1) throw ParameterError("n must be at least 1");
  return 2.0 * std::sqrt(static_cast<double>(n)) + model.constant_bits;
}

double classical_cost(std::uint64_t n, double target_error, const ClassicalCostModel& model) {
  if (!(target_error > 0.0 && target_error < 1.0)) throw ParameterError("target error must lie in (0, 1)");
  const std::uint64_t reps = model.repetitions ? *model.repetitions : repetitions_for(target_error, model.per_round_error);
  return static_cast<double>(reps) * per_round_bits(n, model);
}

std::size_t grid_side(std::size_t m) {
  auto side = static_cast<std::size_t>(std::sqrt(static_cast<double>(m)));
  while (side * side < m) ++side;
  while (side > 0 && (side - 1) * (side - 1) >= m) --side;
  return side;
}

std::uint64_t grid_round_bits(std::size_t m) {
  const std::size_t side = grid_side(m);
  const auto index_bits = side <= 1 ? 0U : static_cast<unsigned>(std::bit_width(side - 1));
  return 2 * (static_cast<std::uint64_t>(side) + index_bits);
}

namespace {

void check_lengths(const BitString& ex, const BitString& ex_prime) {
  if (ex.size() != ex_prime.size()) {
    throw DimensionError("codeword lengths " + std::to_string(ex.size()) + " and " + std::to_string(ex_prime.size()));
  }
  if (ex.empty()) throw DimensionError("empty codewords");
}

// Padded cells past m hold zero in both grids.
bool cell(const BitString& word, std::size_t index) { return index < word.size() && word.get(index); }

}  // namespace

protocol::Verdict grid_protocol_trial(const BitString& ex, const BitString& ex_prime, std::size_t rounds,
                                      RandomStream& rng) {
  check_lengths(ex, ex_prime);
  const std::size_t side = grid_side(ex.size());
  for (std::size_t r = 0; r < rounds; ++r) {
    const std::size_t row = rng.below(side);     // Alice's row of E(x)
    const std::size_t column = rng.below(side);  // Bob's column of E(x')
    const std::size_t index = row * side + column;
    if (cell(ex, index) != cell(ex_prime, index)) return protocol::Verdict::different;
  }
  return protocol::Verdict::equal;
}

protocol::Verdict grid_protocol_trial(const codes::Code& code, const BitString& x, const BitString& x_prime,
                                      std::size_t rounds, RandomStream& rng) {
  return grid_protocol_trial(code.encode(x).bits, code.encode(x_prime).bits, rounds, rng);
}

double grid_mismatch_probability(const BitString& ex, const BitString& ex_prime) {
  check_lengths(ex, ex_prime);
  const std::size_t side = grid_side(ex.size());
  std::size_t mismatches = 0;
  for (std::size_t row = 0; row < side; ++row) {
    for (std::size_t column = 0; column < side; ++column) {
      const std::size_t index = row * side + column;
      if (cell(ex, index) != cell(ex_prime, index)) ++mismatches;
    }
  }
  return static_cast<double>(mismatches) / static_cast<double>(side * side);
}

}  // namespace qfp::baseline
