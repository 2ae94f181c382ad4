#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "qfp/bitstring.hpp"
#include "qfp/codes.hpp"
#include "qfp/protocol.hpp"
#include "qfp/rng.hpp"

namespace qfp::baseline {

// Classical SMP fingerprinting cost: each round sends 2 sqrt(n) + constant
// bits and fails with probability per_round_error; rounds repeat until the
// failure probability reaches the target.
struct ClassicalCostModel {
  double constant_bits = 0.0;
  double per_round_error = 0.25;
  std::optional<std::uint64_t> repetitions;  // overrides the derived count
};

// ceil(log(target) / log(per_round_error)); 10 for the defaults at 1e-6.
std::uint64_t repetitions_for(double target_error, double per_round_error);

double per_round_bits(std::uint64_t n, const ClassicalCostModel& model = {});

// repetitions * (2 sqrt(n) + constant). Throws ParameterError unless target in (0, 1).
double classical_cost(std::uint64_t n, double target_error, const ClassicalCostModel& model = {});

// Side of the square grid holding an m-bit codeword (zero padded).
std::size_t grid_side(std::size_t m);

// Bits per round of the grid protocol: 2 (side + ceil(log2 side)).
std::uint64_t grid_round_bits(std::size_t m);

// Runs the grid protocol on two codewords: each round Alice sends a uniformly
// random row, Bob an independent uniformly random column, and the referee
// compares the intersection bit. Different iff some round mismatches.
protocol::Verdict grid_protocol_trial(const BitString& ex, const BitString& ex_prime, std::size_t rounds,
                                      RandomStream& rng);

// Encodes x and x_prime with `code` first.
protocol::Verdict grid_protocol_trial(const codes::Code& code, const BitString& x, const BitString& x_prime,
                                      std::size_t rounds, RandomStream& rng);

// Exact single-round mismatch probability: averages over every (row, column)
// pair of the padded grid.
double grid_mismatch_probability(const BitString& ex, const BitString& ex_prime);

}  // namespace qfp::baseline
