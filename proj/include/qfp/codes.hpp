#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qfp/bitstring.hpp"
#include "qfp/gf2k.hpp"

namespace qfp::codes {

enum class Backend { justesen, random_linear, repetition };

std::string_view to_string(Backend backend);
Backend parse_backend(std::string_view name);

// Effective parameters of an instantiated binary code E: {0,1}^n -> {0,1}^m.
// Distinct codewords differ in at least (1 - delta) * m positions.
struct CodeSpec {
  std::size_t n = 0;
  std::size_t m = 0;
  double c = 0.0;      // m / n
  double delta = 0.0;  // guaranteed maximum agreement fraction
  Backend backend = Backend::repetition;
};

// What the caller asks for; the constructed Code reports what it delivered.
struct CodeRequest {
  Backend backend = Backend::justesen;
  std::size_t n = 0;
  double c = 3.0;         // justesen: target rate factor, must exceed 2
  std::size_t m = 0;      // random_linear, repetition: codeword length
  double delta = 0.75;    // random_linear: required agreement ceiling
  std::uint64_t seed = 0; // random_linear: generator-matrix seed
};

struct Codeword {
  BitString bits;
  CodeSpec source_spec;
};

// 9/10 + 1/(15c); throws ParameterError unless c > 2.
double justesen_delta_bound(double c);

// Minimum Hamming distance every pair of distinct codewords must meet.
std::size_t distance_floor(const CodeSpec& spec);

// Justesen parameters chosen for a request.
struct JustesenLayout {
  unsigned symbol_bits = 0;        // k, field GF(2^k)
  std::size_t outer_length = 0;    // N = 2^k - 1 Reed-Solomon symbols
  std::size_t outer_dimension = 0; // K message symbols
};

// Smallest field with K = round(2N/c), 1 <= K < N and K*k >= n.
JustesenLayout choose_justesen_layout(std::size_t n, double c);

// An instantiated code. Immutable after construction and safe to share
// across threads.
class Code {
 public:
  explicit Code(const CodeRequest& request);
  ~Code();
  Code(Code&&) noexcept;
  Code& operator=(Code&&) noexcept;

  const CodeSpec& spec() const { return spec_; }

  // Inputs shorter than n are zero-padded; longer inputs throw InputSizeError.
  Codeword encode(const BitString& x) const;

  std::optional<JustesenLayout> justesen_layout() const;

 private:
  struct Impl;
  CodeSpec spec_;
  std::unique_ptr<const Impl> impl_;
};

struct MinDistanceReport {
  double min_relative_distance = 0.0;
  bool exhaustive = false;
  std::size_t min_distance = 0;
};

// Exhaustive (all codeword pairs, n <= max_exhaustive_n) or sampled
// (`samples` random distinct pairs; an upper estimate of the true minimum).
MinDistanceReport verify_min_distance(const Code& code, std::size_t max_exhaustive_n,
                                      std::size_t samples = 1000, std::uint64_t seed = 0);

// All 2^n messages of length n in counting order; message i has its bits
// taken from i with the first bit as the most significant.
BitString message_from_index(std::size_t n, std::uint64_t index);

}  // namespace qfp::codes
