#include "qfp/gf2k.hpp"

#include <string>

#include "qfp/errors.hpp"

namespace qfp::codes {

namespace {

// True when x has multiplicative order 2^k - 1 modulo `poly`.
bool generates_field(std::uint32_t poly, unsigned k) {
  const std::uint32_t top = 1U << k;
  const std::uint32_t group = top - 1;
  std::uint32_t value = 1;
  for (std::uint32_t e = 1; e <= group; ++e) {
    value <<= 1;
    if (value & top) value ^= poly;
    if (value == 1) return e == group;
  }
  return false;
}

}  // namespace

std::uint32_t first_primitive_polynomial(unsigned k) {
  if (k < 2 || k > 16) throw ParameterError("GF(2^k) requires 2 <= k <= 16, got " + std::to_string(k));
  const std::uint32_t top = 1U << k;
  // Constant term must be 1 or x divides the polynomial.
  for (std::uint32_t poly = top | 1U; poly < (top << 1); poly += 2) {
    if (generates_field(poly, k)) return poly;
  }
  throw ParameterError("no primitive polynomial found");  // unreachable for valid k
}

GaloisField::GaloisField(unsigned k)
    : k_(k), order_(1U << k), modulus_(first_primitive_polynomial(k)), exp_(2 * (order_ - 1)), log_(order_, 0) {
  Element value = 1;
  for (std::uint32_t e = 0; e < order_ - 1; ++e) {
    exp_[e] = value;
    exp_[e + order_ - 1] = value;
    log_[value] = e;
    value <<= 1;
    if (value & order_) value ^= modulus_;
  }
}

}  // namespace qfp::codes
