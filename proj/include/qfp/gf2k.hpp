#pragma once

#include <cstdint>
#include <vector>

namespace qfp::codes {

// Arithmetic in GF(2^k), 2 <= k <= 16, through log/antilog tables.
//
// The modulus is the lexicographically first primitive polynomial of degree
// k, i.e. the smallest integer with bit k set whose root x generates the
// multiplicative group. For reference the search yields
//   k=2: 0x7     k=3: 0xB     k=4: 0x13    k=5: 0x25    k=6: 0x43
//   k=7: 0x83    k=8: 0x11D   k=9: 0x211   k=10: 0x409  k=11: 0x805
//   k=12: 0x1053 k=13: 0x201B k=14: 0x402B k=15: 0x8003 k=16: 0x1002D
// (the unit tests pin these values).
class GaloisField {
 public:
  using Element = std::uint32_t;

  explicit GaloisField(unsigned k);

  unsigned degree() const { return k_; }
  std::uint32_t order() const { return order_; }  // 2^k
  std::uint32_t modulus() const { return modulus_; }

  static Element add(Element a, Element b) { return a ^ b; }

  Element mul(Element a, Element b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }

  // alpha^e for the primitive element alpha = x, e in [0, order-2].
  Element exp(std::uint32_t e) const { return exp_[e]; }

 private:
  unsigned k_;
  std::uint32_t order_;
  std::uint32_t modulus_;
  std::vector<Element> exp_;  // doubled so mul can skip a modulo
  std::vector<std::uint32_t> log_;
};

// Smallest primitive polynomial of degree k (as an integer with bit k set).
std::uint32_t first_primitive_polynomial(unsigned k);

}  // namespace qfp::codes
