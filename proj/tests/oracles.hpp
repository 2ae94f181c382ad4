#pragma once

// Brute-force reference computations shared by the unit and acceptance
// tests. Nothing here calls into the library's own numerics.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qfp/bitstring.hpp"

namespace oracle {

inline std::size_t naive_hamming(const qfp::BitString& a, const qfp::BitString& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a.get(i) != b.get(i);
  return d;
}

// Slot law written out from the detector model: photon click with prob pc,
// routed to the parity-correct detector with prob nu, independent dark
// counts with prob pd on each detector. Index: none, "0", "1", both.
struct Law {
  double p[4];
};

inline Law slot_law(double pc, double nu, double pd, bool agree) {
  Law out{{0, 0, 0, 0}};
  // Enumerate photon (none / correct / wrong) x dark0 x dark1.
  for (int photon = 0; photon < 3; ++photon) {
    const double pp = photon == 0 ? 1 - pc : (photon == 1 ? pc * nu : pc * (1 - nu));
    for (int d0 = 0; d0 < 2; ++d0) {
      for (int d1 = 0; d1 < 2; ++d1) {
        const double p = pp * (d0 ? pd : 1 - pd) * (d1 ? pd : 1 - pd);
        // correct detector is "0" when bits agree
        const bool hit_zero = photon != 0 && ((photon == 1) == agree);
        const bool hit_one = photon != 0 && !hit_zero;
        const bool z = hit_zero || d0;
        const bool o = hit_one || d1;
        out.p[(z ? 1 : 0) + (o ? 2 : 0)] += p;
      }
    }
  }
  return out;
}

struct PatternStats {
  std::size_t zeros = 0;
  std::size_t ones = 0;
  std::size_t doubles = 0;
};

// Visits every one of the 4^m outcome patterns with its probability. The
// first `agree` slots carry agreeing codeword bits.
inline void enumerate_patterns(std::size_t m, std::size_t agree, const Law& agree_law, const Law& disagree_law,
                               const std::function<void(const PatternStats&, double)>& visit) {
  std::function<void(std::size_t, PatternStats, double)> rec = [&](std::size_t slot, PatternStats s, double p) {
    if (slot == m) {
      visit(s, p);
      return;
    }
    const Law& law = slot < agree ? agree_law : disagree_law;
    for (int o = 0; o < 4; ++o) {
      PatternStats next = s;
      if (o == 1) ++next.zeros;
      if (o == 2) ++next.ones;
      if (o == 3) ++next.doubles;
      rec(slot + 1, next, p * law.p[o]);
    }
  };
  rec(0, {}, 1.0);
}

// P(|N - a| >= dn) for N ~ Poisson(a), by summing the pmf term by term.
inline double poisson_two_sided_tail(double a, std::uint64_t dn) {
  if (a == 0.0) return dn == 0 ? 1.0 : 0.0;
  const double d = static_cast<double>(dn);
  const auto last = static_cast<std::uint64_t>(a + d + 40.0 * std::sqrt(a + 1.0) + 200.0);
  double tail = 0.0;
  for (std::uint64_t k = 0; k <= last; ++k) {
    const double kd = static_cast<double>(k);
    if (std::fabs(kd - a) < d) continue;
    tail += std::exp(-a + kd * std::log(a) - std::lgamma(kd + 1.0));
  }
  return tail;
}

// Binomials and the hypergeometric pmf as plain products (fine for m <= 60).
inline double binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

inline double hypergeom(std::uint64_t m, std::uint64_t agree, std::uint64_t k, std::uint64_t l) {
  return binom(agree, l) * binom(m - agree, k - l) / binom(m, k);
}

// Number of ways to place at most `top` photons in m modes, counted by
// explicit recursion over modes.
inline std::uint64_t count_mode_states(std::uint64_t top, std::uint64_t m) {
  if (m == 1) return top + 1;
  std::uint64_t total = 0;
  for (std::uint64_t first = 0; first <= top; ++first) total += count_mode_states(top - first, m - 1);
  return total;
}

}  // namespace oracle
