#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "oracles.hpp"
#include "qfp/codes.hpp"
#include "qfp/errors.hpp"
#include "qfp/rng.hpp"

using namespace qfp;
using namespace qfp::codes;

namespace {

CodeRequest repetition(std::size_t n, std::size_t m) {
  CodeRequest r;
  r.backend = Backend::repetition;
  r.n = n;
  r.m = m;
  return r;
}

CodeRequest random_linear(std::size_t n, std::size_t m, double delta, std::uint64_t seed) {
  CodeRequest r;
  r.backend = Backend::random_linear;
  r.n = n;
  r.m = m;
  r.delta = delta;
  r.seed = seed;
  return r;
}

CodeRequest justesen(std::size_t n, double c) {
  CodeRequest r;
  r.backend = Backend::justesen;
  r.n = n;
  r.c = c;
  return r;
}

BitString random_bits(std::size_t n, RandomStream& rng) {
  BitString out(n);
  for (std::size_t i = 0; i < n; ++i) out.set(i, (rng() >> 63) != 0);
  return out;
}

// Minimum distance over all codeword pairs, computed pair by pair.
std::size_t brute_min_distance(const Code& code) {
  const std::size_t n = code.spec().n;
  std::vector<BitString> words;
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i) words.push_back(code.encode(message_from_index(n, i)).bits);
  std::size_t best = code.spec().m;
  for (std::size_t a = 0; a < words.size(); ++a)
    for (std::size_t b = a + 1; b < words.size(); ++b) best = std::min(best, oracle::naive_hamming(words[a], words[b]));
  return best;
}

}  // namespace

TEST_CASE("justesen delta bound") {
  CHECK(justesen_delta_bound(3.0) == doctest::Approx(0.9 + 1.0 / 45.0).epsilon(1e-15));
  CHECK(justesen_delta_bound(3.0) == doctest::Approx(83.0 / 90.0));
  CHECK(justesen_delta_bound(2.5) == doctest::Approx(0.9266666666666667));
  CHECK(justesen_delta_bound(1e12) == doctest::Approx(0.9));
  CHECK_THROWS_AS(justesen_delta_bound(2.0), ParameterError);
  CHECK_THROWS_AS(justesen_delta_bound(1.0), ParameterError);
}

TEST_CASE("distance floor absorbs rounding") {
  CodeSpec s;
  s.m = 90;
  s.delta = 83.0 / 90.0;
  CHECK(distance_floor(s) == 7);
  s.m = 4080;
  s.delta = justesen_delta_bound(3.0);
  CHECK(distance_floor(s) == 318);
}

TEST_CASE("repetition code") {
  const Code code(repetition(1, 3));
  CHECK(code.encode(BitString::from_string("0")).bits.to_string() == "000");
  CHECK(code.encode(BitString::from_string("1")).bits.to_string() == "111");
  CHECK(code.spec().delta == 0.0);
  const auto report = verify_min_distance(code, 12);
  CHECK(report.exhaustive);
  CHECK(report.min_relative_distance == 1.0);

  const Code four(repetition(4, 12));
  CHECK(four.encode(BitString::from_string("1010")).bits.to_string() == "111000111000");
  CHECK(four.encode(BitString::from_string("1")).bits.to_string() == "111000000000");
  CHECK_THROWS_AS(four.encode(BitString::from_string("10101")), InputSizeError);
  CHECK_THROWS_AS(Code(repetition(4, 10)), ParameterError);
}

TEST_CASE("exhaustive min distance meets stored delta exactly") {
  for (std::size_t n = 1; n <= 6; ++n) {
    for (std::size_t r = 1; r <= 3; ++r) {
      const Code code(repetition(n, n * r));
      CAPTURE(n);
      CAPTURE(r);
      const auto report = verify_min_distance(code, 12);
      CHECK(report.exhaustive);
      CHECK(report.min_distance == brute_min_distance(code));
      CHECK(report.min_distance == distance_floor(code.spec()));
    }
  }
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Code code(random_linear(8, 24, 0.75, seed));
    const auto report = verify_min_distance(code, 12);
    CHECK(report.exhaustive);
    CHECK(report.min_distance == brute_min_distance(code));
    CHECK(report.min_distance >= distance_floor(code.spec()));
    CHECK(report.min_relative_distance >= 1.0 - code.spec().delta - 1e-12);
  }
}

TEST_CASE("random_linear min-weight path for 12 < n <= 16") {
  const Code code(random_linear(13, 52, 0.8, 5));
  const auto report = verify_min_distance(code, 16);
  CHECK(report.exhaustive);
  CHECK(report.min_distance >= distance_floor(code.spec()));
  CHECK_THROWS_AS(Code(random_linear(17, 60, 0.8, 0)), ParameterError);
  // Impossible floor: every nonzero codeword would need weight m.
  CHECK_THROWS_AS(Code(random_linear(4, 4, 0.01, 0)), ParameterError);
}

TEST_CASE("random_linear is deterministic in its seed") {
  const Code a(random_linear(6, 20, 0.7, 42));
  const Code b(random_linear(6, 20, 0.7, 42));
  for (std::uint64_t i = 0; i < 64; ++i) CHECK(a.encode(message_from_index(6, i)).bits == b.encode(message_from_index(6, i)).bits);
}

TEST_CASE("justesen layout for n = 1024, c = 3") {
  const auto layout = choose_justesen_layout(1024, 3.0);
  CHECK(layout.symbol_bits == 8);
  CHECK(layout.outer_length == 255);
  CHECK(layout.outer_dimension == 170);
  const Code code(justesen(1024, 3.0));
  CHECK(code.spec().n == 1360);
  CHECK(code.spec().m == 4080);
  CHECK(code.spec().c == doctest::Approx(3.0));
  CHECK(code.spec().delta == doctest::Approx(justesen_delta_bound(3.0)));
  CHECK_THROWS_AS(Code(justesen(16, 2.0)), ParameterError);
}

TEST_CASE("justesen encoder matches frozen golden vectors") {
  const std::filesystem::path dir = QFP_GOLDEN_DIR;
  const Code code(justesen(1024, 3.0));
  for (const std::string stem : {"justesen_n1024_c3", "justesen_n1024_c3_unit"}) {
    CAPTURE(stem);
    const auto input = read_bitstring_file(dir / (stem + "_input.qfp"));
    const auto expected = read_bitstring_file(dir / (stem + "_codeword.qfp"));
    CHECK(input.size() == 1024);
    CHECK(code.encode(input).bits == expected);
  }
}

TEST_CASE("justesen linearity and sampled distance") {
  const Code code(justesen(1024, 3.0));
  RandomStream rng(99);
  const double floor_fraction = 1.0 - code.spec().delta;
  for (int t = 0; t < 1000; ++t) {
    const auto x = random_bits(1024, rng);
    const auto y = random_bits(1024, rng);
    const auto ex = code.encode(x).bits;
    const auto ey = code.encode(y).bits;
    CHECK(code.encode(x ^ y).bits == (ex ^ ey));
    if (x != y) {
      CHECK(static_cast<double>(oracle::naive_hamming(ex, ey)) / 4080.0 >= floor_fraction);
    }
  }
  const auto report = verify_min_distance(code, 16, 200, 3);
  CHECK_FALSE(report.exhaustive);
  CHECK(report.min_relative_distance >= 0.4);
}

TEST_CASE("justesen low-weight inputs keep the distance floor") {
  // Single-bit inputs are the lightest messages of the linear code.
  const Code code(justesen(64, 3.0));
  const std::size_t floor = distance_floor(code.spec());
  for (std::size_t i = 0; i < code.spec().n; ++i) {
    BitString x(code.spec().n);
    x.set(i, true);
    CHECK(code.encode(x).bits.popcount() >= floor);
  }
}

TEST_CASE("random_linear linearity") {
  const Code code(random_linear(10, 40, 0.75, 1));
  RandomStream rng(4);
  for (int t = 0; t < 1000; ++t) {
    const auto x = random_bits(10, rng);
    const auto y = random_bits(10, rng);
    CHECK(code.encode(x ^ y).bits == (code.encode(x).bits ^ code.encode(y).bits));
  }
}

TEST_CASE("short inputs are zero padded") {
  const Code code(justesen(1024, 3.0));
  const auto short_x = BitString::from_string("1011");
  CHECK(code.encode(short_x).bits == code.encode(short_x.resized(1360)).bits);
  CHECK(code.encode(short_x).bits.size() == code.spec().m);
  CHECK(code.encode(short_x).source_spec.m == 4080);
}

TEST_CASE("message_from_index counts with the first bit most significant") {
  CHECK(message_from_index(4, 1).to_string() == "0001");
  CHECK(message_from_index(4, 8).to_string() == "1000");
  CHECK(message_from_index(3, 5).to_string() == "101");
}

TEST_CASE("backend names round trip") {
  for (auto b : {Backend::justesen, Backend::random_linear, Backend::repetition}) CHECK(parse_backend(to_string(b)) == b);
  CHECK_THROWS_AS(parse_backend("hamming"), ParameterError);
}
