#include "qfp/codes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "qfp/errors.hpp"
#include "qfp/rng.hpp"

namespace qfp::codes {

namespace {

constexpr std::size_t kMaxLinearBackendN = 16;
constexpr std::size_t kMaxRejectionAttempts = 100000;
constexpr std::size_t kMaxPairwiseN = 12;

// Minimum weight over all nonzero combinations of `rows` (Gray-code walk).
std::size_t min_nonzero_weight(const std::vector<BitString>& rows, std::size_t m) {
  BitString word(m);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  const std::uint64_t count = std::uint64_t{1} << rows.size();
  for (std::uint64_t g = 1; g < count; ++g) {
    word ^= rows[static_cast<std::size_t>(std::countr_zero(g))];
    best = std::min(best, word.popcount());
  }
  return best;
}

}  // namespace

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::justesen:
      return "justesen";
    case Backend::random_linear:
      return "random_linear";
    case Backend::repetition:
      return "repetition";
  }
  return "unknown";
}

Backend parse_backend(std::string_view name) {
  if (name == "justesen") return Backend::justesen;
  if (name == "random_linear") return Backend::random_linear;
  if (name == "repetition") return Backend::repetition;
  throw ParameterError("unknown code backend '" + std::string(name) + "'");
}

double justesen_delta_bound(double c) {
  if (!(c > 2.0)) throw ParameterError("Justesen distance bound requires c > 2, got " + std::to_string(c));
  return 0.9 + 1.0 / (15.0 * c);
}

std::size_t distance_floor(const CodeSpec& spec) {
  const double raw = (1.0 - spec.delta) * static_cast<double>(spec.m);
  // Absorb rounding in (1 - delta) * m so that e.g. delta = 83/90, m = 90 gives 7.
  return static_cast<std::size_t>(std::ceil(raw - 1e-9));
}

JustesenLayout choose_justesen_layout(std::size_t n, double c) {
  if (!(c > 2.0)) throw ParameterError("Justesen backend requires c > 2, got " + std::to_string(c));
  if (n == 0) throw ParameterError("input length n must be at least 1");
  for (unsigned k = 2; k <= 16; ++k) {
    const std::size_t outer_length = (std::size_t{1} << k) - 1;
    const auto dimension =
        static_cast<std::size_t>(std::llround(2.0 * static_cast<double>(outer_length) / c));
    if (dimension < 1 || dimension >= outer_length) continue;
    if (dimension * k >= n) return {k, outer_length, dimension};
  }
  throw ParameterError("no Justesen layout with k <= 16 holds n = " + std::to_string(n) +
                       " at c = " + std::to_string(c));
}

struct Code::Impl {
  CodeRequest request;
  std::optional<JustesenLayout> layout;
  std::optional<GaloisField> field;
  std::vector<BitString> generator;  // random_linear rows
};

Code::~Code() = default;
Code::Code(Code&&) noexcept = default;
Code& Code::operator=(Code&&) noexcept = default;

Code::Code(const CodeRequest& request) {
  auto impl = std::make_unique<Impl>();
  impl->request = request;
  if (request.n == 0) throw ParameterError("input length n must be at least 1");

  switch (request.backend) {
    case Backend::justesen: {
      const JustesenLayout layout = choose_justesen_layout(request.n, request.c);
      impl->layout = layout;
      impl->field.emplace(layout.symbol_bits);
      spec_.n = layout.outer_dimension * layout.symbol_bits;
      spec_.m = 2 * layout.symbol_bits * layout.outer_length;
      spec_.c = static_cast<double>(spec_.m) / static_cast<double>(spec_.n);
      spec_.delta = justesen_delta_bound(spec_.c);
      break;
    }
    case Backend::repetition: {
      if (request.m < request.n || request.m % request.n != 0) {
        throw ParameterError("repetition backend needs m to be a positive multiple of n");
      }
      spec_.n = request.n;
      spec_.m = request.m;
      spec_.c = static_cast<double>(spec_.m) / static_cast<double>(spec_.n);
      // Two messages differing in one bit agree on all but m/n positions.
      spec_.delta = 1.0 - 1.0 / static_cast<double>(spec_.n);
      break;
    }
    case Backend::random_linear: {
      if (request.n > kMaxLinearBackendN) {
        throw ParameterError("random_linear backend supports n <= 16 only");
      }
      if (request.m < request.n) throw ParameterError("random_linear backend needs m >= n");
      if (!(request.delta > 0.0 && request.delta < 1.0)) {
        throw ParameterError("random_linear backend needs delta in (0, 1)");
      }
      spec_.n = request.n;
      spec_.m = request.m;
      spec_.c = static_cast<double>(spec_.m) / static_cast<double>(spec_.n);
      spec_.delta = request.delta;
      const std::size_t floor = distance_floor(spec_);
      for (std::size_t attempt = 0;; ++attempt) {
        if (attempt == kMaxRejectionAttempts) {
          throw ParameterError("no random linear code met distance " + std::to_string(floor) + " within " +
                               std::to_string(kMaxRejectionAttempts) + " attempts");
        }
        RandomStream stream(mix64(request.seed, attempt));
        std::vector<BitString> rows(spec_.n, BitString(spec_.m));
        for (auto& row : rows) {
          for (std::size_t j = 0; j < spec_.m; ++j) row.set(j, (stream() >> 63) != 0);
        }
        if (min_nonzero_weight(rows, spec_.m) >= floor) {
          impl->generator = std::move(rows);
          break;
        }
      }
      break;
    }
  }
  spec_.backend = request.backend;
  impl_ = std::move(impl);
}

std::optional<JustesenLayout> Code::justesen_layout() const { return impl_->layout; }

Codeword Code::encode(const BitString& x) const {
  if (x.size() > spec_.n) {
    throw InputSizeError("input has " + std::to_string(x.size()) + " bits, code accepts at most " +
                         std::to_string(spec_.n));
  }
  const BitString input = x.size() == spec_.n ? x : x.resized(spec_.n);
  BitString out(spec_.m);

  switch (spec_.backend) {
    case Backend::repetition: {
      const std::size_t repeat = spec_.m / spec_.n;
      for (std::size_t i = 0; i < spec_.n; ++i) {
        if (!input.get(i)) continue;
        for (std::size_t r = 0; r < repeat; ++r) out.set(i * repeat + r, true);
      }
      break;
    }
    case Backend::random_linear: {
      for (std::size_t i = 0; i < spec_.n; ++i) {
        if (input.get(i)) out ^= impl_->generator[i];
      }
      break;
    }
    case Backend::justesen: {
      const JustesenLayout& layout = *impl_->layout;
      const GaloisField& field = *impl_->field;
      const unsigned k = layout.symbol_bits;

      std::vector<GaloisField::Element> message(layout.outer_dimension, 0);
      for (std::size_t j = 0; j < message.size(); ++j) {
        GaloisField::Element symbol = 0;
        for (unsigned b = 0; b < k; ++b) symbol = (symbol << 1) | (input.get(j * k + b) ? 1U : 0U);
        message[j] = symbol;
      }

      auto write_symbol = [&](std::size_t offset, GaloisField::Element symbol) {
        for (unsigned b = 0; b < k; ++b) {
          if ((symbol >> (k - 1 - b)) & 1U) out.set(offset + b, true);
        }
      };

      for (std::size_t i = 0; i < layout.outer_length; ++i) {
        // Reed-Solomon: evaluate the message polynomial at alpha^i (Horner).
        const GaloisField::Element point = field.exp(static_cast<std::uint32_t>(i));
        GaloisField::Element value = 0;
        for (std::size_t j = message.size(); j-- > 0;) {
          value = GaloisField::add(field.mul(value, point), message[j]);
        }
        // Wozencraft inner map u -> (u, beta_i * u), beta_i the i-th nonzero element.
        const auto beta = static_cast<GaloisField::Element>(i + 1);
        write_symbol(2 * k * i, value);
        write_symbol(2 * k * i + k, field.mul(beta, value));
      }
      break;
    }
  }
  return Codeword{std::move(out), spec_};
}

BitString message_from_index(std::size_t n, std::uint64_t index) {
  BitString out(n);
  for (std::size_t j = 0; j < n && j < 64; ++j) {
    if ((index >> (n - 1 - j)) & 1U) out.set(j, true);
  }
  return out;
}

MinDistanceReport verify_min_distance(const Code& code, std::size_t max_exhaustive_n, std::size_t samples,
                                      std::uint64_t seed) {
  const CodeSpec& spec = code.spec();
  MinDistanceReport report;
  report.min_distance = std::numeric_limits<std::size_t>::max();

  if (spec.n <= max_exhaustive_n && spec.n <= kMaxLinearBackendN) {
    report.exhaustive = true;
    const std::uint64_t count = std::uint64_t{1} << spec.n;
    std::vector<BitString> words;
    words.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t i = 0; i < count; ++i) words.push_back(code.encode(message_from_index(spec.n, i)).bits);
    if (spec.n <= kMaxPairwiseN) {
      for (std::size_t a = 0; a < words.size(); ++a) {
        for (std::size_t b = a + 1; b < words.size(); ++b) {
          report.min_distance = std::min(report.min_distance, hamming_distance(words[a], words[b]));
        }
      }
    } else {
      // Every backend is GF(2)-linear, so the minimum pairwise distance is the
      // minimum weight of a nonzero codeword.
      for (std::size_t a = 1; a < words.size(); ++a) {
        report.min_distance = std::min(report.min_distance, words[a].popcount());
      }
    }
  } else {
    report.exhaustive = false;
    for (std::size_t s = 0; s < samples; ++s) {
      RandomStream stream(mix64(seed, s));
      BitString x(spec.n);
      BitString y(spec.n);
      for (std::size_t j = 0; j < spec.n; ++j) {
        x.set(j, (stream() >> 63) != 0);
        y.set(j, (stream() >> 63) != 0);
      }
      if (x == y) y.flip(stream.below(spec.n));
      report.min_distance = std::min(report.min_distance, hamming_distance(code.encode(x).bits, code.encode(y).bits));
    }
  }
  report.min_relative_distance = static_cast<double>(report.min_distance) / static_cast<double>(spec.m);
  return report;
}

}  // namespace qfp::codes
