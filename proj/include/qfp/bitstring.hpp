#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qfp {

// Packed bit sequence, MSB-first within each byte. Bits past `size()` in the
// final byte are always zero, so byte-wise comparison equals bit-wise equality.
class BitString {
 public:
  BitString() = default;

  // All-zero string of `length` bits.
  explicit BitString(std::size_t length);

  // Parse from a string of '0' / '1' characters.
  static BitString from_string(std::string_view bits);

  // Adopt packed bytes; rejects nonzero pad bits and short payloads.
  static BitString from_bytes(std::size_t length, std::span<const std::uint8_t> bytes);

  std::size_t size() const { return length_; }
  bool empty() const { return length_ == 0; }

  bool get(std::size_t i) const { return (bytes_[i >> 3] >> (7 - (i & 7))) & 1U; }
  void set(std::size_t i, bool value);
  void flip(std::size_t i) { bytes_[i >> 3] ^= static_cast<std::uint8_t>(0x80U >> (i & 7)); }

  std::span<const std::uint8_t> bytes() const { return bytes_; }

  std::size_t popcount() const;

  // Copy with length changed; new bits are zero, dropped bits are discarded.
  BitString resized(std::size_t length) const;

  BitString& operator^=(const BitString& other);

  std::string to_string() const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::size_t length_ = 0;
  std::vector<std::uint8_t> bytes_;
};

BitString operator^(BitString a, const BitString& b);

// Number of positions where `a` and `b` differ. Throws DimensionError on
// length mismatch.
std::size_t hamming_distance(const BitString& a, const BitString& b);

// QFP1 container: "QFP1" magic, u64 little-endian bit length, payload bytes.
inline constexpr std::string_view kBitStringMagic = "QFP1";

std::vector<std::uint8_t> serialize(const BitString& bits);
BitString deserialize(std::span<const std::uint8_t> data);

void write_bitstring_file(const std::filesystem::path& path, const BitString& bits);
BitString read_bitstring_file(const std::filesystem::path& path);

}  // namespace qfp
