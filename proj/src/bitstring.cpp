#include "qfp/bitstring.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <iterator>

#include "qfp/errors.hpp"

namespace qfp {

namespace {

constexpr std::size_t kHeaderSize = 12;

std::size_t byte_count(std::size_t length) { return (length + 7) / 8; }

std::uint8_t pad_mask(std::size_t length) {
  const std::size_t used = length & 7;
  return used == 0 ? 0 : static_cast<std::uint8_t>(0xFFU >> used);
}

}  // namespace

BitString::BitString(std::size_t length) : length_(length), bytes_(byte_count(length), 0) {}

BitString BitString::from_string(std::string_view bits) {
  BitString out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      out.set(i, true);
    } else if (bits[i] != '0') {
      throw FormatError("bit string may only contain '0' and '1'", i);
    }
  }
  return out;
}

BitString BitString::from_bytes(std::size_t length, std::span<const std::uint8_t> bytes) {
  const std::size_t needed = byte_count(length);
  if (bytes.size() != needed) {
    throw FormatError("payload holds " + std::to_string(bytes.size()) + " bytes, expected " +
                          std::to_string(needed),
                      std::min(bytes.size(), needed));
  }
  if (needed > 0 && (bytes[needed - 1] & pad_mask(length)) != 0) {
    throw FormatError("nonzero pad bits in final payload byte", needed - 1);
  }
  BitString out;
  out.length_ = length;
  out.bytes_.assign(bytes.begin(), bytes.end());
  return out;
}

void BitString::set(std::size_t i, bool value) {
  const auto mask = static_cast<std::uint8_t>(0x80U >> (i & 7));
  if (value) {
    bytes_[i >> 3] |= mask;
  } else {
    bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
  }
}

std::size_t BitString::popcount() const {
  std::size_t total = 0;
  for (std::uint8_t b : bytes_) total += static_cast<std::size_t>(std::popcount(b));
  return total;
}

BitString BitString::resized(std::size_t length) const {
  BitString out(length);
  const std::size_t copy = std::min(bytes_.size(), out.bytes_.size());
  std::copy_n(bytes_.begin(), copy, out.bytes_.begin());
  if (!out.bytes_.empty()) out.bytes_.back() &= static_cast<std::uint8_t>(~pad_mask(length));
  return out;
}

BitString& BitString::operator^=(const BitString& other) {
  if (other.length_ != length_) {
    throw DimensionError("xor of bit strings with lengths " + std::to_string(length_) + " and " +
                         std::to_string(other.length_));
  }
  for (std::size_t i = 0; i < bytes_.size(); ++i) bytes_[i] ^= other.bytes_[i];
  return *this;
}

std::string BitString::to_string() const {
  std::string s(length_, '0');
  for (std::size_t i = 0; i < length_; ++i) {
    if (get(i)) s[i] = '1';
  }
  return s;
}

BitString operator^(BitString a, const BitString& b) {
  a ^= b;
  return a;
}

std::size_t hamming_distance(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) {
    throw DimensionError("hamming distance of bit strings with lengths " + std::to_string(a.size()) +
                         " and " + std::to_string(b.size()));
  }
  const auto x = a.bytes();
  const auto y = b.bytes();
  std::size_t total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += static_cast<std::size_t>(std::popcount(static_cast<std::uint8_t>(x[i] ^ y[i])));
  }
  return total;
}

std::vector<std::uint8_t> serialize(const BitString& bits) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + bits.bytes().size());
  out.insert(out.end(), kBitStringMagic.begin(), kBitStringMagic.end());
  auto length = static_cast<std::uint64_t>(bits.size());
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::uint8_t>(length & 0xFFU));
    length >>= 8;
  }
  out.insert(out.end(), bits.bytes().begin(), bits.bytes().end());
  return out;
}

BitString deserialize(std::span<const std::uint8_t> data) {
  for (std::size_t i = 0; i < kBitStringMagic.size(); ++i) {
    if (i >= data.size()) throw FormatError("truncated magic", data.size());
    if (data[i] != static_cast<std::uint8_t>(kBitStringMagic[i])) {
      throw FormatError("bad magic, expected \"QFP1\"", i);
    }
  }
  if (data.size() < kHeaderSize) throw FormatError("truncated bit-length field", data.size());
  std::uint64_t length = 0;
  for (int i = 7; i >= 0; --i) length = (length << 8) | data[4 + static_cast<std::size_t>(i)];
  if (length == 0) throw FormatError("bit length must be at least 1", 4);
  const std::uint64_t payload = (length + 7) / 8;
  const std::size_t available = data.size() - kHeaderSize;
  if (available < payload) throw FormatError("truncated payload", data.size());
  if (available > payload) {
    throw FormatError("trailing bytes after payload", kHeaderSize + static_cast<std::size_t>(payload));
  }
  try {
    return BitString::from_bytes(static_cast<std::size_t>(length), data.subspan(kHeaderSize));
  } catch (const FormatError& e) {
    throw FormatError("nonzero pad bits in final payload byte", kHeaderSize + e.byte_offset());
  }
}

void write_bitstring_file(const std::filesystem::path& path, const BitString& bits) {
  const auto data = serialize(bits);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("failed writing " + path.string());
}

BitString read_bitstring_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return deserialize(data);
}

}  // namespace qfp
