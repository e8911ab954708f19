#pragma once

// Binary strings plus the two number codes everything else sits on:
// the length-lexicographic index (bijection between strings and naturals)
// and Elias gamma codes.

#include <cassert>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace teachsize {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A finite string over {0,1}. Kept as text internally; strings at desk scale
// are a few dozen bits, so clarity beats packing.
class BitString {
 public:
  BitString() = default;

  explicit BitString(std::string bits) : bits_(std::move(bits)) {
    for (char c : bits_) {
      if (c != '0' && c != '1') throw Error("bit string: bad char");
    }
  }

  static BitString zeros(size_t n) { return BitString(std::string(n, '0')); }

  // Inverse of index(): 0 -> "", 1 -> "0", 2 -> "1", 3 -> "00", ...
  static BitString from_index(uint64_t n) {
    uint64_t v = n + 1;  // v >= 1, leading bit dropped below
    std::string s;
    while (v > 1) {
      s.push_back(char('0' + (v & 1)));
      v >>= 1;
    }
    BitString out;
    out.bits_.assign(s.rbegin(), s.rend());
    return out;
  }

  size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  int bit(size_t i) const {
    assert(i < bits_.size());
    return bits_[i] - '0';
  }

  void push_back(int b) { bits_.push_back(char('0' + (b & 1))); }

  void append(const BitString& other) { bits_ += other.bits_; }

  BitString substr(size_t pos, size_t len) const {
    return BitString(bits_.substr(pos, len));
  }

  // Position in the length-lexicographic order "" < "0" < "1" < "00" < ...
  // Equal to the value of "1"+bits read as binary, minus one.
  uint64_t index() const {
    if (bits_.size() >= 63) throw Error("bit string: too long to index");
    uint64_t v = 1;
    for (char c : bits_) v = (v << 1) | uint64_t(c - '0');
    return v - 1;
  }

  const std::string& text() const { return bits_; }

  bool operator==(const BitString& o) const { return bits_ == o.bits_; }
  bool operator!=(const BitString& o) const { return bits_ != o.bits_; }
  // Plain lexicographic comparison on the raw bits.
  bool operator<(const BitString& o) const { return bits_ < o.bits_; }

  bool is_prefix_of(const BitString& o) const {
    return bits_.size() <= o.bits_.size() &&
           o.bits_.compare(0, bits_.size(), bits_) == 0;
  }

  // Hex dump, high bit first, zero-padded to a whole number of nibbles.
  // The bit count must be stored alongside to invert exactly.
  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (size_t i = 0; i < bits_.size(); i += 4) {
      int v = 0;
      for (size_t j = 0; j < 4; ++j) {
        v <<= 1;
        if (i + j < bits_.size()) v |= bits_[i + j] - '0';
      }
      out.push_back(digits[v]);
    }
    return out;
  }

  static BitString from_hex(const std::string& hex, size_t nbits) {
    if (hex.size() * 4 < nbits) throw Error("hex: too short for bit count");
    BitString out;
    for (size_t i = 0; i < nbits; ++i) {
      char c = hex[i / 4];
      int v;
      if (c >= '0' && c <= '9') v = c - '0';
      else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
      else throw Error("hex: bad digit");
      out.push_back((v >> (3 - i % 4)) & 1);
    }
    return out;
  }

 private:
  std::string bits_;
};

// Elias gamma code of n >= 1: floor(log2 n) zeros, then n in binary.
inline BitString elias_gamma(uint64_t n) {
  if (n == 0) throw Error("elias gamma: needs n >= 1");
  int width = 0;
  while ((n >> width) > 1) ++width;
  BitString out = BitString::zeros(size_t(width));
  for (int i = width; i >= 0; --i) out.push_back(int((n >> i) & 1));
  return out;
}

// Reads one gamma code starting at pos. Returns (value, bits consumed).
inline std::optional<std::pair<uint64_t, size_t>> elias_gamma_decode(
    const BitString& s, size_t pos) {
  size_t zeros = 0;
  while (pos + zeros < s.size() && s.bit(pos + zeros) == 0) ++zeros;
  size_t body = zeros + 1;  // leading one plus `zeros` further bits
  if (pos + zeros + body > s.size() || zeros >= 63) return std::nullopt;
  uint64_t v = 0;
  for (size_t i = 0; i < body; ++i) v = (v << 1) | uint64_t(s.bit(pos + zeros + i));
  return std::make_pair(v, zeros + body);
}

}  // namespace teachsize
