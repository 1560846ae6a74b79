#pragma once

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvzk {

/// Packed bit string with LSB-first layout inside each byte.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(size_t nbits) : bytes_((nbits + 7) / 8, 0), n_(nbits) {}
  BitVec(std::vector<uint8_t> bytes, size_t nbits)
      : bytes_(std::move(bytes)), n_(nbits) {
    if (bytes_.size() != (n_ + 7) / 8) throw std::invalid_argument("BitVec: byte count mismatch");
  }

  static BitVec from_string(const std::string& s) {
    BitVec v(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1') v.set(i, true);
      else if (s[i] != '0') throw std::invalid_argument("BitVec: non-binary char");
    }
    return v;
  }

  size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }

  bool get(size_t i) const { return (bytes_[i >> 3] >> (i & 7)) & 1u; }
  void set(size_t i, bool b) {
    uint8_t mask = uint8_t(1u << (i & 7));
    if (b) bytes_[i >> 3] |= mask; else bytes_[i >> 3] &= uint8_t(~mask);
  }
  void flip(size_t i) { bytes_[i >> 3] ^= uint8_t(1u << (i & 7)); }

  void append(bool b) {
    if (n_ % 8 == 0) bytes_.push_back(0);
    ++n_;
    set(n_ - 1, b);
  }

  BitVec slice(size_t begin, size_t len) const {
    BitVec out(len);
    for (size_t i = 0; i < len; ++i) out.set(i, get(begin + i));
    return out;
  }

  void xor_with(const BitVec& other) {
    if (other.n_ != n_) throw std::invalid_argument("BitVec: xor length mismatch");
    for (size_t i = 0; i < bytes_.size(); ++i) bytes_[i] ^= other.bytes_[i];
  }

  void xor_slice(size_t begin, const BitVec& other) {
    for (size_t i = 0; i < other.size(); ++i)
      if (other.get(i)) flip(begin + i);
  }

  size_t popcount() const {
    size_t c = 0;
    for (size_t i = 0; i < n_; ++i) c += get(i);
    return c;
  }

  bool parity() const { return popcount() & 1; }

  /// Inner product mod 2.
  bool dot(const BitVec& other) const {
    if (other.n_ != n_) throw std::invalid_argument("BitVec: dot length mismatch");
    bool acc = false;
    for (size_t i = 0; i < n_; ++i) acc ^= (get(i) && other.get(i));
    return acc;
  }

  /// Interprets bits [begin, begin+width) as a little-endian integer (bit begin = LSB).
  uint64_t chunk_u64(size_t begin, size_t width) const {
    uint64_t v = 0;
    for (size_t i = 0; i < width; ++i)
      if (get(begin + i)) v |= (uint64_t(1) << i);
    return v;
  }

  const std::vector<uint8_t>& bytes() const { return bytes_; }

  std::string to_string() const {
    std::string s(n_, '0');
    for (size_t i = 0; i < n_; ++i) if (get(i)) s[i] = '1';
    return s;
  }

  friend bool operator==(const BitVec& a, const BitVec& b) {
    return a.n_ == b.n_ && a.bytes_ == b.bytes_;
  }

 private:
  std::vector<uint8_t> bytes_;
  size_t n_ = 0;
};

inline BitVec operator^(const BitVec& a, const BitVec& b) {
  BitVec r = a;
  r.xor_with(b);
  return r;
}

}  // namespace cvzk
