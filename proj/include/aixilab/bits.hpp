#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace aixilab {

// A finite binary string.  Used for programs, machine outputs and prediction
// prefixes.  Bits are stored one per byte; desk-scale strings are tiny, so
// clarity wins over packing.
class bit_string {
 public:
  bit_string() = default;
  explicit bit_string(std::vector<uint8_t> bits) : bits_(std::move(bits)) { check(); }

  // Parse from "0"/"1" characters, e.g. "010011".  Empty string is the empty program.
  static bit_string parse(const std::string& text) {
    std::vector<uint8_t> bits;
    bits.reserve(text.size());
    for (char c : text) {
      if (c == '0')
        bits.push_back(0);
      else if (c == '1')
        bits.push_back(1);
      else
        throw std::invalid_argument("bit_string: expected only '0'/'1', got '" + std::string(1, c) + "'");
    }
    return bit_string(std::move(bits));
  }

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  uint8_t operator[](std::size_t i) const { return bits_[i]; }

  void push_back(uint8_t bit) {
    if (bit > 1) throw std::invalid_argument("bit_string: bit must be 0 or 1");
    bits_.push_back(bit);
  }
  void pop_back() { bits_.pop_back(); }

  bit_string prefix(std::size_t n) const {
    return bit_string(std::vector<uint8_t>(bits_.begin(), bits_.begin() + std::min(n, bits_.size())));
  }

  bool is_prefix_of(const bit_string& other) const {
    if (size() > other.size()) return false;
    for (std::size_t i = 0; i < size(); ++i)
      if (bits_[i] != other.bits_[i]) return false;
    return true;
  }

  bit_string operator+(const bit_string& rhs) const {
    bit_string out = *this;
    out.bits_.insert(out.bits_.end(), rhs.bits_.begin(), rhs.bits_.end());
    return out;
  }
  bit_string with(uint8_t bit) const {
    bit_string out = *this;
    out.push_back(bit);
    return out;
  }

  bool operator==(const bit_string& rhs) const { return bits_ == rhs.bits_; }
  bool operator!=(const bit_string& rhs) const { return bits_ != rhs.bits_; }
  // Lexicographic; combined with length gives the canonical enumeration order.
  bool operator<(const bit_string& rhs) const { return bits_ < rhs.bits_; }

  std::string str() const {
    std::string out;
    out.reserve(bits_.size());
    for (uint8_t b : bits_) out.push_back(b ? '1' : '0');
    return out;
  }

  const std::vector<uint8_t>& raw() const { return bits_; }

  // All strings of exactly `len` bits in lexicographic order.
  static std::vector<bit_string> all_of_length(std::size_t len) {
    std::vector<bit_string> out;
    if (len > 30) throw std::invalid_argument("bit_string::all_of_length: too long to enumerate");
    const uint64_t n = uint64_t(1) << len;
    out.reserve(n);
    for (uint64_t v = 0; v < n; ++v) {
      std::vector<uint8_t> bits(len);
      for (std::size_t i = 0; i < len; ++i) bits[i] = uint8_t((v >> (len - 1 - i)) & 1);
      out.emplace_back(std::move(bits));
    }
    return out;
  }

 private:
  void check() const {
    for (uint8_t b : bits_)
      if (b > 1) throw std::invalid_argument("bit_string: bit must be 0 or 1");
  }
  std::vector<uint8_t> bits_;
};

}  // namespace aixilab
