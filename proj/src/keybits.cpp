#include "keybits.hpp"

#include <stdexcept>

namespace polarqkd {

std::vector<std::uint8_t> KeyBits::packed() const {
  std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) {
      out[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    }
  }
  return out;
}

std::string KeyBits::to_hex() const {
  static const char* digits = "0123456789abcdef";
  std::string hex;
  for (std::uint8_t byte : packed()) {
    hex.push_back(digits[byte >> 4]);
    hex.push_back(digits[byte & 0xF]);
  }
  return hex;
}

double qber(const KeyBits& a, const KeyBits& b) {
  if (a.size() != b.size() || a.size() == 0) {
    throw std::domain_error("qber: keys must have equal nonzero length");
  }
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.bits[i] != b.bits[i]) {
      ++mismatches;
    }
  }
  return static_cast<double>(mismatches) / static_cast<double>(a.size());
}

}  // namespace polarqkd
