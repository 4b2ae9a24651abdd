#ifndef POLARQKD_KEYBITS_HPP
#define POLARQKD_KEYBITS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace polarqkd {

enum class KeyRole : std::uint8_t { Raw, Sifted, Reconciled };

struct KeyBits {
  std::vector<std::uint8_t> bits;  // each 0 or 1
  KeyRole role = KeyRole::Raw;

  std::size_t size() const { return bits.size(); }

  // 8 bits per byte, LSB-first within each byte; trailing bits zero-padded.
  std::vector<std::uint8_t> packed() const;
  std::string to_hex() const;
};

// Hamming distance / length. Throws std::domain_error on mismatched or
// empty lengths.
double qber(const KeyBits& a, const KeyBits& b);

}  // namespace polarqkd

#endif  // POLARQKD_KEYBITS_HPP
