#ifndef POLARQKD_KEYPOST_HPP
#define POLARQKD_KEYPOST_HPP

#include <array>
#include <cstdint>
#include <string>

#include "keybits.hpp"

namespace polarqkd {

// Seed-driven Fisher-Yates permutation; the same seed aligns positions on
// both sides.
KeyBits permute(const KeyBits& key, std::uint64_t seed);
KeyBits inverse_permute(const KeyBits& key, std::uint64_t seed);

// Block length such that a block most likely holds at most one error:
// max(2, round(0.73 / qber_estimate)). Requires 0 < qber_estimate < 0.5.
int choose_block_length(double qber_estimate);

struct ReconciliationConfig {
  int block_length = 0;  // 0 = auto from qber_estimate
  int passes = 4;
  std::uint64_t permutation_seed = 0;
  double qber_estimate = 0.0;  // needed only in auto mode
};

struct ReconciliationReport {
  std::uint64_t parities_compared = 0;
  std::uint64_t bits_deleted = 0;
  std::uint64_t errors_corrected = 0;
  std::uint64_t final_length = 0;
  bool hash_match = false;

  std::string to_text() const;  // key-value block
};

struct ReconcileResult {
  KeyBits alice;
  KeyBits bob;
  ReconciliationReport report;
};

// Parity-based error deletion: per pass, apply a fresh agreed permutation,
// partition into blocks, compare block parities, and binary-search mismatched
// blocks to locate and delete one erroneous position. Every parity comparison
// (matching or not) also deletes one agreed toll position — the last surviving
// position of the compared range. Block length halves on each subsequent pass.
ReconcileResult reconcile(const KeyBits& alice, const KeyBits& bob,
                          const ReconciliationConfig& config);

struct KeyDigest {
  std::string algorithm;  // "sha256"
  std::array<std::uint8_t, 32> bytes;

  bool operator==(const KeyDigest&) const = default;
  std::string to_hex() const;
};

// SHA-256 over the packed bit string with an 8-byte little-endian length
// prefix (length in bits).
KeyDigest digest(const KeyBits& key);

bool verify_keys(const KeyBits& a, const KeyBits& b);

}  // namespace polarqkd

#endif  // POLARQKD_KEYPOST_HPP
