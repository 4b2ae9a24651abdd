#include "keypost.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rng.hpp"

namespace polarqkd {

namespace {

std::vector<std::size_t> permutation_order(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RandomStream rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.next_below(i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

KeyBits reorder(const KeyBits& key, const std::vector<std::size_t>& order, bool inverse) {
  KeyBits out;
  out.role = key.role;
  out.bits.resize(key.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (inverse) {
      out.bits[order[i]] = key.bits[i];
    } else {
      out.bits[i] = key.bits[order[i]];
    }
  }
  return out;
}

}  // namespace

KeyBits permute(const KeyBits& key, std::uint64_t seed) {
  return reorder(key, permutation_order(key.size(), seed), false);
}

KeyBits inverse_permute(const KeyBits& key, std::uint64_t seed) {
  return reorder(key, permutation_order(key.size(), seed), true);
}

int choose_block_length(double qber_estimate) {
  if (!(qber_estimate > 0.0 && qber_estimate < 0.5)) {
    throw std::domain_error("choose_block_length: estimate must be in (0, 0.5)");
  }
  return std::max(2, static_cast<int>(std::llround(0.73 / qber_estimate)));
}

std::string ReconciliationReport::to_text() const {
  std::ostringstream out;
  out << "parities_compared=" << parities_compared << "\n"
      << "bits_deleted=" << bits_deleted << "\n"
      << "errors_corrected=" << errors_corrected << "\n"
      << "final_length=" << final_length << "\n"
      << "hash_match=" << (hash_match ? "true" : "false") << "\n";
  return out.str();
}

ReconcileResult reconcile(const KeyBits& alice, const KeyBits& bob,
                          const ReconciliationConfig& config) {
  if (alice.size() != bob.size()) {
    throw std::domain_error("reconcile: keys must have equal length");
  }
  int block_length = config.block_length;
  if (block_length == 0) {
    block_length = choose_block_length(config.qber_estimate);
  }
  if (block_length < 1 || config.passes < 1) {
    throw std::domain_error("reconcile: invalid block length or pass count");
  }
  if (alice.size() < static_cast<std::size_t>(block_length)) {
    throw std::domain_error("reconcile: key shorter than block length");
  }

  KeyBits a = alice;
  KeyBits b = bob;
  ReconciliationReport report;
  const std::uint64_t initial_length = a.size();

  for (int pass = 0; pass < config.passes; ++pass) {
    const std::uint64_t pass_seed = RandomStream::derive_seed(config.permutation_seed, pass);
    a = permute(a, pass_seed);
    b = permute(b, pass_seed);

    const std::size_t n = a.size();
    const std::size_t blen =
        std::max<std::size_t>(2, static_cast<std::size_t>(block_length) >> pass);
    std::vector<bool> deleted(n, false);

    auto parity_mismatch = [&](const std::vector<std::size_t>& range) {
      int pa = 0;
      int pb = 0;
      for (std::size_t i : range) {
        pa ^= a.bits[i];
        pb ^= b.bits[i];
      }
      ++report.parities_compared;
      return pa != pb;
    };

    for (std::size_t start = 0; start < n; start += blen) {
      std::vector<std::size_t> block;
      for (std::size_t i = start; i < std::min(start + blen, n); ++i) {
        if (!deleted[i]) {
          block.push_back(i);
        }
      }
      if (block.empty()) {
        continue;
      }
      std::vector<std::vector<std::size_t>> compared;
      compared.push_back(block);
      if (parity_mismatch(block)) {
        // binary search, left-biased halves
        std::vector<std::size_t> range = block;
        while (range.size() > 1) {
          std::vector<std::size_t> half(range.begin(),
                                        range.begin() + (range.size() + 1) / 2);
          compared.push_back(half);
          if (parity_mismatch(half)) {
            range = std::move(half);
          } else {
            std::vector<std::size_t> rest(range.begin() + (range.size() + 1) / 2,
                                          range.end());
            range = std::move(rest);
          }
        }
        deleted[range.front()] = true;
        ++report.errors_corrected;
      }
      // one toll position per disclosed parity
      for (const auto& range : compared) {
        auto it = std::find_if(range.rbegin(), range.rend(),
                               [&](std::size_t i) { return !deleted[i]; });
        if (it != range.rend()) {
          deleted[*it] = true;
          continue;
        }
        // compared range fully consumed; fall back to the last surviving
        // position of the whole key
        for (std::size_t i = n; i > 0; --i) {
          if (!deleted[i - 1]) {
            deleted[i - 1] = true;
            break;
          }
        }
      }
    }

    KeyBits na, nb;
    na.role = nb.role = KeyRole::Reconciled;
    for (std::size_t i = 0; i < n; ++i) {
      if (!deleted[i]) {
        na.bits.push_back(a.bits[i]);
        nb.bits.push_back(b.bits[i]);
      }
    }
    a = std::move(na);
    b = std::move(nb);
  }

  report.final_length = a.size();
  report.bits_deleted = initial_length - report.final_length;
  report.hash_match = verify_keys(a, b);
  return ReconcileResult{std::move(a), std::move(b), report};
}

std::string KeyDigest::to_hex() const {
  static const char* digits = "0123456789abcdef";
  std::string hex;
  for (std::uint8_t byte : bytes) {
    hex.push_back(digits[byte >> 4]);
    hex.push_back(digits[byte & 0xF]);
  }
  return hex;
}

KeyDigest digest(const KeyBits& key) {
  std::vector<std::uint8_t> message;
  const std::uint64_t nbits = key.size();
  for (int i = 0; i < 8; ++i) {
    message.push_back(static_cast<std::uint8_t>((nbits >> (8 * i)) & 0xFF));
  }
  const auto packed = key.packed();
  message.insert(message.end(), packed.begin(), packed.end());

  KeyDigest out;
  out.algorithm = "sha256";
  unsigned int len = 0;
  if (EVP_Digest(message.data(), message.size(), out.bytes.data(), &len, EVP_sha256(),
                 nullptr) != 1 ||
      len != out.bytes.size()) {
    throw std::runtime_error("digest: SHA-256 computation failed");
  }
  return out;
}

bool verify_keys(const KeyBits& a, const KeyBits& b) { return digest(a) == digest(b); }

}  // namespace polarqkd
