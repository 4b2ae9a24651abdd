#ifndef POLARQKD_PROTOCOL_HPP
#define POLARQKD_PROTOCOL_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "adversary.hpp"
#include "keybits.hpp"
#include "noise.hpp"
#include "polarization.hpp"
#include "rng.hpp"

namespace polarqkd {

enum class ProtocolKind : std::uint8_t { Bb84, TwoStage, ThreeStage };

const char* protocol_name(ProtocolKind kind);

struct SourceModel {
  bool poisson = false;  // false: exactly one photon per pulse
  double mean = 1.0;     // Poisson mean when poisson == true
};

// Channel shared by all protocols: each physical traversal samples one fresh
// independent angular error, then passes through the adversary hook.
struct ChannelModel {
  LinkNoise noise{0.0};
  // Optional heterogeneous widths; traversal i uses element i (last element
  // repeats when the list is shorter). Empty means `noise` everywhere.
  std::vector<double> per_traversal_half_widths;
  EveStrategy eve{};
  // Three-stage only: also draw an equipment error for Bob's local inverse
  // rotation (a fourth draw on top of the three traversals).
  bool bob_final_rotation_noise = false;
};

struct RoundRecord {
  std::uint64_t index = 0;
  ProtocolKind protocol = ProtocolKind::Bb84;
  int data_bit = -1;
  double alice_theta = 0.0;
  double bob_phi = 0.0;
  int bob_choice = -1;  // two-stage: 0 (no rotation) or 1 (quarter turn)
  BasisKind alice_basis = BasisKind::Rectilinear;
  BasisKind bob_basis = BasisKind::Rectilinear;
  double link_errors[4] = {0, 0, 0, 0};
  int n_link_errors = 0;
  int measured_bit = -1;
  bool detected = false;
  std::uint32_t received_count = 0;
};

struct TranscriptSummary {
  std::uint64_t rounds = 0;
  std::uint64_t detections = 0;
  double sift_rate = 0.0;
  double qber = 0.0;
  double mean_received_count = 0.0;
};

struct Transcript {
  ProtocolKind protocol = ProtocolKind::Bb84;
  std::vector<RoundRecord> rounds;                // empty unless rounds recorded
  std::vector<std::uint32_t> received_counts;     // per round, at the receiver
  TranscriptSummary summary;
};

struct ProtocolResult {
  KeyBits alice;
  KeyBits bob;
  Transcript transcript;
};

// BB84: random bit and basis per round, one noisy traversal, random
// measurement basis, basis announcement, sifting.
ProtocolResult run_bb84(std::uint64_t rounds, const ChannelModel& channel,
                        const SourceModel& source, RandomStream& rng,
                        bool record_rounds = true);

// Two-stage: Alice sends a reference photon rotated by a secret theta, Bob
// applies his key bit as a quarter turn or nothing and returns it, Alice
// undoes theta and measures. Two noisy traversals.
ProtocolResult run_two_stage(std::uint64_t bits, const ChannelModel& channel,
                             RandomStream& rng, bool record_rounds = true);

// Three-stage: Alice encodes X and rotates theta; Bob adds phi and returns;
// Alice removes theta and sends again; Bob removes phi locally and measures.
// Three noisy traversals.
ProtocolResult run_three_stage(std::uint64_t bits, const ChannelModel& channel,
                               RandomStream& rng, bool record_rounds = true);

// Line-delimited transcript serialization, one round per line. Field order:
//   index protocol data_bit alice_theta bob_phi bob_choice alice_basis
//   bob_basis link_errors measured_bit detected received_count
// Unused fields print as '-'; link_errors are comma-joined.
void write_transcript(std::ostream& out, const Transcript& transcript);
std::string format_round(const RoundRecord& record);

}  // namespace polarqkd

#endif  // POLARQKD_PROTOCOL_HPP
