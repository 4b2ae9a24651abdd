#include "protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace polarqkd {

namespace {

std::uint64_t sample_photon_count(const SourceModel& source, RandomStream& rng) {
  if (!source.poisson) {
    return 1;
  }
  // Knuth's product method; fine for the small means used here.
  const double limit = std::exp(-source.mean);
  std::uint64_t k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng.next_double();
  } while (p > limit);
  return k - 1;
}

// One physical traversal: fresh link error, then the adversary hook.
LinkNoise traversal_noise(const ChannelModel& channel, int traversal_index) {
  const auto& widths = channel.per_traversal_half_widths;
  if (widths.empty()) {
    return channel.noise;
  }
  const std::size_t i =
      std::min(static_cast<std::size_t>(traversal_index), widths.size() - 1);
  return make_link_noise(widths[i]);
}

Pulse traverse(Pulse pulse, const ChannelModel& channel, int traversal_index,
               RoundRecord& record, RandomStream& rng) {
  const double err = sample_link_error(traversal_noise(channel, traversal_index), rng);
  record.link_errors[record.n_link_errors++] = err;
  pulse = Pulse{rotate(pulse.state, err), pulse.photon_count};
  if (channel.eve.kind == EveKind::Siphon) {
    pulse = apply_siphon(pulse, channel.eve, traversal_index, rng).forwarded;
  }
  return pulse;
}

void finalize(ProtocolResult& result, std::uint64_t rounds) {
  auto& s = result.transcript.summary;
  s.rounds = rounds;
  double total = 0.0;
  for (std::uint32_t c : result.transcript.received_counts) {
    total += c;
  }
  s.mean_received_count = rounds ? total / static_cast<double>(rounds) : 0.0;
  s.qber = result.alice.size() > 0 ? qber(result.alice, result.bob) : 0.0;
}

}  // namespace

const char* protocol_name(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Bb84:
      return "bb84";
    case ProtocolKind::TwoStage:
      return "two-stage";
    default:
      return "three-stage";
  }
}

ProtocolResult run_bb84(std::uint64_t rounds, const ChannelModel& channel,
                        const SourceModel& source, RandomStream& rng,
                        bool record_rounds) {
  if (rounds < 1) {
    throw std::domain_error("run_bb84: rounds must be >= 1");
  }
  ProtocolResult result;
  result.alice.role = result.bob.role = KeyRole::Sifted;
  result.transcript.protocol = ProtocolKind::Bb84;
  result.transcript.received_counts.reserve(rounds);
  if (record_rounds) {
    result.transcript.rounds.reserve(rounds);
  }
  const std::uint64_t base_seed = rng.next_u64();

  for (std::uint64_t i = 0; i < rounds; ++i) {
    RandomStream round_rng(RandomStream::derive_seed(base_seed, i));
    RoundRecord record;
    record.index = i;
    record.protocol = ProtocolKind::Bb84;

    record.data_bit = round_rng.next_bit();
    record.alice_basis = round_rng.next_bit() ? BasisKind::Diagonal : BasisKind::Rectilinear;
    const Basis alice_basis{record.alice_basis};
    Pulse pulse{encode_bit(record.data_bit, alice_basis),
                sample_photon_count(source, round_rng)};

    pulse = traverse(pulse, channel, 0, record, round_rng);
    if (channel.eve.kind == EveKind::InterceptResend) {
      pulse = intercept_resend(pulse, round_rng).forwarded;
    }

    record.bob_basis = round_rng.next_bit() ? BasisKind::Diagonal : BasisKind::Rectilinear;
    record.received_count = static_cast<std::uint32_t>(pulse.photon_count);
    const MeasureOutcome outcome = measure(pulse, Basis{record.bob_basis}, round_rng);
    record.detected = outcome.detected;
    record.measured_bit = outcome.detected ? outcome.bit : -1;

    if (outcome.detected) {
      ++result.transcript.summary.detections;
      if (record.alice_basis == record.bob_basis) {
        result.alice.bits.push_back(static_cast<std::uint8_t>(record.data_bit));
        result.bob.bits.push_back(static_cast<std::uint8_t>(outcome.bit));
      }
    }
    result.transcript.received_counts.push_back(record.received_count);
    if (record_rounds) {
      result.transcript.rounds.push_back(record);
    }
  }
  finalize(result, rounds);
  result.transcript.summary.sift_rate =
      static_cast<double>(result.alice.size()) / static_cast<double>(rounds);
  return result;
}

ProtocolResult run_two_stage(std::uint64_t bits, const ChannelModel& channel,
                             RandomStream& rng, bool record_rounds) {
  if (bits < 1) {
    throw std::domain_error("run_two_stage: bits must be >= 1");
  }
  ProtocolResult result;
  result.alice.role = result.bob.role = KeyRole::Raw;
  result.transcript.protocol = ProtocolKind::TwoStage;
  result.transcript.received_counts.reserve(bits);
  if (record_rounds) {
    result.transcript.rounds.reserve(bits);
  }
  const std::uint64_t base_seed = rng.next_u64();

  for (std::uint64_t i = 0; i < bits; ++i) {
    RandomStream round_rng(RandomStream::derive_seed(base_seed, i));
    RoundRecord record;
    record.index = i;
    record.protocol = ProtocolKind::TwoStage;

    // Reference photon: vertical (bit 0 in the rectilinear convention).
    record.bob_choice = round_rng.next_bit();
    record.data_bit = record.bob_choice;
    record.alice_theta = round_rng.next_double() * kPi;

    Pulse pulse{encode_bit(0, kRectilinear), 1};
    pulse = Pulse{rotate(pulse.state, record.alice_theta), pulse.photon_count};
    pulse = traverse(pulse, channel, 0, record, round_rng);
    pulse = Pulse{rotate(pulse.state, record.bob_choice ? kPi / 2.0 : 0.0),
                  pulse.photon_count};
    pulse = traverse(pulse, channel, 1, record, round_rng);
    pulse = Pulse{rotate(pulse.state, -record.alice_theta), pulse.photon_count};

    record.received_count = static_cast<std::uint32_t>(pulse.photon_count);
    const MeasureOutcome outcome = measure(pulse, kRectilinear, round_rng);
    record.detected = outcome.detected;
    record.measured_bit = outcome.detected ? outcome.bit : -1;
    if (outcome.detected) {
      ++result.transcript.summary.detections;
      result.bob.bits.push_back(static_cast<std::uint8_t>(record.bob_choice));
      result.alice.bits.push_back(static_cast<std::uint8_t>(outcome.bit));
    }
    result.transcript.received_counts.push_back(record.received_count);
    if (record_rounds) {
      result.transcript.rounds.push_back(record);
    }
  }
  finalize(result, bits);
  result.transcript.summary.sift_rate =
      static_cast<double>(result.transcript.summary.detections) /
      static_cast<double>(bits);
  return result;
}

ProtocolResult run_three_stage(std::uint64_t bits, const ChannelModel& channel,
                               RandomStream& rng, bool record_rounds) {
  if (bits < 1) {
    throw std::domain_error("run_three_stage: bits must be >= 1");
  }
  ProtocolResult result;
  result.alice.role = result.bob.role = KeyRole::Raw;
  result.transcript.protocol = ProtocolKind::ThreeStage;
  result.transcript.received_counts.reserve(bits);
  if (record_rounds) {
    result.transcript.rounds.reserve(bits);
  }
  const std::uint64_t base_seed = rng.next_u64();

  for (std::uint64_t i = 0; i < bits; ++i) {
    RandomStream round_rng(RandomStream::derive_seed(base_seed, i));
    RoundRecord record;
    record.index = i;
    record.protocol = ProtocolKind::ThreeStage;

    record.data_bit = round_rng.next_bit();
    record.alice_theta = round_rng.next_double() * kPi;
    record.bob_phi = round_rng.next_double() * kPi;

    Pulse pulse{encode_bit(record.data_bit, kRectilinear), 1};
    pulse = Pulse{rotate(pulse.state, record.alice_theta), pulse.photon_count};
    pulse = traverse(pulse, channel, 0, record, round_rng);
    pulse = Pulse{rotate(pulse.state, record.bob_phi), pulse.photon_count};
    pulse = traverse(pulse, channel, 1, record, round_rng);
    pulse = Pulse{rotate(pulse.state, -record.alice_theta), pulse.photon_count};
    pulse = traverse(pulse, channel, 2, record, round_rng);

    // Bob's inverse rotation is local; noiseless unless configured otherwise.
    double bob_inverse = -record.bob_phi;
    if (channel.bob_final_rotation_noise) {
      const double err = sample_link_error(channel.noise, round_rng);
      record.link_errors[record.n_link_errors++] = err;
      bob_inverse += err;
    }
    pulse = Pulse{rotate(pulse.state, bob_inverse), pulse.photon_count};

    record.received_count = static_cast<std::uint32_t>(pulse.photon_count);
    const MeasureOutcome outcome = measure(pulse, kRectilinear, round_rng);
    record.detected = outcome.detected;
    record.measured_bit = outcome.detected ? outcome.bit : -1;
    if (outcome.detected) {
      ++result.transcript.summary.detections;
      result.alice.bits.push_back(static_cast<std::uint8_t>(record.data_bit));
      result.bob.bits.push_back(static_cast<std::uint8_t>(outcome.bit));
    }
    result.transcript.received_counts.push_back(record.received_count);
    if (record_rounds) {
      result.transcript.rounds.push_back(record);
    }
  }
  finalize(result, bits);
  result.transcript.summary.sift_rate =
      static_cast<double>(result.transcript.summary.detections) /
      static_cast<double>(bits);
  return result;
}

std::string format_round(const RoundRecord& r) {
  char buf[512];
  char errors[256];
  if (r.n_link_errors == 0) {
    std::snprintf(errors, sizeof(errors), "-");
  } else {
    std::size_t pos = 0;
    for (int i = 0; i < r.n_link_errors; ++i) {
      pos += std::snprintf(errors + pos, sizeof(errors) - pos, "%s%.17g",
                           i ? "," : "", r.link_errors[i]);
    }
  }
  const char* alice_basis =
      r.protocol == ProtocolKind::Bb84
          ? (r.alice_basis == BasisKind::Rectilinear ? "R" : "D")
          : "-";
  const char* bob_basis = r.protocol == ProtocolKind::Bb84
                              ? (r.bob_basis == BasisKind::Rectilinear ? "R" : "D")
                              : "-";
  char theta[40] = "-";
  char phi[40] = "-";
  if (r.protocol != ProtocolKind::Bb84) {
    std::snprintf(theta, sizeof(theta), "%.17g", r.alice_theta);
  }
  if (r.protocol == ProtocolKind::ThreeStage) {
    std::snprintf(phi, sizeof(phi), "%.17g", r.bob_phi);
  }
  char choice[8] = "-";
  if (r.protocol == ProtocolKind::TwoStage) {
    std::snprintf(choice, sizeof(choice), "%d", r.bob_choice);
  }
  char measured[8] = "-";
  if (r.detected) {
    std::snprintf(measured, sizeof(measured), "%d", r.measured_bit);
  }
  std::snprintf(buf, sizeof(buf), "%llu %s %d %s %s %s %s %s %s %s %d %u",
                static_cast<unsigned long long>(r.index), protocol_name(r.protocol),
                r.data_bit, theta, phi, choice, alice_basis, bob_basis, errors,
                measured, r.detected ? 1 : 0, r.received_count);
  return std::string(buf);
}

void write_transcript(std::ostream& out, const Transcript& transcript) {
  for (const RoundRecord& r : transcript.rounds) {
    out << format_round(r) << '\n';
  }
}

}  // namespace polarqkd
