#ifndef POLARQKD_ADVERSARY_HPP
#define POLARQKD_ADVERSARY_HPP

#include <cstdint>
#include <span>

#include "polarization.hpp"
#include "rng.hpp"

namespace polarqkd {

enum class EveKind : std::uint8_t { None, InterceptResend, Siphon };

struct EveStrategy {
  EveKind kind = EveKind::None;
  double tap_fraction = 0.0;
  std::uint32_t stages_tapped = 0;  // bitmask over traversal indices
  bool pns_mode = false;            // divert only surplus photons of multi-photon pulses

  bool taps_stage(int traversal_index) const {
    return (stages_tapped >> traversal_index) & 1u;
  }
};

EveStrategy make_siphon(double tap_fraction, std::uint32_t stages_tapped, bool pns_mode);

struct InterceptResult {
  Pulse forwarded;
  bool eve_detected;
  int eve_bit;      // valid when eve_detected
  Basis eve_basis;  // basis Eve measured in
};

// Intercept-resend: Eve measures in a uniformly random basis and re-encodes
// her outcome. Vacuum pulses pass through unmeasured.
InterceptResult intercept_resend(const Pulse& pulse, RandomStream& rng);

struct SiphonResult {
  Pulse forwarded;
  Pulse stolen;
};

// Tap one traversal. Plain mode splits binomially at tap_fraction; PNS mode
// diverts exactly one photon from pulses carrying two or more and leaves
// single-photon and vacuum pulses untouched.
SiphonResult apply_siphon(const Pulse& pulse, const EveStrategy& strategy,
                          int traversal_index, RandomStream& rng);

struct IntensityMonitor {
  double expected_mean_count;
  double alarm_threshold;  // fraction in (0, 1]
};

// Alarm iff mean(observed) < alarm_threshold * expected_mean_count.
// Throws std::domain_error on an empty window.
bool monitor_alarm(std::span<const std::uint64_t> observed_counts,
                   const IntensityMonitor& monitor);

}  // namespace polarqkd

#endif  // POLARQKD_ADVERSARY_HPP
