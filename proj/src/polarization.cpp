#include "polarization.hpp"

#include <cmath>
#include <stdexcept>

namespace polarqkd {

double canonical_orientation(double radians) {
  double r = std::fmod(radians, kPi);
  if (r < 0.0) {
    r += kPi;
  }
  if (r >= kPi) {
    r = 0.0;
  }
  return r;
}

double angular_distance(double a, double b) {
  const double d = std::fabs(canonical_orientation(a) - canonical_orientation(b));
  return std::min(d, kPi - d);
}

double Basis::bit_angle(int bit) const {
  if (kind == BasisKind::Rectilinear) {
    return bit == 1 ? 0.0 : kPi / 2.0;
  }
  return bit == 1 ? 3.0 * kPi / 4.0 : kPi / 4.0;
}

PolarizationState encode_bit(int bit, Basis basis) {
  if (bit != 0 && bit != 1) {
    throw std::domain_error("encode_bit: bit must be 0 or 1");
  }
  return PolarizationState{canonical_orientation(basis.bit_angle(bit))};
}

PolarizationState rotate(PolarizationState state, double delta) {
  return PolarizationState{canonical_orientation(state.orientation + delta)};
}

MeasureOutcome measure(const Pulse& pulse, Basis basis, RandomStream& rng) {
  if (pulse.photon_count == 0) {
    return MeasureOutcome{false, -1, Pulse{{0.0}, 0}};
  }
  const double delta = pulse.state.orientation - basis.bit_angle(1);
  const double c = std::cos(delta);
  const double p_one = c * c;
  const int bit = rng.next_double() < p_one ? 1 : 0;
  Pulse collapsed{PolarizationState{canonical_orientation(basis.bit_angle(bit))},
                  pulse.photon_count};
  return MeasureOutcome{true, bit, collapsed};
}

SplitResult split_pulse(const Pulse& pulse, double tap_fraction, RandomStream& rng) {
  if (!(tap_fraction >= 0.0 && tap_fraction <= 1.0)) {
    throw std::domain_error("split_pulse: tap_fraction must be in [0, 1]");
  }
  std::uint64_t diverted = 0;
  if (tap_fraction >= 1.0) {
    diverted = pulse.photon_count;
  } else if (tap_fraction > 0.0) {
    for (std::uint64_t i = 0; i < pulse.photon_count; ++i) {
      if (rng.next_double() < tap_fraction) {
        ++diverted;
      }
    }
  }
  return SplitResult{Pulse{pulse.state, pulse.photon_count - diverted},
                     Pulse{pulse.state, diverted}};
}

}  // namespace polarqkd
