#ifndef POLARQKD_POLARIZATION_HPP
#define POLARQKD_POLARIZATION_HPP

#include <cstdint>
#include <numbers>
#include <utility>

#include "rng.hpp"

namespace polarqkd {

inline constexpr double kPi = std::numbers::pi;

// Linear polarization is direction-free: alpha and alpha + pi describe the
// same state, so orientations live in [0, pi).
double canonical_orientation(double radians);

// min(d, pi - d): angular distance between polarization orientations.
double angular_distance(double a, double b);

struct PolarizationState {
  double orientation;  // canonical, in [0, pi)
};

enum class BasisKind : std::uint8_t { Rectilinear, Diagonal };

struct Basis {
  BasisKind kind;

  // Bit-to-angle map: rectilinear 1 -> horizontal (0), 0 -> vertical (pi/2);
  // diagonal 1 -> 3pi/4 (-45 deg), 0 -> pi/4 (+45 deg).
  double bit_angle(int bit) const;
};

inline constexpr Basis kRectilinear{BasisKind::Rectilinear};
inline constexpr Basis kDiagonal{BasisKind::Diagonal};

// A pulse of photons sharing one polarization. photon_count == 0 is a vacuum
// pulse and cannot produce a detection.
struct Pulse {
  PolarizationState state;
  std::uint64_t photon_count;
};

PolarizationState encode_bit(int bit, Basis basis);

PolarizationState rotate(PolarizationState state, double delta);

struct MeasureOutcome {
  bool detected;
  int bit;          // valid only when detected
  Pulse collapsed;  // valid only when detected
};

// Projective polarizer measurement: bit 1 with probability cos^2(delta) where
// delta is the offset from the basis's bit-1 angle. Vacuum pulses yield
// no-detection.
MeasureOutcome measure(const Pulse& pulse, Basis basis, RandomStream& rng);

// Binomial split: each photon independently diverted with probability
// tap_fraction. Throws std::domain_error for tap_fraction outside [0, 1].
struct SplitResult {
  Pulse forwarded;
  Pulse diverted;
};
SplitResult split_pulse(const Pulse& pulse, double tap_fraction, RandomStream& rng);

}  // namespace polarqkd

#endif  // POLARQKD_POLARIZATION_HPP
