#include "adversary.hpp"

#include <stdexcept>

namespace polarqkd {

EveStrategy make_siphon(double tap_fraction, std::uint32_t stages_tapped, bool pns_mode) {
  if (!(tap_fraction > 0.0 && tap_fraction <= 1.0) || stages_tapped == 0) {
    throw std::domain_error(
        "make_siphon: requires tap_fraction in (0, 1] and at least one tapped stage");
  }
  return EveStrategy{EveKind::Siphon, tap_fraction, stages_tapped, pns_mode};
}

InterceptResult intercept_resend(const Pulse& pulse, RandomStream& rng) {
  const Basis eve_basis = rng.next_bit() ? kDiagonal : kRectilinear;
  if (pulse.photon_count == 0) {
    return InterceptResult{pulse, false, -1, eve_basis};
  }
  const MeasureOutcome outcome = measure(pulse, eve_basis, rng);
  return InterceptResult{outcome.collapsed, true, outcome.bit, eve_basis};
}

SiphonResult apply_siphon(const Pulse& pulse, const EveStrategy& strategy,
                          int traversal_index, RandomStream& rng) {
  if (strategy.kind != EveKind::Siphon || !strategy.taps_stage(traversal_index)) {
    return SiphonResult{pulse, Pulse{pulse.state, 0}};
  }
  if (strategy.pns_mode) {
    if (pulse.photon_count >= 2) {
      return SiphonResult{Pulse{pulse.state, pulse.photon_count - 1},
                          Pulse{pulse.state, 1}};
    }
    return SiphonResult{pulse, Pulse{pulse.state, 0}};
  }
  const SplitResult split = split_pulse(pulse, strategy.tap_fraction, rng);
  return SiphonResult{split.forwarded, split.diverted};
}

bool monitor_alarm(std::span<const std::uint64_t> observed_counts,
                   const IntensityMonitor& monitor) {
  if (observed_counts.empty()) {
    throw std::domain_error("monitor_alarm: empty observation window");
  }
  double total = 0.0;
  for (std::uint64_t c : observed_counts) {
    total += static_cast<double>(c);
  }
  const double mean = total / static_cast<double>(observed_counts.size());
  return mean < monitor.alarm_threshold * monitor.expected_mean_count;
}

}  // namespace polarqkd
