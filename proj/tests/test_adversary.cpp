#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "adversary.hpp"
#include "protocol.hpp"
#include "rng.hpp"

using namespace polarqkd;

TEST_CASE("make_siphon validates its parameters") {
  CHECK_THROWS_AS(make_siphon(0.0, 0b1, false), std::domain_error);
  CHECK_THROWS_AS(make_siphon(0.2, 0, false), std::domain_error);
  const EveStrategy eve = make_siphon(0.2, 0b111, true);
  CHECK(eve.taps_stage(0));
  CHECK(eve.taps_stage(2));
  CHECK_FALSE(eve.taps_stage(3));
}

TEST_CASE("intercept-resend passes vacuum pulses through") {
  RandomStream rng(30);
  const auto result = intercept_resend(Pulse{{0.5}, 0}, rng);
  CHECK_FALSE(result.eve_detected);
  CHECK(result.forwarded.photon_count == 0);
}

TEST_CASE("intercept-resend in the matching basis is a transparent relay") {
  // When Eve happens to measure in Alice's basis, the forwarded state is the
  // encoded state itself: Bob in the same basis then reads the bit exactly.
  RandomStream rng(31);
  for (int bit : {0, 1}) {
    for (Basis basis : {kRectilinear, kDiagonal}) {
      const Pulse pulse{encode_bit(bit, basis), 1};
      const auto eve = measure(pulse, basis, rng);  // forced same-basis intercept
      REQUIRE(eve.detected);
      CHECK(eve.bit == bit);
      const auto bob = measure(eve.collapsed, basis, rng);
      CHECK(bob.bit == bit);
    }
  }
}

TEST_CASE("full intercept-resend drives BB84 sifted QBER to one quarter") {
  ChannelModel channel;  // noiseless, so the attack is the only error source
  channel.eve.kind = EveKind::InterceptResend;
  RandomStream rng(32);
  const auto run = run_bb84(400000, channel, SourceModel{}, rng, false);
  const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(run.alice.size()));
  CHECK(std::fabs(run.transcript.summary.qber - 0.25) <= 3 * sigma);
}

TEST_CASE("no adversary leaves a noiseless channel error-free") {
  ChannelModel channel;
  RandomStream rng(33);
  const auto run = run_bb84(50000, channel, SourceModel{}, rng, false);
  CHECK(run.transcript.summary.qber == 0.0);
}

TEST_CASE("siphon conserves photons and respects the stage mask") {
  RandomStream rng(34);
  const EveStrategy eve = make_siphon(0.3, 0b101, false);
  for (int i = 0; i < 2000; ++i) {
    const Pulse pulse{{0.2}, rng.next_below(6)};
    for (int stage = 0; stage < 3; ++stage) {
      const auto result = apply_siphon(pulse, eve, stage, rng);
      CHECK(result.forwarded.photon_count + result.stolen.photon_count ==
            pulse.photon_count);
      if (stage == 1) {
        CHECK(result.stolen.photon_count == 0);
      }
    }
  }
}

TEST_CASE("a none strategy is an identity on every pulse") {
  RandomStream rng(35);
  const EveStrategy none{};
  const Pulse pulse{{1.0}, 3};
  const auto result = apply_siphon(pulse, none, 0, rng);
  CHECK(result.forwarded.photon_count == 3);
  CHECK(result.stolen.photon_count == 0);
}

TEST_CASE("plain taps on all three traversals compound multiplicatively") {
  ChannelModel channel;
  channel.eve = make_siphon(0.2, 0b111, false);
  RandomStream rng(36);
  const auto run = run_three_stage(100000, channel, rng, false);
  // survival (1 - 0.2)^3 = 0.512 per single-photon pulse
  const double p = 0.512;
  const double sigma = std::sqrt(p * (1 - p) / 100000.0);
  CHECK(std::fabs(run.transcript.summary.mean_received_count - p) <= 3 * sigma);
}

TEST_CASE("photon-number-splitting barely dents a weak Poisson source") {
  ChannelModel channel;
  channel.eve = make_siphon(0.2, 0b1, true);
  SourceModel source{true, 0.1};
  RandomStream rng(37);
  const auto run = run_bb84(200000, channel, source, rng, false);
  // stolen mean = P(n >= 2) = 1 - e^-mu - mu e^-mu ~ 0.00468 at mu = 0.1
  const double stolen = 1.0 - std::exp(-0.1) - 0.1 * std::exp(-0.1);
  const double expect = 0.1 - stolen;
  const double sigma = std::sqrt(0.1 / 200000.0);
  CHECK(std::fabs(run.transcript.summary.mean_received_count - expect) <= 4 * sigma);
  CHECK(stolen / 0.1 < 0.05);  // under five percent relative reduction
}

TEST_CASE("intensity monitor thresholding") {
  const IntensityMonitor monitor{1.0, 0.9};
  std::vector<std::uint64_t> dimmed(1000, 0);
  for (std::size_t i = 0; i < 512; ++i) {
    dimmed[i] = 1;  // mean 0.512, the full three-stage tap level
  }
  CHECK(monitor_alarm(dimmed, monitor));
  const std::vector<std::uint64_t> nominal(1000, 1);
  CHECK_FALSE(monitor_alarm(nominal, monitor));
  CHECK_THROWS_AS(monitor_alarm(std::vector<std::uint64_t>{}, monitor), std::domain_error);
}

TEST_CASE("the intensity asymmetry between BB84 and the three-stage protocol") {
  // Tapping every stage of the three-stage protocol dims the output well
  // below threshold; PNS on BB84 at mu = 0.1 does not.
  RandomStream rng(38);
  int three_stage_alarms = 0;
  int bb84_alarms = 0;
  const int windows = 20;
  for (int w = 0; w < windows; ++w) {
    ChannelModel tapped;
    tapped.eve = make_siphon(0.2, 0b111, false);
    RandomStream wrng(rng.next_u64());
    const auto three = run_three_stage(10000, tapped, wrng, false);
    std::vector<std::uint64_t> counts(three.transcript.received_counts.begin(),
                                      three.transcript.received_counts.end());
    three_stage_alarms += monitor_alarm(counts, IntensityMonitor{1.0, 0.9}) ? 1 : 0;

    ChannelModel pns;
    pns.eve = make_siphon(0.2, 0b1, true);
    RandomStream brng(rng.next_u64());
    const auto bb = run_bb84(10000, pns, SourceModel{true, 0.1}, brng, false);
    std::vector<std::uint64_t> bcounts(bb.transcript.received_counts.begin(),
                                       bb.transcript.received_counts.end());
    bb84_alarms += monitor_alarm(bcounts, IntensityMonitor{0.1, 0.9}) ? 1 : 0;
  }
  CHECK(three_stage_alarms == windows);
  CHECK(bb84_alarms <= 3);
}
