#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <sstream>

#include "noise.hpp"
#include "protocol.hpp"
#include "rng.hpp"

using namespace polarqkd;

namespace {

ChannelModel noisy(double x) {
  ChannelModel channel;
  channel.noise = make_link_noise(x);
  return channel;
}

}  // namespace

TEST_CASE("round count boundaries") {
  ChannelModel quiet;
  RandomStream rng(40);
  CHECK_THROWS_AS(run_bb84(0, quiet, SourceModel{}, rng), std::domain_error);
  CHECK_THROWS_AS(run_two_stage(0, quiet, rng), std::domain_error);
  CHECK_THROWS_AS(run_three_stage(0, quiet, rng), std::domain_error);
  const auto one = run_bb84(1, quiet, SourceModel{}, rng);
  CHECK(one.transcript.rounds.size() == 1);
  CHECK(one.transcript.summary.rounds == 1);
}

TEST_CASE("noiseless BB84 sifts half the rounds with zero QBER") {
  ChannelModel quiet;
  RandomStream rng(41);
  const auto run = run_bb84(100000, quiet, SourceModel{}, rng, false);
  const double sigma = std::sqrt(0.25 / 100000.0);
  CHECK(std::fabs(run.transcript.summary.sift_rate - 0.5) <= 3 * sigma);
  CHECK(run.transcript.summary.qber == 0.0);
  CHECK(run.alice.size() == run.bob.size());
}

TEST_CASE("BB84 QBER matches the single-link closed form") {
  RandomStream rng(42);
  const auto run = run_bb84(400000, noisy(0.1), SourceModel{}, rng, false);
  const double p = error_prob_exact(0.1, 1);
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(run.alice.size()));
  CHECK(std::fabs(run.transcript.summary.qber - p) <= 3 * sigma);
}

TEST_CASE("noiseless two-stage and three-stage agree bit for bit") {
  ChannelModel quiet;
  RandomStream rng(43);
  const auto two = run_two_stage(100000, quiet, rng, false);
  CHECK(two.alice.bits == two.bob.bits);
  CHECK(two.transcript.summary.qber == 0.0);
  const auto three = run_three_stage(100000, quiet, rng, false);
  CHECK(three.alice.bits == three.bob.bits);
  CHECK(three.transcript.summary.qber == 0.0);
}

TEST_CASE("a quarter-turn choice decodes as bit one through the round trip") {
  // Bob's key bit 1: vertical reference -> theta -> +pi/2 -> -theta is
  // horizontal, i.e. bit 1 in the rectilinear convention.
  RandomStream rng(44);
  for (int i = 0; i < 200; ++i) {
    const double theta = rng.next_double() * kPi;
    PolarizationState s = encode_bit(0, kRectilinear);
    s = rotate(rotate(rotate(s, theta), kPi / 2), -theta);
    const auto out = measure(Pulse{s, 1}, kRectilinear, rng);
    CHECK(out.bit == 1);
  }
}

TEST_CASE("protocol QBER tracks the n-traversal closed form") {
  const std::uint64_t bits = 200000;
  int protocol_index = 0;
  for (double x : {0.02, 0.05, 0.1}) {
    RandomStream rng(45 + protocol_index++);
    const auto two = run_two_stage(bits, noisy(x), rng, false);
    const double p2 = error_prob_exact(x, 2);
    CHECK(std::fabs(two.transcript.summary.qber - p2) <=
          3 * std::sqrt(p2 * (1 - p2) / bits));
    const auto three = run_three_stage(bits, noisy(x), rng, false);
    const double p3 = error_prob_exact(x, 3);
    CHECK(std::fabs(three.transcript.summary.qber - p3) <=
          3 * std::sqrt(p3 * (1 - p3) / bits));
  }
}

TEST_CASE("three-stage to single-link QBER ratio sits just under three") {
  const double ratio = error_prob_exact(0.1, 3) / error_prob_exact(0.1, 1);
  CHECK(ratio >= 2.9);
  CHECK(ratio <= 3.0);
}

TEST_CASE("the optional fourth equipment draw raises the three-stage error") {
  RandomStream rng(46);
  ChannelModel four_draws = noisy(0.1);
  four_draws.bob_final_rotation_noise = true;
  const auto run = run_three_stage(300000, four_draws, rng, false);
  const double p4 = error_prob_exact(0.1, 4);
  CHECK(std::fabs(run.transcript.summary.qber - p4) <=
        3 * std::sqrt(p4 * (1 - p4) / 300000.0));
}

TEST_CASE("identical seeds reproduce identical transcripts") {
  for (int kind = 0; kind < 3; ++kind) {
    auto run_once = [&] {
      RandomStream rng(4242);
      switch (kind) {
        case 0:
          return run_bb84(2000, noisy(0.05), SourceModel{}, rng);
        case 1:
          return run_two_stage(2000, noisy(0.05), rng);
        default:
          return run_three_stage(2000, noisy(0.05), rng);
      }
    };
    const auto a = run_once();
    const auto b = run_once();
    std::ostringstream sa, sb;
    write_transcript(sa, a.transcript);
    write_transcript(sb, b.transcript);
    CHECK(sa.str() == sb.str());
    CHECK(a.alice.bits == b.alice.bits);
    CHECK(a.bob.bits == b.bob.bits);
  }
}

TEST_CASE("transcript rounds carry the fields of their protocol") {
  RandomStream rng(47);
  const auto bb = run_bb84(50, noisy(0.1), SourceModel{}, rng);
  for (const auto& r : bb.transcript.rounds) {
    CHECK(r.n_link_errors == 1);
    CHECK(r.bob_choice == -1);
  }
  const auto two = run_two_stage(50, noisy(0.1), rng);
  for (const auto& r : two.transcript.rounds) {
    CHECK(r.n_link_errors == 2);
    CHECK((r.bob_choice == 0 || r.bob_choice == 1));
    CHECK(r.alice_theta >= 0.0);
    CHECK(r.alice_theta < kPi);
  }
  const auto three = run_three_stage(50, noisy(0.1), rng);
  for (const auto& r : three.transcript.rounds) {
    CHECK(r.n_link_errors == 3);
    CHECK(r.bob_phi >= 0.0);
    CHECK(r.bob_phi < kPi);
  }
}

TEST_CASE("transcript lines follow the documented field order") {
  RandomStream rng(48);
  const auto run = run_two_stage(3, noisy(0.1), rng);
  std::ostringstream out;
  write_transcript(out, run.transcript);
  std::istringstream lines(out.str());
  std::string line;
  std::uint64_t expected_index = 0;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string index, protocol, data_bit, theta, phi, choice, ab, bb, errors, measured,
        detected, received;
    fields >> index >> protocol >> data_bit >> theta >> phi >> choice >> ab >> bb >>
        errors >> measured >> detected >> received;
    CHECK(index == std::to_string(expected_index++));
    CHECK(protocol == "two-stage");
    CHECK(phi == "-");
    CHECK(ab == "-");
    CHECK(errors.find(',') != std::string::npos);  // two traversals
    CHECK(received == "1");
  }
  CHECK(expected_index == 3);
}

TEST_CASE("per-traversal noise widths compose like the heterogeneous closed form") {
  RandomStream rng(49);
  ChannelModel channel;
  channel.noise = make_link_noise(0.1);
  channel.per_traversal_half_widths = {0.02, 0.1};
  const auto run = run_two_stage(300000, channel, rng, false);
  const double widths[] = {0.02, 0.1};
  const double p = error_prob_exact(widths);
  CHECK(std::fabs(run.transcript.summary.qber - p) <=
        3 * std::sqrt(p * (1 - p) / 300000.0));
}
