#ifndef POLARQKD_EXPERIMENTS_HPP
#define POLARQKD_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "keypost.hpp"
#include "protocol.hpp"

namespace polarqkd {

// Flat key=value run configuration; see RunConfig::to_text for the schema.
struct RunConfig {
  int schema_version = 1;
  ProtocolKind protocol = ProtocolKind::ThreeStage;
  std::vector<double> noise_x = {0.1};
  std::uint64_t rounds = 100000;
  std::uint64_t trials = 1;
  std::uint64_t seed = 42;
  SourceModel source{};
  EveKind eve_kind = EveKind::None;
  double eve_tap = 0.2;
  std::uint32_t eve_stages = 0;
  bool eve_pns = false;
  bool reconcile_enabled = false;
  int recon_passes = 4;
  int recon_block = 0;  // 0 = auto
  double monitor_threshold = 0.9;
  std::string out_path;         // summary report destination ("" = stdout only)
  std::string transcript_path;  // "" = no transcript file

  static RunConfig from_file(const std::string& path);
  static RunConfig from_text(const std::string& text);
  std::string to_text() const;
  // Throws std::invalid_argument on unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);

  ChannelModel channel() const;
  EveStrategy eve() const;
};

struct AnalyzeResult {
  double x = 0.0;
  int links = 1;
  double exact = 0.0;
  double series = 0.0;
  double quadrature = 0.0;
  int quadrature_steps = 10000;

  std::string to_text() const;
};

// Closed form, small-x series, and Simpson quadrature side by side.
// x == 0 returns all zeros by continuity.
AnalyzeResult analyze(double x, int links);

struct CurvePoint {
  double x = 0.0;
  double analytic_exact = 0.0;
  double analytic_series = 0.0;
  double monte_carlo = 0.0;
  std::uint64_t trials = 0;
  double std_error = 0.0;
  bool pass = false;  // |monte_carlo - analytic_exact| <= 3 * std_error
};

struct FigureResult {
  int figure_id = 4;
  std::vector<CurvePoint> points;
  bool all_pass = false;

  std::string to_csv() const;
};

// Figure 4 reproduces the single-link error-probability curve, figure 6 the
// two-link curve. Monte Carlo trials fan out over fixed per-chunk seeds, so
// the result is independent of the worker count (POLARQKD_THREADS).
FigureResult run_figure(int figure_id, double x_min, double x_max, int grid_steps,
                        std::uint64_t trials, std::uint64_t seed);

struct SimulateResult {
  std::string report;       // key-value text block
  bool alarm = false;       // intensity monitor verdict of the last trial
  double qber_mean = 0.0;   // across trials
};

// Runs the configured protocol `trials` times with derived seeds; writes a
// transcript for the first trial when config.transcript_path is set.
SimulateResult run_simulation(const RunConfig& config);

struct ReconcileDemoResult {
  ReconciliationReport report;
  std::string text;
};

// Synthesizes a key pair with independent bit flips at the given rate, then
// reconciles and hash-verifies it.
ReconcileDemoResult run_reconcile_demo(double qber_rate, std::uint64_t key_bits,
                                       std::uint64_t seed);

struct SelfTestResult {
  bool pass = false;
  std::string report;  // one line per check
};

// Fast internal consistency checks (formula vs quadrature, noiseless
// protocol correctness, reconciliation, determinism).
SelfTestResult run_self_test(std::uint64_t seed);

// Worker count for Monte Carlo fan-out: POLARQKD_THREADS caps it; never
// affects output bytes.
int worker_count();

}  // namespace polarqkd

#endif  // POLARQKD_EXPERIMENTS_HPP
