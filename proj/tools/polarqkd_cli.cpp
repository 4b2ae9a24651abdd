// polarqkd command-line harness. Talks to the core strictly through the
// public C API in polarqkd.h.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "polarqkd.h"

namespace {

int fail(int code) {
  std::fprintf(stderr, "polarqkd: %s\n", pqkd_last_error());
  return code;
}

int emit(const char* text, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(text, stdout);
    return PQKD_OK;
  }
  std::FILE* f = std::fopen(out_path.c_str(), "w");
  if (f == nullptr) {
    std::fprintf(stderr, "polarqkd: cannot write %s\n", out_path.c_str());
    return PQKD_ERR_USAGE;
  }
  std::fputs(text, f);
  std::fclose(f);
  return PQKD_OK;
}

struct OwnedText {
  char* text = nullptr;
  ~OwnedText() { pqkd_free(text); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and noise-analysis toolkit for rotation-based QKD protocols"};
  app.require_subcommand(1);

  unsigned long long seed = 42;
  std::string out_path;
  bool strict = false;
  std::string config_path;
  app.add_option("--seed", seed, "Master seed for all randomness");
  app.add_option("--out", out_path, "Write the primary output to this path");
  app.add_flag("--strict", strict, "Exit 3 when a statistical self-check fails");
  app.add_option("--config", config_path, "Run configuration file (simulate)");

  auto* analyze = app.add_subcommand("analyze", "Evaluate the link-noise error formulas");
  double ax = 0.1;
  int alinks = 1;
  analyze->add_option("--x", ax, "Noise half-width in radians")->required();
  analyze->add_option("--links", alinks, "Number of noisy traversals")->capture_default_str();

  auto* figure = app.add_subcommand("figure", "Emit an error-probability curve as CSV");
  int figure_id = 4;
  double x_min = 0.01;
  double x_max = 0.1;
  int grid_steps = 10;
  long long trials = 100000;
  figure->add_option("--id", figure_id, "Curve id: 4 (one link) or 6 (two links)")
      ->required();
  figure->add_option("--x-min", x_min, "Grid start")->capture_default_str();
  figure->add_option("--x-max", x_max, "Grid end")->capture_default_str();
  figure->add_option("--steps", grid_steps, "Grid points")->capture_default_str();
  figure->add_option("--trials", trials, "Monte Carlo trials per point")
      ->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Run a protocol Monte Carlo experiment");
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string protocol, noise_x, source, eve, transcript_out;
  long long rounds = -1, sim_trials = -1;
  simulate->add_option("--protocol", protocol, "bb84 | two-stage | three-stage");
  simulate->add_option("--x", noise_x, "Noise half-width(s), comma separated");
  simulate->add_option("--rounds", rounds, "Rounds / key bits per trial");
  simulate->add_option("--trials", sim_trials, "Independent repetitions");
  simulate->add_option("--source", source, "single | poisson");
  double source_mean = -1.0;
  simulate->add_option("--mu", source_mean, "Poisson source mean photon number");
  simulate->add_option("--eve", eve, "none | intercept | siphon");
  double eve_tap = -1.0;
  std::string eve_stages;
  int eve_pns = -1, reconcile_flag = -1;
  simulate->add_option("--eve-tap", eve_tap, "Siphon tap fraction");
  simulate->add_option("--eve-stages", eve_stages, "Tapped traversals, comma separated");
  simulate->add_option("--eve-pns", eve_pns, "1 = divert only surplus photons");
  simulate->add_option("--reconcile", reconcile_flag, "1 = reconcile + hash-verify keys");
  simulate->add_option("--transcript-out", transcript_out,
                       "Write the per-round transcript here");

  auto* recon = app.add_subcommand("reconcile-demo",
                                   "Reconcile a synthetic key pair at a given error rate");
  double rq = 0.01;
  long long rbits = 1024;
  recon->add_option("--qber", rq, "Bit error rate of the synthetic pair")->required();
  recon->add_option("--bits", rbits, "Key length")->capture_default_str();

  auto* selftest = app.add_subcommand("self-test", "Run internal consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : PQKD_ERR_USAGE;
  }

  if (analyze->parsed()) {
    OwnedText text;
    const int rc = pqkd_analyze(ax, alinks, &text.text);
    if (rc != PQKD_OK) {
      return fail(rc);
    }
    return emit(text.text, out_path);
  }

  if (figure->parsed()) {
    OwnedText csv;
    const int rc = pqkd_figure(figure_id, x_min, x_max, grid_steps, trials, seed,
                               strict ? 1 : 0, out_path.empty() ? nullptr : out_path.c_str(),
                               &csv.text);
    if (rc == PQKD_ERR_USAGE) {
      return fail(rc);
    }
    if (out_path.empty()) {
      std::fputs(csv.text, stdout);
    }
    if (rc == PQKD_ERR_STATCHECK) {
      return fail(rc);
    }
    return PQKD_OK;
  }

  if (simulate->parsed()) {
    pqkd_config* config =
        config_path.empty() ? pqkd_config_new() : pqkd_config_load(config_path.c_str());
    if (config == nullptr) {
      return fail(PQKD_ERR_USAGE);
    }
    overrides.emplace_back("seed", std::to_string(seed));
    if (!protocol.empty()) overrides.emplace_back("protocol", protocol);
    if (!noise_x.empty()) overrides.emplace_back("noise_x", noise_x);
    if (rounds >= 0) overrides.emplace_back("rounds", std::to_string(rounds));
    if (sim_trials >= 0) overrides.emplace_back("trials", std::to_string(sim_trials));
    if (!source.empty()) overrides.emplace_back("source", source);
    if (source_mean >= 0) overrides.emplace_back("source_mean", std::to_string(source_mean));
    if (!eve.empty()) overrides.emplace_back("eve", eve);
    if (eve_tap >= 0) overrides.emplace_back("eve_tap", std::to_string(eve_tap));
    if (!eve_stages.empty()) overrides.emplace_back("eve_stages", eve_stages);
    if (eve_pns >= 0) overrides.emplace_back("eve_pns", std::to_string(eve_pns));
    if (reconcile_flag >= 0)
      overrides.emplace_back("reconcile", std::to_string(reconcile_flag));
    if (!transcript_out.empty()) overrides.emplace_back("transcript_out", transcript_out);
    if (!out_path.empty()) overrides.emplace_back("out", out_path);
    for (const auto& [key, value] : overrides) {
      if (pqkd_config_set(config, key.c_str(), value.c_str()) != PQKD_OK) {
        pqkd_config_free(config);
        return fail(PQKD_ERR_USAGE);
      }
    }
    OwnedText report;
    const int rc = pqkd_simulate(config, &report.text);
    pqkd_config_free(config);
    if (rc != PQKD_OK) {
      return fail(rc);
    }
    return emit(report.text, out_path);
  }

  if (recon->parsed()) {
    OwnedText report;
    const int rc = pqkd_reconcile_demo(rq, rbits, seed, &report.text);
    if (rc != PQKD_OK) {
      return fail(rc);
    }
    return emit(report.text, out_path);
  }

  if (selftest->parsed()) {
    OwnedText report;
    const int rc = pqkd_self_test(seed, &report.text);
    if (report.text != nullptr) {
      emit(report.text, out_path);
    }
    if (rc == PQKD_ERR_USAGE) {
      return fail(rc);
    }
    return rc;
  }

  return PQKD_ERR_USAGE;
}
