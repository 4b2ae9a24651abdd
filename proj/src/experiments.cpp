#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "noise.hpp"

namespace polarqkd {

namespace {

constexpr int kMonteCarloChunks = 64;

std::string fmt10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return std::string(buf);
}

std::string join_widths(const std::vector<double>& widths) {
  std::string out;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i) {
      out += ",";
    }
    out += fmt10(widths[i]);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(std::stod(item));
  }
  if (out.empty()) {
    throw std::invalid_argument("empty numeric list");
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "0" || v == "false") {
    return false;
  }
  if (v == "1" || v == "true") {
    return true;
  }
  throw std::invalid_argument("expected boolean 0/1");
}

// Deterministic fan-out: every chunk has a fixed seed and the results are
// combined in chunk order, so the worker count never changes the output.
template <typename ChunkFn>
void parallel_chunks(int chunks, ChunkFn&& fn) {
  const int workers = std::min(worker_count(), chunks);
  if (workers <= 1) {
    for (int c = 0; c < chunks; ++c) {
      fn(c);
    }
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int c = w; c < chunks; c += workers) {
        fn(c);
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
}

std::uint64_t count_flips(int links, double x, std::uint64_t trials,
                          std::uint64_t chunk_seed) {
  RandomStream rng(chunk_seed);
  std::uint64_t flips = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    double sum = 0.0;
    for (int j = 0; j < links; ++j) {
      sum += (2.0 * rng.next_double() - 1.0) * x;
    }
    const double s = std::sin(sum);
    if (rng.next_double() < s * s) {
      ++flips;
    }
  }
  return flips;
}

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("POLARQKD_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1 && n <= 256) {
      return static_cast<int>(n);
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 4;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_text(buffer.str());
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig config;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("malformed config line: " + line);
    }
    config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  if (config.schema_version != 1) {
    throw std::invalid_argument("unsupported schema_version");
  }
  return config;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "schema_version") {
    schema_version = std::stoi(value);
  } else if (key == "protocol") {
    if (value == "bb84") {
      protocol = ProtocolKind::Bb84;
    } else if (value == "two-stage") {
      protocol = ProtocolKind::TwoStage;
    } else if (value == "three-stage") {
      protocol = ProtocolKind::ThreeStage;
    } else {
      throw std::invalid_argument("unknown protocol: " + value);
    }
  } else if (key == "noise_x") {
    noise_x = parse_double_list(value);
  } else if (key == "rounds") {
    rounds = std::stoull(value);
  } else if (key == "trials") {
    trials = std::stoull(value);
  } else if (key == "seed") {
    seed = std::stoull(value);
  } else if (key == "source") {
    if (value == "single") {
      source.poisson = false;
    } else if (value == "poisson") {
      source.poisson = true;
    } else {
      throw std::invalid_argument("unknown source model: " + value);
    }
  } else if (key == "source_mean") {
    source.mean = std::stod(value);
  } else if (key == "eve") {
    if (value == "none") {
      eve_kind = EveKind::None;
    } else if (value == "intercept") {
      eve_kind = EveKind::InterceptResend;
    } else if (value == "siphon") {
      eve_kind = EveKind::Siphon;
    } else {
      throw std::invalid_argument("unknown eve strategy: " + value);
    }
  } else if (key == "eve_tap") {
    eve_tap = std::stod(value);
  } else if (key == "eve_stages") {
    eve_stages = 0;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const int stage = std::stoi(item);
      if (stage < 0 || stage > 31) {
        throw std::invalid_argument("eve stage out of range");
      }
      eve_stages |= 1u << stage;
    }
  } else if (key == "eve_pns") {
    eve_pns = parse_bool(value);
  } else if (key == "reconcile") {
    reconcile_enabled = parse_bool(value);
  } else if (key == "recon_passes") {
    recon_passes = std::stoi(value);
  } else if (key == "recon_block") {
    recon_block = value == "auto" ? 0 : std::stoi(value);
  } else if (key == "monitor_threshold") {
    monitor_threshold = std::stod(value);
  } else if (key == "out") {
    out_path = value;
  } else if (key == "transcript_out") {
    transcript_path = value;
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  out << "schema_version=" << schema_version << "\n"
      << "protocol=" << protocol_name(protocol) << "\n"
      << "noise_x=" << join_widths(noise_x) << "\n"
      << "rounds=" << rounds << "\n"
      << "trials=" << trials << "\n"
      << "seed=" << seed << "\n"
      << "source=" << (source.poisson ? "poisson" : "single") << "\n"
      << "source_mean=" << fmt10(source.mean) << "\n"
      << "eve="
      << (eve_kind == EveKind::None
              ? "none"
              : eve_kind == EveKind::InterceptResend ? "intercept" : "siphon")
      << "\n"
      << "eve_tap=" << fmt10(eve_tap) << "\n"
      << "eve_stages=";
  bool first = true;
  for (int stage = 0; stage < 32; ++stage) {
    if ((eve_stages >> stage) & 1u) {
      out << (first ? "" : ",") << stage;
      first = false;
    }
  }
  out << "\n"
      << "eve_pns=" << (eve_pns ? 1 : 0) << "\n"
      << "reconcile=" << (reconcile_enabled ? 1 : 0) << "\n"
      << "recon_passes=" << recon_passes << "\n"
      << "recon_block=";
  if (recon_block == 0) {
    out << "auto";
  } else {
    out << recon_block;
  }
  out << "\n"
      << "monitor_threshold=" << fmt10(monitor_threshold) << "\n"
      << "out=" << out_path << "\n"
      << "transcript_out=" << transcript_path << "\n";
  return out.str();
}

EveStrategy RunConfig::eve() const {
  EveStrategy strategy;
  strategy.kind = eve_kind;
  if (eve_kind == EveKind::Siphon) {
    strategy = make_siphon(eve_tap, eve_stages, eve_pns);
  }
  return strategy;
}

ChannelModel RunConfig::channel() const {
  ChannelModel channel;
  channel.noise = make_link_noise(noise_x.front());
  if (noise_x.size() > 1) {
    channel.per_traversal_half_widths = noise_x;
  }
  channel.eve = eve();
  return channel;
}

std::string AnalyzeResult::to_text() const {
  std::ostringstream out;
  out << "x=" << fmt10(x) << "\n"
      << "links=" << links << "\n"
      << "exact=" << fmt10(exact) << "\n"
      << "series=" << fmt10(series) << "\n"
      << "quadrature=" << fmt10(quadrature) << "\n"
      << "quadrature_steps=" << quadrature_steps << "\n"
      << "exact_minus_quadrature=" << fmt10(exact - quadrature) << "\n"
      << "series_minus_exact=" << fmt10(series - exact) << "\n";
  return out.str();
}

AnalyzeResult analyze(double x, int links) {
  if (links < 1 || x < 0.0 || x > 0.5) {
    throw std::domain_error("analyze: requires links >= 1 and x in [0, 0.5]");
  }
  AnalyzeResult result;
  result.x = x;
  result.links = links;
  if (x == 0.0) {
    return result;  // all probabilities vanish by continuity
  }
  result.exact = error_prob_exact(x, links);
  result.series = error_prob_series(x, links);
  result.quadrature = error_prob_quadrature(x, links, result.quadrature_steps);
  return result;
}

std::string FigureResult::to_csv() const {
  std::string csv = "x,analytic_exact,analytic_series,monte_carlo,trials,std_error\n";
  for (const CurvePoint& p : points) {
    csv += fmt10(p.x) + "," + fmt10(p.analytic_exact) + "," + fmt10(p.analytic_series) +
           "," + fmt10(p.monte_carlo) + "," + std::to_string(p.trials) + "," +
           fmt10(p.std_error) + "\n";
  }
  return csv;
}

FigureResult run_figure(int figure_id, double x_min, double x_max, int grid_steps,
                        std::uint64_t trials, std::uint64_t seed) {
  if (figure_id != 4 && figure_id != 6) {
    throw std::domain_error("run_figure: figure_id must be 4 or 6");
  }
  if (!(x_min > 0.0 && x_min < x_max && x_max <= 0.5)) {
    throw std::domain_error("run_figure: requires 0 < x_min < x_max <= 0.5");
  }
  if (grid_steps < 2 || trials < 1) {
    throw std::domain_error("run_figure: requires grid_steps >= 2 and trials >= 1");
  }
  const int links = figure_id == 4 ? 1 : 2;

  FigureResult result;
  result.figure_id = figure_id;
  result.all_pass = true;
  for (int i = 0; i < grid_steps; ++i) {
    const double x = x_min + (x_max - x_min) * i / (grid_steps - 1);
    CurvePoint point;
    point.x = x;
    point.analytic_exact = error_prob_exact(x, links);
    point.analytic_series = error_prob_series(x, links);
    point.trials = trials;

    const std::uint64_t point_seed = RandomStream::derive_seed(seed, i);
    std::uint64_t chunk_flips[kMonteCarloChunks] = {};
    parallel_chunks(kMonteCarloChunks, [&](int chunk) {
      const std::uint64_t base = trials / kMonteCarloChunks;
      const std::uint64_t extra = trials % kMonteCarloChunks;
      const std::uint64_t chunk_trials =
          base + (static_cast<std::uint64_t>(chunk) < extra ? 1 : 0);
      chunk_flips[chunk] = count_flips(links, x, chunk_trials,
                                       RandomStream::derive_seed(point_seed, chunk));
    });
    std::uint64_t flips = 0;
    for (std::uint64_t f : chunk_flips) {
      flips += f;
    }
    point.monte_carlo = static_cast<double>(flips) / static_cast<double>(trials);
    const double p = point.analytic_exact;
    point.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    point.pass = std::fabs(point.monte_carlo - p) <= 3.0 * point.std_error;
    result.all_pass = result.all_pass && point.pass;
    result.points.push_back(point);
  }
  return result;
}

SimulateResult run_simulation(const RunConfig& config) {
  if (config.rounds < 1 || config.trials < 1) {
    throw std::invalid_argument("run_simulation: rounds and trials must be >= 1");
  }
  const ChannelModel channel = config.channel();

  std::ostringstream report;
  report << "schema_version=1\n"
         << "protocol=" << protocol_name(config.protocol) << "\n"
         << "rounds=" << config.rounds << "\n"
         << "trials=" << config.trials << "\n"
         << "seed=" << config.seed << "\n"
         << "noise_x=" << join_widths(config.noise_x) << "\n";

  double qber_sum = 0.0;
  double sift_sum = 0.0;
  double intensity_sum = 0.0;
  int alarms = 0;
  bool last_alarm = false;

  for (std::uint64_t trial = 0; trial < config.trials; ++trial) {
    RandomStream rng(RandomStream::derive_seed(config.seed, trial));
    const bool record = trial == 0 && !config.transcript_path.empty();
    ProtocolResult run;
    switch (config.protocol) {
      case ProtocolKind::Bb84:
        run = run_bb84(config.rounds, channel, config.source, rng, record);
        break;
      case ProtocolKind::TwoStage:
        run = run_two_stage(config.rounds, channel, rng, record);
        break;
      case ProtocolKind::ThreeStage:
        run = run_three_stage(config.rounds, channel, rng, record);
        break;
    }

    if (record) {
      std::ofstream out(config.transcript_path);
      if (!out) {
        throw std::runtime_error("cannot write transcript: " + config.transcript_path);
      }
      write_transcript(out, run.transcript);
    }

    const double expected_mean = config.source.poisson ? config.source.mean : 1.0;
    const IntensityMonitor monitor{expected_mean, config.monitor_threshold};
    std::vector<std::uint64_t> counts(run.transcript.received_counts.begin(),
                                      run.transcript.received_counts.end());
    const bool alarm = monitor_alarm(counts, monitor);

    const auto& s = run.transcript.summary;
    report << "trial=" << trial << " qber=" << fmt10(s.qber)
           << " sift_rate=" << fmt10(s.sift_rate) << " detections=" << s.detections
           << " mean_received_count=" << fmt10(s.mean_received_count)
           << " alarm=" << (alarm ? 1 : 0) << "\n";

    qber_sum += s.qber;
    sift_sum += s.sift_rate;
    intensity_sum += s.mean_received_count;
    alarms += alarm ? 1 : 0;
    last_alarm = alarm;

    if (trial == 0 && config.reconcile_enabled) {
      ReconciliationConfig recon;
      recon.block_length = config.recon_block;
      recon.passes = config.recon_passes;
      recon.permutation_seed = RandomStream::derive_seed(config.seed, 0xC0FFEE);
      recon.qber_estimate = std::max(s.qber, 1e-3);
      const ReconcileResult rec = reconcile(run.alice, run.bob, recon);
      report << "recon_parities_compared=" << rec.report.parities_compared << "\n"
             << "recon_bits_deleted=" << rec.report.bits_deleted << "\n"
             << "recon_errors_corrected=" << rec.report.errors_corrected << "\n"
             << "recon_final_length=" << rec.report.final_length << "\n"
             << "recon_hash_match=" << (rec.report.hash_match ? "true" : "false") << "\n"
             << "alice_digest=" << digest(rec.alice).to_hex() << "\n"
             << "bob_digest=" << digest(rec.bob).to_hex() << "\n";
    }
  }

  const double n = static_cast<double>(config.trials);
  report << "qber_mean=" << fmt10(qber_sum / n) << "\n"
         << "sift_rate_mean=" << fmt10(sift_sum / n) << "\n"
         << "mean_received_count_mean=" << fmt10(intensity_sum / n) << "\n"
         << "alarm_fraction=" << fmt10(alarms / n) << "\n";

  SimulateResult result;
  result.report = report.str();
  result.alarm = last_alarm;
  result.qber_mean = qber_sum / n;
  return result;
}

ReconcileDemoResult run_reconcile_demo(double qber_rate, std::uint64_t key_bits,
                                       std::uint64_t seed) {
  if (!(qber_rate > 0.0 && qber_rate < 0.5)) {
    throw std::domain_error("run_reconcile_demo: rate must be in (0, 0.5)");
  }
  if (key_bits < 2) {
    throw std::domain_error("run_reconcile_demo: key_bits must be >= 2");
  }
  RandomStream rng(seed);
  KeyBits alice;
  KeyBits bob;
  alice.role = bob.role = KeyRole::Sifted;
  for (std::uint64_t i = 0; i < key_bits; ++i) {
    const std::uint8_t bit = static_cast<std::uint8_t>(rng.next_bit());
    alice.bits.push_back(bit);
    bob.bits.push_back(rng.next_double() < qber_rate ? bit ^ 1 : bit);
  }

  ReconciliationConfig config;
  config.block_length = 0;
  config.qber_estimate = qber_rate;
  config.passes = 4;
  config.permutation_seed = RandomStream::derive_seed(seed, 1);
  const ReconcileResult rec = reconcile(alice, bob, config);

  ReconcileDemoResult result;
  result.report = rec.report;
  std::ostringstream text;
  text << "qber=" << fmt10(qber_rate) << "\n"
       << "key_bits=" << key_bits << "\n"
       << "seed=" << seed << "\n"
       << "initial_mismatches="
       << static_cast<std::uint64_t>(std::llround(qber(alice, bob) * key_bits)) << "\n"
       << rec.report.to_text() << "alice_digest=" << digest(rec.alice).to_hex() << "\n"
       << "bob_digest=" << digest(rec.bob).to_hex() << "\n";
  result.text = text.str();
  return result;
}

SelfTestResult run_self_test(std::uint64_t seed) {
  SelfTestResult result;
  result.pass = true;
  std::ostringstream report;
  auto check = [&](const char* name, bool ok) {
    report << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
    result.pass = result.pass && ok;
  };

  bool quad_ok = true;
  for (int n = 1; n <= 3; ++n) {
    for (double x : {0.02, 0.1}) {
      quad_ok = quad_ok &&
                std::fabs(error_prob_exact(x, n) - error_prob_quadrature(x, n, 10000)) <=
                    1e-9;
    }
  }
  check("closed form agrees with quadrature (1e-9)", quad_ok);

  check("series within 1e-6 of single-link exact at x=0.1",
        std::fabs(error_prob_series(0.1, 1) - error_prob_single_exact(0.1)) <= 1e-6);

  bool pdf_ok = true;
  for (int n = 1; n <= 4; ++n) {
    const double x = 0.1;
    const int steps = 20000;
    const double h = 2.0 * n * x / steps;
    double sum = pdf_sum_links(n, x, -n * x) + pdf_sum_links(n, x, n * x);
    for (int i = 1; i < steps; ++i) {
      sum += (i % 2 == 1 ? 4.0 : 2.0) * pdf_sum_links(n, x, -n * x + i * h);
    }
    pdf_ok = pdf_ok && std::fabs(sum * h / 3.0 - 1.0) <= 1e-8;
  }
  check("link-sum density normalizes to 1", pdf_ok);

  {
    RandomStream rng(seed);
    ChannelModel quiet;
    const auto run = run_bb84(20000, quiet, SourceModel{}, rng, false);
    const double sigma = 3.0 * std::sqrt(0.25 / 20000.0);
    check("noiseless BB84: sift rate 0.5 and zero QBER",
          std::fabs(run.transcript.summary.sift_rate - 0.5) <= sigma &&
              run.transcript.summary.qber == 0.0);
  }
  {
    RandomStream rng(seed + 1);
    ChannelModel quiet;
    const auto two = run_two_stage(5000, quiet, rng, false);
    const auto three = run_three_stage(5000, quiet, rng, false);
    check("noiseless two/three-stage keys match exactly",
          two.alice.bits == two.bob.bits && three.alice.bits == three.bob.bits);
  }
  {
    const auto demo = run_reconcile_demo(0.01, 1024, seed);
    check("reconciliation demo converges to matching hashes", demo.report.hash_match);
  }
  {
    const auto a = run_figure(4, 0.02, 0.1, 3, 20000, seed);
    const auto b = run_figure(4, 0.02, 0.1, 3, 20000, seed);
    check("figure output is deterministic", a.to_csv() == b.to_csv());
  }

  result.report = report.str();
  return result;
}

}  // namespace polarqkd
