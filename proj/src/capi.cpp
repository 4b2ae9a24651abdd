#include "polarqkd.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "experiments.hpp"
#include "noise.hpp"

using namespace polarqkd;

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) {
    std::memcpy(out, s.c_str(), s.size() + 1);
  }
  return out;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PQKD_ERR_USAGE;
  }
}

}  // namespace

struct pqkd_config {
  RunConfig config;
};

extern "C" {

const char* pqkd_version(void) { return "0.1.0"; }

const char* pqkd_last_error(void) { return g_last_error.c_str(); }

void pqkd_free(char* text) { std::free(text); }

int pqkd_error_prob_exact(double x, int links, double* out) {
  return guarded([&] {
    *out = error_prob_exact(x, links);
    return PQKD_OK;
  });
}

int pqkd_error_prob_series(double x, int links, double* out) {
  return guarded([&] {
    *out = error_prob_series(x, links);
    return PQKD_OK;
  });
}

int pqkd_error_prob_quadrature(double x, int links, int steps, double* out) {
  return guarded([&] {
    *out = error_prob_quadrature(x, links, steps);
    return PQKD_OK;
  });
}

int pqkd_pdf_sum_links(int links, double x, double phi, double* out) {
  return guarded([&] {
    *out = pdf_sum_links(links, x, phi);
    return PQKD_OK;
  });
}

int pqkd_analyze(double x, int links, char** out_text) {
  return guarded([&] {
    *out_text = dup_string(analyze(x, links).to_text());
    return PQKD_OK;
  });
}

int pqkd_figure(int figure_id, double x_min, double x_max, int grid_steps,
                long long trials, unsigned long long seed, int strict,
                const char* out_csv_path, char** out_csv_text) {
  return guarded([&] {
    if (trials < 1) {
      throw std::domain_error("pqkd_figure: trials must be >= 1");
    }
    const FigureResult result = run_figure(figure_id, x_min, x_max, grid_steps,
                                           static_cast<std::uint64_t>(trials), seed);
    const std::string csv = result.to_csv();
    if (out_csv_path != nullptr) {
      std::ofstream out(out_csv_path);
      if (!out) {
        throw std::runtime_error(std::string("cannot write: ") + out_csv_path);
      }
      out << csv;
    }
    if (out_csv_text != nullptr) {
      *out_csv_text = dup_string(csv);
    }
    if (strict && !result.all_pass) {
      g_last_error = "one or more curve points failed the 3-sigma self-check";
      return PQKD_ERR_STATCHECK;
    }
    return PQKD_OK;
  });
}

pqkd_config* pqkd_config_new(void) { return new pqkd_config{}; }

pqkd_config* pqkd_config_load(const char* path) {
  try {
    g_last_error.clear();
    return new pqkd_config{RunConfig::from_file(path)};
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return nullptr;
  }
}

int pqkd_config_set(pqkd_config* config, const char* key, const char* value) {
  return guarded([&] {
    config->config.set(key, value);
    return PQKD_OK;
  });
}

int pqkd_config_text(const pqkd_config* config, char** out_text) {
  return guarded([&] {
    *out_text = dup_string(config->config.to_text());
    return PQKD_OK;
  });
}

void pqkd_config_free(pqkd_config* config) { delete config; }

int pqkd_simulate(const pqkd_config* config, char** out_report) {
  return guarded([&] {
    const SimulateResult result = run_simulation(config->config);
    *out_report = dup_string(result.report);
    return PQKD_OK;
  });
}

int pqkd_reconcile_demo(double qber, long long key_bits, unsigned long long seed,
                        char** out_report) {
  return guarded([&] {
    if (key_bits < 2) {
      throw std::domain_error("pqkd_reconcile_demo: key_bits must be >= 2");
    }
    const ReconcileDemoResult result =
        run_reconcile_demo(qber, static_cast<std::uint64_t>(key_bits), seed);
    *out_report = dup_string(result.text);
    return PQKD_OK;
  });
}

int pqkd_self_test(unsigned long long seed, char** out_report) {
  return guarded([&] {
    const SelfTestResult result = run_self_test(seed);
    if (out_report != nullptr) {
      *out_report = dup_string(result.report);
    }
    return result.pass ? PQKD_OK : PQKD_ERR_STATCHECK;
  });
}

}  // extern "C"
