#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "slowlight/errors.hpp"
#include "slowlight/experiments.hpp"
#include "slowlight/units.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonOptions {
  std::string config_path;
  std::string output_dir;
  int threads = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

slowlight::ExperimentConfig resolve_config(const CommonOptions& opts) {
  slowlight::ExperimentConfig config;
  if (!opts.config_path.empty()) config = slowlight::load_config(opts.config_path);
  if (!opts.output_dir.empty()) config.output_dir = opts.output_dir;
  if (opts.threads >= 0) config.threads = opts.threads;
  if (opts.seed_set) config.seed = opts.seed;
  return config;
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config (JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.output_dir, "output directory");
  cmd->add_option("--threads", opts.threads, "worker threads (0 = all cores)");
  cmd->add_option("--seed", opts.seed, "seed for noise injection")
      ->each([&](const std::string&) { opts.seed_set = true; });
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const slowlight::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
}

void print_outputs(const std::vector<std::string>& files) {
  for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slow-light simulator for a 1D qubit metamaterial"};
  app.require_subcommand(1);

  CommonOptions opts;

  CLI::App* band = app.add_subcommand("band", "lossless Bloch band diagrams");
  add_common(band, opts);
  CLI::App* ats = app.add_subcommand("ats-sweep", "collective ATS power sweep with delays");
  add_common(ats, opts);
  CLI::App* disp =
      app.add_subcommand("dispersion-sweep", "alternating-frequency dispersion sweep");
  add_common(disp, opts);
  CLI::App* pulse = app.add_subcommand("pulse", "single Gaussian-pulse shot through the chain");
  add_common(pulse, opts);
  CLI::App* calibrate =
      app.add_subcommand("calibrate", "synthetic power calibration and gamma20 extraction");
  add_common(calibrate, opts);
  CLI::App* discriminate =
      app.add_subcommand("discriminate", "ATS/EIT line-shape discrimination (AIC)");
  add_common(discriminate, opts);

  CLI11_PARSE(app, argc, argv);

  return guarded([&] {
    const slowlight::ExperimentConfig config = resolve_config(opts);
    if (band->parsed()) {
      print_outputs(slowlight::run_band(config).output_files);
    } else if (ats->parsed()) {
      const auto outcome = slowlight::run_ats_sweep(config);
      print_outputs(outcome.output_files);
    } else if (disp->parsed()) {
      const auto outcome = slowlight::run_dispersion_sweep(config);
      print_outputs(outcome.output_files);
    } else if (pulse->parsed()) {
      const auto outcome = slowlight::run_pulse(config);
      std::printf("delay = %.3f ns, efficiency = %.3f\n", outcome.result.delay * 1e9,
                  outcome.result.efficiency);
      print_outputs(outcome.output_files);
    } else if (calibrate->parsed()) {
      const auto outcome = slowlight::run_calibrate(config);
      std::printf("alpha: true %.4g fit %.4g; gamma20/2pi: true %.4g MHz fit %.4g MHz\n",
                  outcome.alpha_true, outcome.alpha_fit,
                  slowlight::angular_to_hz(outcome.gamma20_true) / 1e6,
                  slowlight::angular_to_hz(outcome.gamma20_fit) / 1e6);
      print_outputs(outcome.output_files);
    } else if (discriminate->parsed()) {
      const auto outcome = slowlight::run_discriminate(config);
      std::printf("ATS weight %.6f, EIT weight %.6f\n", outcome.comparison.ats_weight,
                  outcome.comparison.eit_weight);
      print_outputs(outcome.output_files);
    }
  });
}
