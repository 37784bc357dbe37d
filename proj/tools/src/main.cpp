#include "commands.hpp"

#include "seismon/error.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <functional>
#include <iostream>

namespace {

using seismon::ErrorKind;
using seismon::cli::Options;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return 3;
    case ErrorKind::parse: return 4;
    case ErrorKind::unit_mismatch: return 5;
    case ErrorKind::singular: return 6;
    case ErrorKind::convergence: return 7;
    case ErrorKind::divergence: return 8;
    case ErrorKind::calibration: return 9;
    case ErrorKind::io: return 10;
  }
  return 1;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("seismon");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("SEISMON_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  Options opt;
  CLI::App app{"Seismic response reconstruction and post-earthquake performance assessment"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SEISMON_VERSION);

  auto out = [&](CLI::App* c) { c->add_option("--out", opt.out, "Output directory")->capture_default_str(); };
  auto model = [&](CLI::App* c, bool required) {
    auto* o = c->add_option("--model", opt.model, "Building model JSON");
    if (required) o->required();
  };
  auto gm = [&](CLI::App* c, bool required) {
    auto* o = c->add_option("--gm-spec", opt.gm_spec, "Ground-motion spec JSON (Kanai-Tajimi)");
    if (required) o->required();
  };
  auto noise = [&](CLI::App* c) {
    c->add_option("--phi-vv", opt.phi_vv, "Two-sided velocity measurement noise density, (m/s)^2/(rad/s)");
    c->add_option("--noise-ratio", opt.noise_ratio, "Noise RMS ratio used when --phi-vv is absent")
        ->capture_default_str();
    c->add_flag("--stationary-psd", opt.stationary_psd,
                "Use G0 as the process density instead of scaling it to the envelope peak");
  };
  auto objective = [&](CLI::App* c) {
    c->add_option("--objective", opt.objective, "trace-p or trace-p-isd")
        ->check(CLI::IsMember({"trace-p", "trace-p-isd"}));
  };
  auto measurement = [&](CLI::App* c) {
    c->add_option("--layout", opt.layout, "Layout JSON (measured_dofs, optional gain)")->required();
    c->add_option("--records", opt.records, "Glob of floor records, one per measured DOF")->required();
    c->add_option("--ground", opt.ground, "Ground acceleration record subtracted from floor accelerations");
    c->add_option("--gain", opt.gain, "Gain JSON overriding the layout's gain");
    c->add_option("--filter-order", opt.filter_order, "High-pass Butterworth order")->capture_default_str();
    c->add_option("--filter-cutoff", opt.filter_cutoff, "High-pass cutoff, Hz")->capture_default_str();
    c->add_option("--integrator-dt", opt.integrator_dt, "Newmark substep, s (0 = record dt)");
  };
  auto thresholds = [&](CLI::App* c) {
    c->add_option("--thresholds", opt.thresholds, "Threshold JSON or the named set rc-frame")
        ->capture_default_str();
    c->add_flag("--truncate", opt.truncate, "Condition drift Gaussians on ISD >= 0");
  };

  std::function<void(const Options&)> action;
  auto command = [&](const char* name, const char* help, void (*fn)(const Options&)) {
    CLI::App* c = app.add_subcommand(name, help);
    c->callback([&action, fn] { action = fn; });
    out(c);
    return c;
  };

  auto* generate = command("generate-gm", "Synthesize a Kanai-Tajimi ground acceleration record", seismon::cli::run_generate_gm);
  gm(generate, true);
  generate->add_option("--seed", opt.seed, "Random seed")->capture_default_str();
  generate->add_flag("--stationary", opt.stationary, "Omit the modulating envelope");

  auto* calibrate = command("calibrate-gm", "Calibrate G0 against measured ground records", seismon::cli::run_calibrate_gm);
  gm(calibrate, true);
  calibrate->add_option("--records", opt.records, "Glob of ground acceleration records")->required();
  calibrate->add_option("--seed", opt.seed, "Base seed of the synthetic ensemble")->capture_default_str();
  calibrate->add_option("--ensemble", opt.ensemble, "Ensemble size")->capture_default_str();
  calibrate->add_flag("--stationary", opt.stationary, "Use a stationary ensemble");

  auto* simulate = command("simulate", "Simulate floor acceleration records for a synthetic twin", seismon::cli::run_simulate);
  model(simulate, true);
  simulate->add_option("--ground", opt.ground, "Ground acceleration record")->required();
  simulate->add_option("--layout", opt.layout, "Layout JSON naming the instrumented floors")->required();
  simulate->add_option("--noise-ratio", opt.noise_ratio, "Measurement noise RMS ratio")->capture_default_str();
  simulate->add_option("--seed", opt.seed, "Noise seed")->capture_default_str();
  simulate->add_option("--integrator-dt", opt.integrator_dt, "Newmark substep, s (0 = record dt)");

  auto* optimize = command("optimize-gain", "Optimize the feedback gain for a layout", seismon::cli::run_optimize_gain);
  model(optimize, true);
  gm(optimize, true);
  optimize->add_option("--layout", opt.layout, "Layout JSON")->required();
  noise(optimize);
  objective(optimize);

  auto* place = command("place", "Choose instrumented floors", seismon::cli::run_place);
  place->add_option("--problem", opt.problem, "Placement problem JSON")->required();
  model(place, false);
  gm(place, false);
  place->add_option("--sigma2-max", opt.sigma2_max, "Drift variance limit with units, e.g. 4e-6m2 or 2e-5ratio2");
  place->add_option("--strategy", opt.strategy, "exhaustive or greedy")
      ->check(CLI::IsMember({"exhaustive", "greedy"}))
      ->capture_default_str();
  noise(place);
  objective(place);

  auto* rec = command("reconstruct", "Reconstruct floor displacements with the observer", seismon::cli::run_reconstruct);
  model(rec, true);
  gm(rec, true);
  measurement(rec);
  noise(rec);
  objective(rec);

  auto* classify = command("classify", "Classify performance from drift estimates or exceedance values", seismon::cli::run_classify);
  classify->add_option("--input", opt.input, "drifts.json or story exceedance JSON")->required();
  thresholds(classify);

  auto* report = command("report", "Reconstruct and classify in one run", seismon::cli::run_report);
  model(report, true);
  gm(report, true);
  measurement(report);
  noise(report);
  objective(report);
  thresholds(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    action(opt);
  } catch (const seismon::Error& e) {
    spdlog::error("{}: {}", seismon::to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    spdlog::error("internal: {}", e.what());
    return 1;
  }
  return 0;
}
