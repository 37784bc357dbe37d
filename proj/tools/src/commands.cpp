#include "commands.hpp"

#include "manifest.hpp"

#include "seismon/error.hpp"
#include "seismon/ground_motion.hpp"
#include "seismon/io.hpp"
#include "seismon/newmark.hpp"
#include "seismon/observer.hpp"
#include "seismon/performance.hpp"
#include "seismon/placement.hpp"
#include "seismon/signal.hpp"

#include <glob.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>

namespace seismon::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ValidationError(std::string("missing required option ") + flag);
}

std::vector<fs::path> expand_glob(const std::string& pattern) {
  glob_t g{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  std::vector<fs::path> paths;
  if (rc == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) paths.emplace_back(g.gl_pathv[i]);
  }
  globfree(&g);
  if (rc == GLOB_NOMATCH || paths.empty()) throw IoError("no files match '" + pattern + "'");
  if (rc != 0) throw IoError("cannot expand '" + pattern + "'");
  std::sort(paths.begin(), paths.end());
  return paths;
}

GainObjective parse_objective(const std::string& text, GainObjective fallback) {
  if (text.empty()) return fallback;
  if (text == "trace-p") return GainObjective::trace_p;
  if (text == "trace-p-isd") return GainObjective::trace_p_isd;
  throw ValidationError("objective must be trace-p or trace-p-isd, got '" + text + "'");
}

const char* objective_name(GainObjective o) { return o == GainObjective::trace_p ? "trace-p" : "trace-p-isd"; }

BuildingModel load_model(const Options& opt, Manifest& manifest) {
  require(opt.model, "--model");
  manifest.add_input(opt.model);
  return io::load_model(opt.model);
}

GroundMotionSpec load_gm_spec(const std::string& path, Manifest& manifest) {
  require(path, "--gm-spec");
  manifest.add_input(path);
  return io::parse_gm_spec(io::read_text(path));
}

PerformanceThresholds load_thresholds(const Options& opt, Manifest& manifest) {
  if (!opt.thresholds.empty() && opt.thresholds != "rc-frame") manifest.add_input(opt.thresholds);
  return io::load_thresholds(opt.thresholds);
}

// Acceleration records are optionally made relative to the ground record,
// then integrated and high-pass filtered. Velocity records pass through.
struct Measurements {
  std::vector<Record> velocities;
  std::vector<fs::path> sources;
};

Measurements load_measurements(const Options& opt, const SensorLayout& layout, Manifest& manifest) {
  require(opt.records, "--records");
  const auto paths = expand_glob(opt.records);
  if (static_cast<int>(paths.size()) != layout.size())
    throw ValidationError(std::to_string(paths.size()) + " records match '" + opt.records + "' but the layout has " +
                          std::to_string(layout.size()) + " measured DOFs");
  std::vector<Record> records;
  for (const auto& p : paths) {
    manifest.add_input(p);
    records.push_back(io::read_record(p));
  }

  // Channels named floor<k> are matched to DOF k; otherwise records are
  // taken in sorted path order.
  std::map<int, std::size_t> by_floor;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string& c = records[i].channel;
    if (c.rfind("floor", 0) == 0 && c.size() > 5 && std::all_of(c.begin() + 5, c.end(), ::isdigit))
      by_floor[std::stoi(c.substr(5))] = i;
  }
  std::vector<std::size_t> order;
  if (by_floor.size() == records.size()) {
    for (int dof : layout.measured_dofs) {
      const auto it = by_floor.find(dof);
      if (it == by_floor.end()) throw ValidationError("no record with channel floor" + std::to_string(dof));
      order.push_back(it->second);
    }
  } else {
    spdlog::warn("record channels are not all floor<k>; assigning records to DOFs in sorted path order");
    for (std::size_t i = 0; i < records.size(); ++i) order.push_back(i);
  }

  std::optional<Record> ground;
  if (!opt.ground.empty()) {
    manifest.add_input(opt.ground);
    ground = io::read_record(opt.ground);
    require_units(*ground, Units::acceleration);
  }
  const FilterSpec filter{opt.filter_order, opt.filter_cutoff};

  Measurements out;
  for (std::size_t i : order) {
    Record r = records[i];
    if (r.units == Units::acceleration) {
      if (ground) {
        if (ground->size() != r.size() || std::abs(ground->dt - r.dt) > 1e-12 * r.dt)
          throw ValidationError("ground record must match the floor records in dt and length");
        for (std::size_t t = 0; t < r.size(); ++t) r.samples[t] -= ground->samples[t];
      }
      r = accel_to_velocity(r, filter);
    } else if (ground) {
      throw UnitError("--ground applies to acceleration records only; " + paths[i].string() + " is tagged m/s");
    }
    out.velocities.push_back(std::move(r));
    out.sources.push_back(paths[i]);
  }
  return out;
}

NoiseModel build_noise(const StructuralMatrices& mats, const BuildingModel& model, const GroundMotionSpec& spec,
                       std::optional<double> phi_vv, const std::vector<Record>* velocities, double noise_ratio,
                       bool stationary_psd) {
  spec.validate();
  double density = 0.0;
  if (phi_vv) {
    density = *phi_vv;
  } else if (velocities && !velocities->empty()) {
    for (const Record& v : *velocities) density += noise_psd(v, NoiseSpec{noise_ratio});
    density /= static_cast<double>(velocities->size());
  } else {
    throw ValidationError("measurement noise density needed: pass --phi-vv");
  }
  if (!(density >= 0.0)) throw ValidationError("--phi-vv must be non-negative");
  const GroundMotionSpec process = stationary_psd ? spec : peak_intensity(spec);
  return make_noise_model(mats, model.ground_influence(), [process](double w) { return kanai_tajimi_psd(w, process); },
                          density);
}

json noise_settings(const NoiseModel& noise) {
  return {{"phi_vv", noise.measurement_psd(0)}, {"process_g0", noise.process_psd(0.0)}};
}

IntegratorSettings integrator(const Options& opt) {
  IntegratorSettings s;
  s.dt = opt.integrator_dt;
  return s;
}

json filter_settings(const Options& opt) {
  return {{"order", opt.filter_order}, {"cutoff_hz", opt.filter_cutoff}, {"scheme", "forward-backward"}};
}

struct Reconstruction {
  BuildingModel model;
  ObserverSolution solution;
  DriftEstimate drifts;
};

Reconstruction reconstruct(const Options& opt, Manifest& manifest) {
  Reconstruction r;
  r.model = load_model(opt, manifest);
  const StructuralMatrices mats = assemble_matrices(r.model);
  require(opt.layout, "--layout");
  manifest.add_input(opt.layout);
  io::LayoutConfig cfg = io::parse_layout(io::read_text(opt.layout));
  cfg.layout.validate(r.model.stories());
  if (!opt.gain.empty()) {
    manifest.add_input(opt.gain);
    cfg.gain = io::parse_gain(io::read_text(opt.gain));
  }
  const GroundMotionSpec spec = load_gm_spec(opt.gm_spec, manifest);
  const Measurements meas = load_measurements(opt, cfg.layout, manifest);
  const NoiseModel noise =
      build_noise(mats, r.model, spec, opt.phi_vv, &meas.velocities, opt.noise_ratio, opt.stationary_psd);

  std::optional<GainOptimization> optimization;
  const GainObjective objective = parse_objective(opt.objective, GainObjective::trace_p);
  if (!cfg.gain) {
    spdlog::info("no gain supplied; optimizing {}", objective_name(objective));
    optimization = optimize_gain(mats, cfg.layout, noise, objective);
    if (!optimization->converged) spdlog::warn("gain optimization hit the iteration cap");
    cfg.gain = optimization->gain;
  }
  r.solution = run_nmbo(r.model, *cfg.gain, cfg.layout, meas.velocities, integrator(opt));
  r.solution.covariance = estimation_covariance(mats, cfg.layout, *cfg.gain, noise);
  if (!r.solution.covariance->metadata.accurate)
    spdlog::warn("covariance grid refinement changed trace(P) by {:.2e}", r.solution.covariance->metadata.refinement_change);
  r.drifts = estimate_drifts(r.solution, r.model);

  auto& s = manifest.settings();
  s["measured_dofs"] = cfg.layout.measured_dofs;
  s["noise"] = noise_settings(noise);
  s["filter"] = filter_settings(opt);
  s["integrator_dt"] = opt.integrator_dt;
  s["gain_source"] = optimization ? "optimized" : "supplied";
  if (optimization) s["objective"] = objective_name(objective);

  manifest.write_output("gain.json", io::gain_to_json(*cfg.gain, cfg.layout, optimization) + "\n");
  manifest.write_output("q_hat.csv", io::history_to_csv(r.solution.estimate));
  manifest.write_output("covariance.json", io::covariance_to_json(*r.solution.covariance) + "\n");
  manifest.write_output("drifts.json", io::drift_estimate_to_json(r.drifts) + "\n");
  return r;
}

void write_report(const PerformanceReport& report, Manifest& manifest) {
  manifest.write_output("report.json", io::report_to_json(report) + "\n");
  manifest.write_output("story_probabilities.csv", io::story_probabilities_to_csv(report));
  if (report.drifts)
    manifest.write_output("distribution.csv",
                          io::distribution_to_csv(drift_distribution(*report.drifts, report.thresholds)));
  spdlog::info("building classified {} (p = {:.3f})", to_string(report.classification),
               report.building.classes[static_cast<std::size_t>(report.classification)]);
}

PlacementProblem load_problem(const Options& opt, Manifest& manifest) {
  require(opt.problem, "--problem");
  manifest.add_input(opt.problem);
  const fs::path base = fs::path(opt.problem).parent_path();
  json j;
  try {
    j = json::parse(io::read_text(opt.problem));
  } catch (const json::parse_error& e) {
    throw ParseError(opt.problem, 0, e.what());
  }
  // Inline objects or paths relative to the problem file.
  auto document = [&](const char* key, const std::string& override_path) -> std::string {
    if (!override_path.empty()) {
      manifest.add_input(override_path);
      return io::read_text(override_path);
    }
    if (!j.contains(key)) throw ValidationError(std::string("problem: missing '") + key + "'");
    if (j.at(key).is_string()) {
      const fs::path p = base / j.at(key).get<std::string>();
      manifest.add_input(p);
      return io::read_text(p);
    }
    return j.at(key).dump();
  };

  PlacementProblem p;
  try {
    p.model = io::parse_model(document("model", opt.model));
    const GroundMotionSpec spec = io::parse_gm_spec(document("gm_spec", opt.gm_spec));
    const StructuralMatrices mats = assemble_matrices(p.model);
    std::optional<double> phi_vv = opt.phi_vv;
    if (!phi_vv && j.contains("phi_vv")) phi_vv = j.at("phi_vv").get<double>();
    p.noise = build_noise(mats, p.model, spec, phi_vv, nullptr, opt.noise_ratio, opt.stationary_psd);
    if (j.contains("candidates")) {
      p.candidates = j.at("candidates").get<std::vector<int>>();
    } else {
      for (int k = 1; k <= p.model.stories(); ++k) p.candidates.push_back(k);
    }
    p.sensors = j.at("sensors").get<int>();
    std::string limit = opt.sigma2_max;
    if (limit.empty()) limit = j.value("sigma2_max", std::string("inf"));
    std::tie(p.sigma2_max, p.sigma_units) = io::parse_variance_limit(limit);
    p.placement_objective =
        parse_objective(opt.objective.empty() ? j.value("objective", std::string()) : opt.objective,
                        GainObjective::trace_p);
    p.gain_objective = parse_objective(j.value("gain_objective", std::string()), p.placement_objective);
    if (j.contains("enumeration_cap")) p.enumeration_cap = j.at("enumeration_cap").get<long long>();
  } catch (const json::exception& e) {
    throw ParseError(opt.problem, 0, e.what());
  }
  p.validate();
  return p;
}

}  // namespace

void run_generate_gm(const Options& opt) {
  Manifest manifest("generate-gm", opt.out);
  const GroundMotionSpec spec = load_gm_spec(opt.gm_spec, manifest);
  const Envelope envelope = opt.stationary ? Envelope::stationary : Envelope::modulated;
  Record rec = generate_realization(spec, opt.seed, envelope);
  rec.channel = "ground";
  manifest.settings() = {{"seed", opt.seed}, {"envelope", opt.stationary ? "stationary" : "modulated"}};
  manifest.write_output("ground_accel.csv", io::format_record(rec));
  manifest.finish();
}

void run_calibrate_gm(const Options& opt) {
  Manifest manifest("calibrate-gm", opt.out);
  const GroundMotionSpec shape = load_gm_spec(opt.gm_spec, manifest);
  require(opt.records, "--records");
  CalibrationSettings settings;
  settings.ensemble_size = opt.ensemble;
  settings.envelope = opt.stationary ? Envelope::stationary : Envelope::modulated;
  settings.base_seed = opt.seed;

  json results = json::array();
  double g0 = 0.0;
  for (const auto& path : expand_glob(opt.records)) {
    manifest.add_input(path);
    const Record rec = io::read_record(path);
    const CalibrationResult r = calibrate_g0(rec, shape, settings);
    spdlog::info("{}: G0 = {:.6g} (coverage {:.3f})", path.string(), r.g0, r.coverage);
    results.push_back({{"record", path.string()}, {"g0", r.g0}, {"coverage", r.coverage}, {"evaluations", r.evaluations}});
    g0 = std::max(g0, r.g0);
  }
  GroundMotionSpec calibrated = shape;
  calibrated.g0 = g0;
  manifest.settings() = {{"seed", opt.seed},
                         {"ensemble", opt.ensemble},
                         {"envelope", opt.stationary ? "stationary" : "modulated"},
                         {"coverage_target", settings.coverage_target}};
  manifest.write_output("calibration.json", json{{"records", results}, {"g0", g0}, {"g0_rule", "max over records"}}.dump(2) + "\n");
  manifest.write_output("gm_spec.json", io::gm_spec_to_json(calibrated) + "\n");
  manifest.finish();
}

void run_simulate(const Options& opt) {
  Manifest manifest("simulate", opt.out);
  const BuildingModel model = load_model(opt, manifest);
  require(opt.ground, "--ground");
  manifest.add_input(opt.ground);
  const Record ground = io::read_record(opt.ground);
  require(opt.layout, "--layout");
  manifest.add_input(opt.layout);
  const SensorLayout layout = io::parse_layout(io::read_text(opt.layout)).layout;
  layout.validate(model.stories());

  const ResponseHistory truth = simulate_response(model, ground, integrator(opt));
  manifest.settings() = {{"seed", opt.seed}, {"noise_ratio", opt.noise_ratio}, {"measured_dofs", layout.measured_dofs}};
  manifest.write_output("truth.csv", io::history_to_csv(truth, "q_true"));
  for (int j = 0; j < layout.size(); ++j) {
    const int dof = layout.measured_dofs[static_cast<std::size_t>(j)];
    Record r;
    r.dt = ground.dt;
    r.units = Units::acceleration;
    r.channel = "floor" + std::to_string(dof);
    for (std::size_t t = 0; t < ground.size(); ++t)
      r.samples.push_back(truth.qddot(static_cast<Eigen::Index>(t), dof - 1) + ground.samples[t]);
    const double density = noise_psd(r, NoiseSpec{opt.noise_ratio});
    const auto noise = white_noise(density, r.dt, r.size(), opt.seed + static_cast<std::uint64_t>(dof));
    for (std::size_t t = 0; t < r.size(); ++t) r.samples[t] += noise[t];
    manifest.write_output("floor" + std::to_string(dof) + ".csv", io::format_record(r));
  }
  manifest.finish();
}

void run_optimize_gain(const Options& opt) {
  Manifest manifest("optimize-gain", opt.out);
  const BuildingModel model = load_model(opt, manifest);
  const StructuralMatrices mats = assemble_matrices(model);
  require(opt.layout, "--layout");
  manifest.add_input(opt.layout);
  const SensorLayout layout = io::parse_layout(io::read_text(opt.layout)).layout;
  const GroundMotionSpec spec = load_gm_spec(opt.gm_spec, manifest);
  const NoiseModel noise =
      build_noise(mats, model, spec, opt.phi_vv, nullptr, opt.noise_ratio, opt.stationary_psd);
  const GainObjective objective = parse_objective(opt.objective, GainObjective::trace_p);

  const GainOptimization result = optimize_gain(mats, layout, noise, objective);
  if (!result.converged) spdlog::warn("gain optimization hit the iteration cap");
  const ErrorCovariance cov = estimation_covariance(mats, layout, result.gain, noise);
  manifest.settings() = {{"objective", objective_name(objective)}, {"noise", noise_settings(noise)}};
  manifest.write_output("gain.json", io::gain_to_json(result.gain, layout, result) + "\n");
  manifest.write_output("covariance.json", io::covariance_to_json(cov) + "\n");
  manifest.finish();
}

void run_place(const Options& opt) {
  Manifest manifest("place", opt.out);
  const PlacementProblem problem = load_problem(opt, manifest);
  if (opt.strategy != "exhaustive" && opt.strategy != "greedy")
    throw ValidationError("strategy must be exhaustive or greedy");
  const PlacementResult result = opt.strategy == "greedy" ? place_greedy(problem) : place_exhaustive(problem);
  if (!result.feasible) spdlog::warn("no layout satisfies the variance limit; reporting the least violating one");
  manifest.settings() = {{"strategy", opt.strategy},
                         {"objective", objective_name(problem.placement_objective)},
                         {"noise", noise_settings(problem.noise)}};
  manifest.write_output("placement.json", io::placement_to_json(result, problem, opt.strategy) + "\n");
  manifest.write_output("layout.json", io::gain_to_json(result.gain, result.layout) + "\n");
  manifest.finish();
}

void run_reconstruct(const Options& opt) {
  Manifest manifest("reconstruct", opt.out);
  reconstruct(opt, manifest);
  manifest.finish();
}

void run_classify(const Options& opt) {
  Manifest manifest("classify", opt.out);
  require(opt.input, "--input");
  manifest.add_input(opt.input);
  const io::ClassifyInput in = io::parse_classify_input(io::read_text(opt.input));
  const PerformanceThresholds thresholds = load_thresholds(opt, manifest);
  ExceedanceOptions exceed;
  exceed.truncate_at_zero = opt.truncate;
  const PerformanceReport report =
      in.exceedance ? assess_exceedance(*in.exceedance, thresholds) : assess(*in.drifts, thresholds, exceed);
  manifest.settings() = {{"truncate_at_zero", opt.truncate}, {"threshold_provenance", thresholds.provenance}};
  write_report(report, manifest);
  manifest.finish();
}

void run_report(const Options& opt) {
  Manifest manifest("report", opt.out);
  const PerformanceThresholds thresholds = load_thresholds(opt, manifest);
  const Reconstruction r = reconstruct(opt, manifest);
  ExceedanceOptions exceed;
  exceed.truncate_at_zero = opt.truncate;
  const PerformanceReport report =
      assess(r.drifts, thresholds, exceed, r.solution.covariance->metadata.provenance);
  manifest.settings()["truncate_at_zero"] = opt.truncate;
  manifest.settings()["threshold_provenance"] = thresholds.provenance;
  write_report(report, manifest);
  manifest.finish();
}

}  // namespace seismon::cli
