#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace seismon::cli {

struct Options {
  std::string model;
  std::string layout;
  std::string problem;
  std::string gm_spec;
  std::string records;  // glob
  std::string ground;
  std::string gain;
  std::string thresholds = "rc-frame";
  std::string objective;  // trace-p | trace-p-isd
  std::string sigma2_max;
  std::string strategy = "exhaustive";
  std::string input;
  std::string out = ".";
  std::optional<double> phi_vv;
  double noise_ratio = 0.02;
  std::uint64_t seed = 1;
  bool stationary = false;
  bool stationary_psd = false;
  int ensemble = 200;
  int filter_order = 4;
  double filter_cutoff = 0.1;
  double integrator_dt = 0.0;
  bool truncate = false;
};

void run_generate_gm(const Options& opt);
void run_calibrate_gm(const Options& opt);
void run_simulate(const Options& opt);
void run_optimize_gain(const Options& opt);
void run_place(const Options& opt);
void run_reconstruct(const Options& opt);
void run_classify(const Options& opt);
void run_report(const Options& opt);

}  // namespace seismon::cli
