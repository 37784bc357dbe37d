#pragma once

#include "seismon/record.hpp"
#include "seismon/structure.hpp"

#include <cstdint>
#include <optional>

namespace seismon {

struct IntegratorSettings {
  double beta = 0.25;
  double gamma = 0.5;
  double dt = 0.0;  // 0 means "use the record sample interval"
  double newton_tol = 1e-8;
  int max_iterations = 50;

  void validate() const;
};

/// Integrates  M a + C v + f_R(q, z) = p(t)  from rest with Newmark-beta and
/// Newton-Raphson on the force residual. `forcing` holds p at the sample
/// instants (rows = samples, cols = stories) and is interpolated linearly
/// between them when the integrator subdivides the sample interval. Output
/// is stored at the sample instants.
ResponseHistory integrate_newmark(const BuildingModel& model, const Eigen::MatrixXd& mass,
                                  const Eigen::MatrixXd& damping, const Eigen::MatrixXd& forcing,
                                  double sample_dt, const IntegratorSettings& settings);

/// White process noise b2*w(t) added to the ground-motion forcing.
struct ProcessNoise {
  double density = 0.0;       // two-sided PSD of w
  std::uint64_t seed = 0;
  Eigen::VectorXd influence;  // b2; empty means -M*b1
};

/// Response of the building to base acceleration  -M b1 u_g(t).
ResponseHistory simulate_response(const BuildingModel& model, const Record& ground_accel,
                                  const IntegratorSettings& settings = {},
                                  const std::optional<ProcessNoise>& process_noise = std::nullopt);

}  // namespace seismon
