#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace seismon {

struct SimplexSettings {
  int max_iterations = 500;
  double objective_tolerance = 1e-4;  // relative spread of f over the simplex
  double parameter_tolerance = 1e-4;  // max-norm spread of the vertices
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Derivative-free Nelder-Mead minimization (standard reflection 1,
/// expansion 2, contraction 1/2, shrink 1/2) over the box [lower, upper].
/// Trial points are projected onto the box. `simplex` holds n+1 starting
/// vertices. Throws ValidationError if f is not finite at every starting
/// vertex.
SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          std::vector<Eigen::VectorXd> simplex, const Eigen::VectorXd& lower,
                          const Eigen::VectorXd& upper, const SimplexSettings& settings = {});

}  // namespace seismon
