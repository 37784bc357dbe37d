#include "seismon/observer.hpp"

#include "seismon/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace seismon {

void SensorLayout::validate(int stories) const {
  if (measured_dofs.empty()) throw ValidationError("sensor layout needs at least one measured DOF");
  std::set<int> seen;
  for (int dof : measured_dofs) {
    if (dof < 1 || dof > stories)
      throw ValidationError("measured DOF " + std::to_string(dof) + " outside [1, " +
                            std::to_string(stories) + "]");
    if (!seen.insert(dof).second)
      throw ValidationError("measured DOF " + std::to_string(dof) + " listed twice");
  }
}

Eigen::MatrixXd SensorLayout::boolean_map(int stories) const {
  validate(stories);
  Eigen::MatrixXd c2 = Eigen::MatrixXd::Zero(size(), stories);
  for (int j = 0; j < size(); ++j) c2(j, measured_dofs[static_cast<std::size_t>(j)] - 1) = 1.0;
  return c2;
}

void FeedbackGain::validate(int measured) const {
  if (damper.size() != measured)
    throw ValidationError("feedback gain has " + std::to_string(damper.size()) +
                          " entries for " + std::to_string(measured) + " measured DOFs");
  for (Eigen::Index j = 0; j < damper.size(); ++j) {
    if (!(damper(j) > 0.0) || !std::isfinite(damper(j)))
      throw ValidationError("feedback gain entries must be strictly positive");
  }
}

NoiseModel make_noise_model(const StructuralMatrices& mats, const Eigen::VectorXd& ground_influence,
                            std::function<double(double)> process_psd, double measurement_psd) {
  if (measurement_psd < 0.0) throw ValidationError("measurement density must be non-negative");
  NoiseModel noise;
  noise.process_psd = std::move(process_psd);
  noise.measurement_psd = Eigen::VectorXd::Constant(mats.mass.rows(), measurement_psd);
  noise.process_influence = -(mats.mass * ground_influence);
  return noise;
}

Eigen::MatrixXd observer_damping(const Eigen::MatrixXd& damping, const SensorLayout& layout,
                                 const FeedbackGain& gain) {
  const auto n = static_cast<int>(damping.rows());
  layout.validate(n);
  gain.validate(layout.size());
  Eigen::MatrixXd out = damping;
  for (int j = 0; j < layout.size(); ++j) {
    const int dof = layout.measured_dofs[static_cast<std::size_t>(j)] - 1;
    out(dof, dof) += gain.damper(j);
  }
  return out;
}

namespace {

void check_noise(const NoiseModel& noise, Eigen::Index n) {
  if (!noise.process_psd) throw ValidationError("noise model lacks a process PSD");
  if (noise.measurement_psd.size() != n || noise.process_influence.size() != n)
    throw ValidationError("noise model dimensions must match the story count");
}

// Real part of H F H^*, the only part that survives the symmetric integral.
Eigen::MatrixXd error_psd_real(double omega, const StructuralMatrices& mats,
                               const Eigen::MatrixXd& observer_c, const Eigen::MatrixXd& forcing_density) {
  using Complex = std::complex<double>;
  const Eigen::MatrixXcd z = (mats.stiffness - omega * omega * mats.mass).cast<Complex>() +
                             Complex(0.0, omega) * observer_c.cast<Complex>();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(z);
  if (!(lu.rcond() > 1e-14))
    throw SingularityError("observer dynamic stiffness singular at omega = " + std::to_string(omega));
  const Eigen::MatrixXcd h = lu.inverse();
  return (h * forcing_density.cast<Complex>() * h.adjoint()).real();
}

Eigen::MatrixXd forcing_density(double omega, const SensorLayout& layout, const FeedbackGain& gain,
                                const NoiseModel& noise) {
  const Eigen::VectorXd& b2 = noise.process_influence;
  Eigen::MatrixXd f = noise.process_psd(omega) * (b2 * b2.transpose());
  for (int j = 0; j < layout.size(); ++j) {
    const int dof = layout.measured_dofs[static_cast<std::size_t>(j)] - 1;
    f(dof, dof) += gain.damper(j) * gain.damper(j) * noise.measurement_psd(dof);
  }
  return f;
}

double fastest_pole(const StructuralMatrices& mats, const Eigen::MatrixXd& observer_c) {
  const Eigen::Index n = mats.mass.rows();
  const Eigen::MatrixXd minv = mats.mass.inverse();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  a.topRightCorner(n, n).setIdentity();
  a.bottomLeftCorner(n, n) = -minv * mats.stiffness;
  a.bottomRightCorner(n, n) = -minv * observer_c;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

struct Grid {
  std::vector<double> omega;
  int uniform = 0;
};

Grid make_grid(double omega_max, int points, double tail_max, int per_decade) {
  Grid g;
  g.uniform = points;
  g.omega.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g.omega.push_back(omega_max * i / (points - 1));
  if (tail_max > omega_max * (1.0 + 1e-9)) {
    const double decades = std::log10(tail_max / omega_max);
    const int tail = std::max(8, static_cast<int>(std::ceil(decades * per_decade)));
    for (int i = 1; i <= tail; ++i) g.omega.push_back(omega_max * std::pow(tail_max / omega_max, static_cast<double>(i) / tail));
  }
  return g;
}

Eigen::MatrixXd integrate(const Grid& grid, const StructuralMatrices& mats, const Eigen::MatrixXd& observer_c,
                          const SensorLayout& layout, const FeedbackGain& gain, const NoiseModel& noise) {
  const Eigen::Index n = mats.mass.rows();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd previous;
  for (std::size_t i = 0; i < grid.omega.size(); ++i) {
    const double w = grid.omega[i];
    Eigen::MatrixXd current = error_psd_real(w, mats, observer_c, forcing_density(w, layout, gain, noise));
    if (i > 0) sum += 0.5 * (grid.omega[i] - grid.omega[i - 1]) * (current + previous);
    previous = std::move(current);
  }
  // Even integrand: the full-line integral is twice the half-line one.
  return 2.0 * sum;
}

}  // namespace

Eigen::MatrixXcd error_psd(double omega, const StructuralMatrices& mats, const SensorLayout& layout,
                           const FeedbackGain& gain, const NoiseModel& noise) {
  using Complex = std::complex<double>;
  const Eigen::MatrixXd observer_c = observer_damping(mats.damping, layout, gain);
  check_noise(noise, mats.mass.rows());
  const Eigen::MatrixXcd z = (mats.stiffness - omega * omega * mats.mass).cast<Complex>() +
                             Complex(0.0, omega) * observer_c.cast<Complex>();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(z);
  if (!(lu.rcond() > 1e-14))
    throw SingularityError("observer dynamic stiffness singular at omega = " + std::to_string(omega));
  const Eigen::MatrixXcd h = lu.inverse();
  return h * forcing_density(omega, layout, gain, noise).cast<Complex>() * h.adjoint();
}

Eigen::VectorXd isd_variances(const Eigen::MatrixXd& p) {
  const Eigen::Index n = p.rows();
  Eigen::VectorXd out(n);
  for (Eigen::Index k = 0; k < n; ++k)
    out(k) = k == 0 ? p(0, 0) : p(k, k) + p(k - 1, k - 1) - 2.0 * p(k, k - 1);
  return out;
}

ErrorCovariance estimation_covariance(const StructuralMatrices& mats, const SensorLayout& layout,
                                      const FeedbackGain& gain, const NoiseModel& noise,
                                      const CovarianceOptions& options) {
  const Eigen::Index n = mats.mass.rows();
  const Eigen::MatrixXd observer_c = observer_damping(mats.damping, layout, gain);
  check_noise(noise, n);
  if (options.grid_points < 3) throw ValidationError("covariance grid needs at least 3 points");

  const double highest = natural_frequencies(mats.mass, mats.stiffness).maxCoeff();
  double omega_max = options.omega_max > 0.0 ? options.omega_max : 5.0 * highest;
  if (omega_max < 5.0 * highest * (1.0 - 1e-12))
    throw ValidationError("omega_max must be at least 5x the highest natural frequency");
  const double tail_max = 5.0 * fastest_pole(mats, observer_c);

  ErrorCovariance out;
  const Grid grid = make_grid(omega_max, options.grid_points, tail_max, options.tail_points_per_decade);
  Eigen::MatrixXd p = integrate(grid, mats, observer_c, layout, gain, noise);
  out.metadata.grid_points = options.grid_points;
  out.metadata.tail_points = static_cast<int>(grid.omega.size()) - grid.uniform;
  out.metadata.omega_max = omega_max;
  out.metadata.tail_max = std::max(tail_max, omega_max);

  if (options.refinement_check) {
    const Grid fine = make_grid(omega_max, 2 * options.grid_points - 1, tail_max,
                                2 * options.tail_points_per_decade);
    const Eigen::MatrixXd p_fine = integrate(fine, mats, observer_c, layout, gain, noise);
    const double scale = std::max(std::abs(p_fine.trace()), std::numeric_limits<double>::min());
    out.metadata.refined = true;
    out.metadata.refinement_change = std::abs(p_fine.trace() - p.trace()) / scale;
    out.metadata.accurate = out.metadata.refinement_change <= options.refinement_tolerance;
  }

  p = 0.5 * (p + p.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  if (lmin < 0.0) {
    if (lmin < -1e-10 * std::max(lmax, std::numeric_limits<double>::min()))
      throw SingularityError("integrated error covariance is not positive semidefinite");
    out.metadata.clipped_eigenvalue = lmin;
    p = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).asDiagonal() * eig.eigenvectors().transpose();
  }
  out.p = p;
  out.isd_variance = isd_variances(p);
  return out;
}

double gain_objective(const ErrorCovariance& cov, GainObjective objective) {
  return objective == GainObjective::trace_p ? cov.trace_p() : cov.trace_isd();
}

GainOptimization optimize_gain(const StructuralMatrices& mats, const SensorLayout& layout,
                               const NoiseModel& noise, GainObjective objective,
                               const GainOptimizerSettings& settings) {
  const auto n = static_cast<int>(mats.mass.rows());
  layout.validate(n);
  check_noise(noise, n);
  if (!(settings.lower > 0.0 && settings.upper > settings.lower))
    throw ValidationError("gain search box must satisfy 0 < lower < upper");
  if (!(settings.initial_low > 0.0 && settings.initial_high > settings.initial_low))
    throw ValidationError("initial simplex span must satisfy 0 < low < high");

  const int m = layout.size();
  auto evaluate = [&](const Eigen::VectorXd& log_gain) {
    FeedbackGain gain{log_gain.array().exp().matrix()};
    try {
      return gain_objective(estimation_covariance(mats, layout, gain, noise, settings.covariance), objective);
    } catch (const SingularityError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  // Vertex 0 at the low end of the span in every coordinate; vertex i moves
  // coordinate i to the high end.
  std::vector<Eigen::VectorXd> simplex;
  const Eigen::VectorXd base = Eigen::VectorXd::Constant(m, std::log(settings.initial_low));
  simplex.push_back(base);
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd v = base;
    v(j) = std::log(settings.initial_high);
    simplex.push_back(v);
  }
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(m, std::log(settings.lower));
  const Eigen::VectorXd hi = Eigen::VectorXd::Constant(m, std::log(settings.upper));
  SimplexResult best = nelder_mead(evaluate, std::move(simplex), lo, hi, settings.simplex);
  int iterations = best.iterations;
  int evaluations = best.evaluations;

  // A collapsed simplex can stall away from the optimum in several
  // dimensions; restart around the incumbent until it stops improving.
  const double step = std::log(settings.restart_span);
  for (int r = 0; r < settings.restarts && best.converged; ++r) {
    std::vector<Eigen::VectorXd> fresh{best.x};
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXd v = best.x;
      v(j) = v(j) + step <= hi(j) ? v(j) + step : v(j) - step;
      fresh.push_back(v);
    }
    const SimplexResult next = nelder_mead(evaluate, std::move(fresh), lo, hi, settings.simplex);
    iterations += next.iterations;
    evaluations += next.evaluations;
    const bool improved = next.value < best.value * (1.0 - settings.simplex.objective_tolerance);
    if (next.value <= best.value) best = next;
    if (!improved) break;
  }

  GainOptimization out;
  out.gain.damper = best.x.array().exp().matrix();
  out.objective = best.value;
  out.iterations = iterations;
  out.evaluations = evaluations;
  out.converged = best.converged;
  return out;
}

ObserverSolution run_nmbo(const BuildingModel& model, const FeedbackGain& gain,
                          const SensorLayout& layout, std::span<const Record> velocities,
                          const IntegratorSettings& settings) {
  const int n = model.stories();
  layout.validate(n);
  gain.validate(layout.size());
  if (static_cast<int>(velocities.size()) != layout.size())
    throw ValidationError("expected one velocity record per measured DOF");

  const Record& first = velocities.front();
  for (const Record& r : velocities) {
    r.validate();
    require_units(r, Units::velocity);
    if (std::abs(r.dt - first.dt) > 1e-12 * first.dt)
      throw ValidationError("measurement records must share the same dt");
    if (r.size() != first.size())
      throw ValidationError("measurement records must share the same length");
  }

  const StructuralMatrices mats = assemble_matrices(model);
  const Eigen::MatrixXd observer_c = observer_damping(mats.damping, layout, gain);

  const auto samples = static_cast<Eigen::Index>(first.size());
  Eigen::MatrixXd forcing = Eigen::MatrixXd::Zero(samples, n);
  for (int j = 0; j < layout.size(); ++j) {
    const int dof = layout.measured_dofs[static_cast<std::size_t>(j)] - 1;
    const auto& y = velocities[static_cast<std::size_t>(j)].samples;
    for (Eigen::Index i = 0; i < samples; ++i) forcing(i, dof) += gain.damper(j) * y[static_cast<std::size_t>(i)];
  }

  ObserverSolution out;
  out.estimate = integrate_newmark(model, mats.mass, observer_c, forcing, first.dt, settings);
  out.gain = gain;
  out.layout = layout;
  return out;
}

}  // namespace seismon
