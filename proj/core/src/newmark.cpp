#include "seismon/newmark.hpp"

#include "seismon/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace seismon {

void IntegratorSettings::validate() const {
  if (!(gamma >= 0.5)) throw ValidationError("Newmark gamma must be at least 1/2");
  // beta = 0 (explicit) is excluded: the Newton update needs M/(beta dt^2).
  if (!(beta > 0.0) || beta > 0.5) throw ValidationError("Newmark beta must lie in (0, 1/2]");
  if (dt < 0.0 || !std::isfinite(dt)) throw ValidationError("integrator dt must be >= 0");
  if (!(newton_tol > 0.0)) throw ValidationError("newton_tol must be positive");
  if (max_iterations < 1) throw ValidationError("max_iterations must be at least 1");
}

ResponseHistory integrate_newmark(const BuildingModel& model, const Eigen::MatrixXd& mass,
                                  const Eigen::MatrixXd& damping, const Eigen::MatrixXd& forcing,
                                  double sample_dt, const IntegratorSettings& settings) {
  settings.validate();
  const int n = model.stories();
  if (forcing.cols() != n) throw ValidationError("forcing columns must match story count");
  if (!(sample_dt > 0.0)) throw ValidationError("sample dt must be positive");

  int substeps = 1;
  if (settings.dt > 0.0) {
    substeps = static_cast<int>(std::lround(sample_dt / settings.dt));
    if (substeps < 1 || std::abs(substeps * settings.dt - sample_dt) > 1e-9 * sample_dt)
      throw ValidationError("integrator dt must equal or evenly subdivide the record dt");
  }
  const double h = sample_dt / substeps;
  const double beta = settings.beta;
  const double gamma = settings.gamma;
  const double c_disp = 1.0 / (beta * h * h);
  const double c_vel = gamma / (beta * h);

  const Eigen::Index samples = forcing.rows();
  const int state_size = model.hysteresis_state_size();
  ResponseHistory out;
  out.dt = sample_dt;
  out.q = Eigen::MatrixXd::Zero(samples, n);
  out.qdot = Eigen::MatrixXd::Zero(samples, n);
  out.qddot = Eigen::MatrixXd::Zero(samples, n);
  out.z = Eigen::MatrixXd::Zero(samples, state_size);
  if (samples == 0) return out;

  Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(state_size);
  auto mass_lu = mass.ldlt();
  Eigen::VectorXd a = mass_lu.solve(Eigen::VectorXd(forcing.row(0).transpose()));
  out.qddot.row(0) = a.transpose();

  const double effective_norm = c_disp * mass.cwiseAbs().rowwise().sum().maxCoeff() +
                                c_vel * damping.cwiseAbs().rowwise().sum().maxCoeff() +
                                4.0 * Eigen::Map<const Eigen::VectorXd>(model.story_stiffness.data(), n).maxCoeff();
  Eigen::VectorXd factored_tangent;
  Eigen::LDLT<Eigen::MatrixXd> effective;

  std::size_t step = 0;
  for (Eigen::Index i = 0; i + 1 < samples; ++i) {
    for (int j = 1; j <= substeps; ++j) {
      ++step;
      const double w = static_cast<double>(j) / substeps;
      const Eigen::VectorXd p = (1.0 - w) * forcing.row(i).transpose() + w * forcing.row(i + 1).transpose();

      const Eigen::VectorXd q_prev = q;
      const Eigen::VectorXd v_prev = v;
      const Eigen::VectorXd a_prev = a;
      Eigen::VectorXd q_next = q_prev;
      bool converged = false;
      double relative = 0.0;
      RestoringForce rf;
      Eigen::VectorXd a_next, v_next;

      for (int iter = 0; iter <= settings.max_iterations; ++iter) {
        const Eigen::VectorXd dq = q_next - q_prev;
        a_next = c_disp * dq - v_prev / (beta * h) - (0.5 / beta - 1.0) * a_prev;
        v_next = c_vel * dq + (1.0 - gamma / beta) * v_prev + h * (1.0 - 0.5 * gamma / beta) * a_prev;
        rf = restoring_force(model, story_drifts(q_next), story_drifts(v_next), z);

        const Eigen::VectorXd inertia = mass * a_next;
        const Eigen::VectorXd viscous = damping * v_next;
        const Eigen::VectorXd residual = p - inertia - viscous - rf.dof_force;
        const double scale = p.norm() + inertia.norm() + viscous.norm() + rf.dof_force.norm();
        const double rnorm = residual.norm();
        if (!std::isfinite(rnorm)) throw DivergenceError(step);
        relative = scale > 0.0 ? rnorm / scale : 0.0;
        // Rounding in q alone leaves a residual of order eps*|q|*|K_eff|;
        // with tiny steps that floor can exceed the relative tolerance.
        const double floor = 64.0 * std::numeric_limits<double>::epsilon() * effective_norm *
                             q_next.lpNorm<Eigen::Infinity>();
        if (relative <= settings.newton_tol || rnorm <= floor) {
          converged = true;
          break;
        }
        if (iter == settings.max_iterations) break;

        if (factored_tangent.size() != rf.story_tangent.size() ||
            factored_tangent != rf.story_tangent) {
          effective.compute(c_disp * mass + c_vel * damping + tangent_stiffness(rf.story_tangent));
          factored_tangent = rf.story_tangent;
        }
        q_next += effective.solve(residual);
      }
      if (!converged) throw ConvergenceError(step, relative);

      q = q_next;
      v = v_next;
      a = a_next;
      z = rf.state;
    }
    out.q.row(i + 1) = q.transpose();
    out.qdot.row(i + 1) = v.transpose();
    out.qddot.row(i + 1) = a.transpose();
    if (state_size > 0) out.z.row(i + 1) = z.transpose();
  }
  return out;
}

ResponseHistory simulate_response(const BuildingModel& model, const Record& ground_accel,
                                  const IntegratorSettings& settings,
                                  const std::optional<ProcessNoise>& process_noise) {
  ground_accel.validate();
  require_units(ground_accel, Units::acceleration);
  const StructuralMatrices mats = assemble_matrices(model);
  const int n = model.stories();
  const auto samples = static_cast<Eigen::Index>(ground_accel.size());

  const Eigen::VectorXd load_pattern = -(mats.mass * model.ground_influence());
  Eigen::MatrixXd forcing(samples, n);
  for (Eigen::Index i = 0; i < samples; ++i)
    forcing.row(i) = (load_pattern * ground_accel.samples[static_cast<std::size_t>(i)]).transpose();

  if (process_noise && process_noise->density > 0.0) {
    const Eigen::VectorXd b2 =
        process_noise->influence.size() == 0 ? load_pattern : process_noise->influence;
    if (b2.size() != n) throw ValidationError("process-noise influence length must match story count");
    const double sigma = std::sqrt(2.0 * std::numbers::pi * process_noise->density / ground_accel.dt);
    std::mt19937_64 rng(process_noise->seed);
    std::normal_distribution<double> normal(0.0, sigma);
    for (Eigen::Index i = 0; i < samples; ++i) forcing.row(i) += (b2 * normal(rng)).transpose();
  }
  return integrate_newmark(model, mats.mass, mats.damping, forcing, ground_accel.dt, settings);
}

}  // namespace seismon
