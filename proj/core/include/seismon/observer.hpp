#pragma once

#include "seismon/nelder_mead.hpp"
#include "seismon/newmark.hpp"
#include "seismon/record.hpp"
#include "seismon/structure.hpp"

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace seismon {

/// Instrumented floors, as 1-based story numbers in channel order.
struct SensorLayout {
  std::vector<int> measured_dofs;

  int size() const noexcept { return static_cast<int>(measured_dofs.size()); }
  void validate(int stories) const;
  /// c2, one 1 per row.
  Eigen::MatrixXd boolean_map(int stories) const;
};

/// Diagonal feedback gain E (grounded damper constants, N s/m).
struct FeedbackGain {
  Eigen::VectorXd damper;

  void validate(int measured) const;
};

/// Design-stage disturbance model for the linearized error dynamics.
/// All densities are two-sided.
struct NoiseModel {
  std::function<double(double)> process_psd;  // Phi_ww(omega)
  Eigen::VectorXd measurement_psd;            // flat Phi_vv per DOF (length n)
  Eigen::VectorXd process_influence;          // b2 (length n)
};

/// b2 = -M b1 and a common measurement density for every DOF.
NoiseModel make_noise_model(const StructuralMatrices& mats, const Eigen::VectorXd& ground_influence,
                            std::function<double(double)> process_psd, double measurement_psd);

/// C_xi + c2^T E c2. Mass and stiffness are untouched.
Eigen::MatrixXd observer_damping(const Eigen::MatrixXd& damping, const SensorLayout& layout,
                                 const FeedbackGain& gain);

/// Hermitian n x n error PSD  H (b2 Phi_ww b2^T + c2^T E Phi_vv E c2) H^*
/// with H = (K0 - M w^2 + i w (C + c2^T E c2))^-1.
Eigen::MatrixXcd error_psd(double omega, const StructuralMatrices& mats, const SensorLayout& layout,
                           const FeedbackGain& gain, const NoiseModel& noise);

/// Drift-error variances from P: P(1,1) and P(k,k)+P(k-1,k-1)-2P(k,k-1).
Eigen::VectorXd isd_variances(const Eigen::MatrixXd& p);

struct CovarianceOptions {
  int grid_points = 2048;
  double omega_max = 0.0;  // 0 means 5 x the highest natural frequency
  int tail_points_per_decade = 64;
  bool refinement_check = true;
  double refinement_tolerance = 0.01;
};

struct CovarianceMetadata {
  int grid_points = 0;
  int tail_points = 0;
  double omega_max = 0.0;
  double tail_max = 0.0;
  double refinement_change = 0.0;  // relative trace change on a doubled grid
  bool refined = false;
  bool accurate = true;
  double clipped_eigenvalue = 0.0;
  std::string provenance = "design-stage, linearized at initial stiffness";
};

struct ErrorCovariance {
  Eigen::MatrixXd p;             // m^2
  Eigen::VectorXd isd_variance;  // m^2
  CovarianceMetadata metadata;

  double trace_p() const { return p.trace(); }
  double trace_isd() const { return isd_variance.sum(); }
};

/// P = integral of Phi_ee over the real line, evaluated as twice the
/// trapezoidal integral of Re(Phi_ee) on a uniform grid over [0, omega_max]
/// plus a log-spaced tail up to 5 x the fastest closed-loop pole (only
/// present when the added dampers push a pole beyond omega_max).
ErrorCovariance estimation_covariance(const StructuralMatrices& mats, const SensorLayout& layout,
                                      const FeedbackGain& gain, const NoiseModel& noise,
                                      const CovarianceOptions& options = {});

enum class GainObjective { trace_p, trace_p_isd };

struct GainOptimizerSettings {
  double lower = 1.0;  // N s/m, search box
  double upper = 1e9;
  double initial_low = 1e2;  // initial simplex span
  double initial_high = 1e6;
  int restarts = 5;  // fresh simplices around the incumbent after convergence
  double restart_span = 10.0;
  SimplexSettings simplex{};
  CovarianceOptions covariance{2048, 0.0, 64, false, 0.01};
};

struct GainOptimization {
  FeedbackGain gain;
  double objective = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

double gain_objective(const ErrorCovariance& cov, GainObjective objective);

/// Minimizes tr(P) or tr(P_ISD) over diagonal E with a simplex search in
/// log(E), restarted around the incumbent until a restart no longer
/// improves the objective. Hitting the iteration cap returns the best point
/// with converged = false.
GainOptimization optimize_gain(const StructuralMatrices& mats, const SensorLayout& layout,
                               const NoiseModel& noise, GainObjective objective,
                               const GainOptimizerSettings& settings = {});

struct ObserverSolution {
  ResponseHistory estimate;
  std::optional<ErrorCovariance> covariance;
  FeedbackGain gain;
  SensorLayout layout;
};

/// Integrates  M q'' + (C + c2^T E c2) q' + f_R(q, z) = c2^T E y'(t)  with
/// the same Newmark/Newton machinery as simulate_response. `velocities`
/// holds one m/s record per measured DOF, in layout order.
ObserverSolution run_nmbo(const BuildingModel& model, const FeedbackGain& gain,
                          const SensorLayout& layout, std::span<const Record> velocities,
                          const IntegratorSettings& settings = {});

}  // namespace seismon
