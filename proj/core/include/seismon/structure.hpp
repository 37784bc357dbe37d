#pragma once

#include <Eigen/Dense>

#include <variant>
#include <vector>

namespace seismon {

/// Story shear-drift law. Bilinear follows the kinematic-hardening rule:
/// elastic slope k, post-yield slope r*k, elastic unloading.
struct HysteresisLaw {
  enum class Kind { linear, bilinear };

  Kind kind = Kind::linear;
  double yield_drift = 0.0;       // m, bilinear only
  double post_yield_ratio = 0.0;  // r in [0, 1), bilinear only

  static HysteresisLaw linear() { return {}; }
  static HysteresisLaw bilinear(double yield_drift, double post_yield_ratio) {
    return {Kind::bilinear, yield_drift, post_yield_ratio};
  }

  /// Number of auxiliary state variables this law carries (0 or 2).
  int state_size() const noexcept { return kind == Kind::bilinear ? 2 : 0; }
};

/// Rayleigh damping anchored at two modes (1-based mode numbers).
struct RayleighDamping {
  int mode_a = 1;
  int mode_b = 3;
  double ratio_a = 0.02;
  double ratio_b = 0.02;
};

using DampingSpec = std::variant<RayleighDamping, Eigen::MatrixXd>;

/// Lumped-mass shear building. Story k connects floor k-1 to floor k; floor 0
/// is the ground. All quantities are SI.
struct BuildingModel {
  std::vector<double> story_mass;       // kg
  std::vector<double> story_stiffness;  // N/m, initial elastic
  std::vector<double> story_height;     // m
  DampingSpec damping = RayleighDamping{};
  std::vector<HysteresisLaw> hysteresis;  // empty means all linear
  Eigen::VectorXd influence;              // b1; empty means all ones

  int stories() const noexcept { return static_cast<int>(story_mass.size()); }

  /// Throws ValidationError if any invariant is violated.
  void validate() const;

  const HysteresisLaw& law(int story) const;
  Eigen::VectorXd ground_influence() const;
  int hysteresis_state_size() const;
  bool is_linear() const;
};

struct StructuralMatrices {
  Eigen::MatrixXd mass;
  Eigen::MatrixXd damping;
  Eigen::MatrixXd stiffness;  // K0, initial tangent
};

/// M diagonal, K0 tridiagonal shear assembly, C from Rayleigh anchors or the
/// explicit matrix.
StructuralMatrices assemble_matrices(const BuildingModel& model);

/// Undamped natural circular frequencies (rad/s), ascending.
Eigen::VectorXd natural_frequencies(const Eigen::MatrixXd& mass, const Eigen::MatrixXd& stiffness);

/// Coefficients (a0, a1) of C = a0*M + a1*K reproducing the two anchor ratios.
Eigen::Vector2d rayleigh_coefficients(double omega_a, double ratio_a, double omega_b, double ratio_b);

/// d = T q with d_k = q_k - q_{k-1}, q_0 = 0.
Eigen::VectorXd story_drifts(const Eigen::VectorXd& q);

/// Global DOF forces f = T^T V from story shears.
Eigen::VectorXd dof_forces(const Eigen::VectorXd& story_shear);

struct RestoringForce {
  Eigen::VectorXd story_shear;    // N
  Eigen::VectorXd story_tangent;  // N/m, consistent tangent per story
  Eigen::VectorXd dof_force;      // N, global f_R
  Eigen::VectorXd state;          // updated auxiliary state z
};

/// Evaluates f_R for trial drifts starting from the committed state z.
/// Never throws for a valid state.
RestoringForce restoring_force(const BuildingModel& model, const Eigen::VectorXd& drift,
                               const Eigen::VectorXd& drift_rate, const Eigen::VectorXd& state);

/// Tangent stiffness T^T diag(kt) T.
Eigen::MatrixXd tangent_stiffness(const Eigen::VectorXd& story_tangent);

struct ResponseHistory {
  double dt = 0.0;
  Eigen::MatrixXd q;      // samples x stories, relative displacement (m)
  Eigen::MatrixXd qdot;   // m/s
  Eigen::MatrixXd qddot;  // m/s^2
  Eigen::MatrixXd z;      // samples x hysteresis state size

  Eigen::Index samples() const noexcept { return q.rows(); }
  Eigen::Index stories() const noexcept { return q.cols(); }
};

}  // namespace seismon
