#include "seismon/structure.hpp"

#include "seismon/error.hpp"

#include <cmath>
#include <string>

namespace seismon {

namespace {

bool all_positive(const std::vector<double>& values) {
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

void BuildingModel::validate() const {
  const auto n = story_mass.size();
  if (n == 0) throw ValidationError("building model needs at least one story");
  if (story_stiffness.size() != n || story_height.size() != n)
    throw ValidationError("story_mass, story_stiffness and story_height must have equal length");
  if (!all_positive(story_mass)) throw ValidationError("story masses must be strictly positive");
  if (!all_positive(story_stiffness))
    throw ValidationError("story stiffnesses must be strictly positive");
  if (!all_positive(story_height)) throw ValidationError("story heights must be strictly positive");
  if (!hysteresis.empty() && hysteresis.size() != n)
    throw ValidationError("hysteresis must be empty or give one law per story");
  for (const auto& law : hysteresis) {
    if (law.kind != HysteresisLaw::Kind::bilinear) continue;
    if (!(law.yield_drift > 0.0)) throw ValidationError("bilinear yield_drift must be positive");
    if (!(law.post_yield_ratio >= 0.0 && law.post_yield_ratio < 1.0))
      throw ValidationError("bilinear post_yield_ratio must lie in [0, 1)");
  }
  if (influence.size() != 0 && influence.size() != static_cast<Eigen::Index>(n))
    throw ValidationError("influence vector length must match story count");
  if (const auto* explicit_c = std::get_if<Eigen::MatrixXd>(&damping)) {
    if (explicit_c->rows() != static_cast<Eigen::Index>(n) || explicit_c->cols() != explicit_c->rows())
      throw ValidationError("explicit damping matrix must be n x n");
    if (!explicit_c->isApprox(explicit_c->transpose(), 1e-12))
      throw ValidationError("explicit damping matrix must be symmetric");
  } else {
    const auto& rayleigh = std::get<RayleighDamping>(damping);
    if (rayleigh.mode_a < 1 || rayleigh.mode_b < 1)
      throw ValidationError("Rayleigh anchor modes are 1-based");
    if (rayleigh.ratio_a < 0.0 || rayleigh.ratio_b < 0.0)
      throw ValidationError("Rayleigh damping ratios must be non-negative");
  }
}

const HysteresisLaw& BuildingModel::law(int story) const {
  static const HysteresisLaw kLinear{};
  return hysteresis.empty() ? kLinear : hysteresis.at(static_cast<std::size_t>(story));
}

Eigen::VectorXd BuildingModel::ground_influence() const {
  if (influence.size() == 0) return Eigen::VectorXd::Ones(stories());
  return influence;
}

int BuildingModel::hysteresis_state_size() const {
  int size = 0;
  for (const auto& law : hysteresis) size += law.state_size();
  return size;
}

bool BuildingModel::is_linear() const { return hysteresis_state_size() == 0; }

Eigen::VectorXd natural_frequencies(const Eigen::MatrixXd& mass, const Eigen::MatrixXd& stiffness) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(stiffness, mass,
                                                                   Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw SingularityError("modal eigen-solve failed");
  return solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
}

Eigen::Vector2d rayleigh_coefficients(double omega_a, double ratio_a, double omega_b, double ratio_b) {
  if (std::abs(omega_a - omega_b) <= 1e-12 * std::max(omega_a, omega_b))
    throw SingularityError("Rayleigh anchor frequencies are equal");
  Eigen::Matrix2d system;
  system << 0.5 / omega_a, 0.5 * omega_a, 0.5 / omega_b, 0.5 * omega_b;
  return system.partialPivLu().solve(Eigen::Vector2d(ratio_a, ratio_b));
}

StructuralMatrices assemble_matrices(const BuildingModel& model) {
  model.validate();
  const int n = model.stories();
  StructuralMatrices out;
  out.mass = Eigen::MatrixXd::Zero(n, n);
  out.stiffness = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    out.mass(k, k) = model.story_mass[k];
    const double ks = model.story_stiffness[k];
    out.stiffness(k, k) += ks;
    if (k > 0) {
      out.stiffness(k - 1, k - 1) += ks;
      out.stiffness(k - 1, k) -= ks;
      out.stiffness(k, k - 1) -= ks;
    }
  }

  if (const auto* explicit_c = std::get_if<Eigen::MatrixXd>(&model.damping)) {
    out.damping = *explicit_c;
    return out;
  }

  const auto& rayleigh = std::get<RayleighDamping>(model.damping);
  const Eigen::VectorXd omega = natural_frequencies(out.mass, out.stiffness);
  const int mode_a = std::min(rayleigh.mode_a, n);
  const bool clamped = rayleigh.mode_b > n;
  const int mode_b = std::min(rayleigh.mode_b, n);
  if (mode_a == mode_b && clamped) {
    // Fewer modes than anchors: split the ratio evenly between the mass and
    // stiffness terms so the single mode still gets ratio_a.
    const double w = omega(mode_a - 1);
    out.damping = rayleigh.ratio_a * w * out.mass + (rayleigh.ratio_a / w) * out.stiffness;
    return out;
  }
  const Eigen::Vector2d coeff = rayleigh_coefficients(omega(mode_a - 1), rayleigh.ratio_a,
                                                      omega(mode_b - 1), rayleigh.ratio_b);
  out.damping = coeff(0) * out.mass + coeff(1) * out.stiffness;
  return out;
}

Eigen::VectorXd story_drifts(const Eigen::VectorXd& q) {
  Eigen::VectorXd d(q.size());
  for (Eigen::Index k = 0; k < q.size(); ++k) d(k) = q(k) - (k > 0 ? q(k - 1) : 0.0);
  return d;
}

Eigen::VectorXd dof_forces(const Eigen::VectorXd& story_shear) {
  const Eigen::Index n = story_shear.size();
  Eigen::VectorXd f(n);
  for (Eigen::Index k = 0; k < n; ++k)
    f(k) = story_shear(k) - (k + 1 < n ? story_shear(k + 1) : 0.0);
  return f;
}

Eigen::MatrixXd tangent_stiffness(const Eigen::VectorXd& story_tangent) {
  const Eigen::Index n = story_tangent.size();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index s = 0; s < n; ++s) {
    k(s, s) += story_tangent(s);
    if (s > 0) {
      k(s - 1, s - 1) += story_tangent(s);
      k(s - 1, s) -= story_tangent(s);
      k(s, s - 1) -= story_tangent(s);
    }
  }
  return k;
}

RestoringForce restoring_force(const BuildingModel& model, const Eigen::VectorXd& drift,
                               const Eigen::VectorXd& /*drift_rate*/, const Eigen::VectorXd& state) {
  const int n = model.stories();
  RestoringForce out;
  out.story_shear.resize(n);
  out.story_tangent.resize(n);
  out.state = state;

  Eigen::Index offset = 0;
  for (int k = 0; k < n; ++k) {
    const auto& law = model.law(k);
    const double stiffness = model.story_stiffness[k];
    if (law.kind == HysteresisLaw::Kind::linear) {
      out.story_shear(k) = stiffness * drift(k);
      out.story_tangent(k) = stiffness;
      continue;
    }

    // Return mapping with linear kinematic hardening. state = (plastic drift,
    // back force); hardening modulus H gives the post-yield tangent r*k.
    const double r = law.post_yield_ratio;
    const double hardening = r * stiffness / (1.0 - r);
    const double yield_force = stiffness * law.yield_drift;
    double plastic = state(offset);
    double back = state(offset + 1);

    const double trial = stiffness * (drift(k) - plastic);
    const double excess = trial - back;
    if (std::abs(excess) <= yield_force) {
      out.story_shear(k) = trial;
      out.story_tangent(k) = stiffness;
    } else {
      const double sign = excess > 0.0 ? 1.0 : -1.0;
      const double increment = (std::abs(excess) - yield_force) / (stiffness + hardening);
      plastic += sign * increment;
      back += sign * hardening * increment;
      out.story_shear(k) = stiffness * (drift(k) - plastic);
      out.story_tangent(k) = stiffness * hardening / (stiffness + hardening);
    }
    out.state(offset) = plastic;
    out.state(offset + 1) = back;
    offset += 2;
  }
  out.dof_force = dof_forces(out.story_shear);
  return out;
}

}  // namespace seismon
