#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

#include "seismon/error.hpp"
#include "seismon/newmark.hpp"
#include "seismon/structure.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace seismon;

namespace {

Eigen::VectorXd drift1(double d) { return Eigen::VectorXd::Constant(1, d); }

// Drives a single bilinear story through a drift path, committing state at
// every point, and returns the shear at each point.
std::vector<double> shear_path(const BuildingModel& model, const std::vector<double>& path) {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(model.hysteresis_state_size());
  std::vector<double> out;
  for (double d : path) {
    const RestoringForce rf = restoring_force(model, drift1(d), drift1(0.0), z);
    z = rf.state;
    out.push_back(rf.story_shear(0));
  }
  return out;
}

std::vector<double> ramp(double from, double to, int steps) {
  std::vector<double> out;
  for (int i = 1; i <= steps; ++i) out.push_back(from + (to - from) * i / steps);
  return out;
}

BuildingModel sdof(double m, double k) { return fixture::shear_building({m}, {k}); }

}  // namespace

TEST_CASE("SDOF with k = 4 pi^2 and unit mass has a 1 Hz natural frequency") {
  const auto mats = assemble_matrices(sdof(1.0, 4.0 * std::numbers::pi * std::numbers::pi));
  CHECK(natural_frequencies(mats.mass, mats.stiffness)(0) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("two-story stiffness assembly") {
  const auto mats = assemble_matrices(fixture::shear_building({1, 1}, {2, 1}));
  Eigen::Matrix2d expected;
  expected << 3, -1, -1, 1;
  CHECK((mats.stiffness - expected).norm() == 0.0);
  CHECK((mats.mass - Eigen::Matrix2d::Identity()).norm() == 0.0);
}

TEST_CASE("Rayleigh damping reproduces the anchor ratios and the formula at mode 2") {
  const auto model = fixture::shear_building({2e5, 1.5e5, 1e5}, {3e8, 2e8, 1e8});
  const auto mats = assemble_matrices(model);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(mats.stiffness, mats.mass);
  const Eigen::VectorXd w = eig.eigenvalues().cwiseSqrt();
  const Eigen::MatrixXd phi = eig.eigenvectors();
  const Eigen::Vector2d ab = rayleigh_coefficients(w(0), 0.02, w(2), 0.02);
  for (int i = 0; i < 3; ++i) {
    const Eigen::VectorXd v = phi.col(i);
    const double ratio = v.dot(mats.damping * v) / (2.0 * w(i) * v.dot(mats.mass * v));
    const double formula = 0.5 * (ab(0) / w(i) + ab(1) * w(i));
    CHECK(ratio == doctest::Approx(formula).epsilon(1e-10));
    if (i != 1) CHECK(ratio == doctest::Approx(0.02).epsilon(1e-10));
  }
  // Mode 2 sits between the anchors, so it is under-damped.
  const Eigen::VectorXd v = phi.col(1);
  CHECK(v.dot(mats.damping * v) / (2.0 * w(1) * v.dot(mats.mass * v)) < 0.02);
}

TEST_CASE("assembled matrices satisfy the model invariants") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 6;
    std::vector<double> m, k;
    for (int i = 0; i < n; ++i) {
      m.push_back(1e5 * u(rng));
      k.push_back(1e8 * u(rng));
    }
    const auto mats = assemble_matrices(fixture::shear_building(m, k));
    CHECK((mats.mass - mats.mass.transpose()).norm() == 0.0);
    CHECK((mats.stiffness - mats.stiffness.transpose()).norm() == 0.0);
    CHECK(mats.damping.isApprox(mats.damping.transpose(), 1e-12));
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(mats.mass).eigenvalues().minCoeff() > 0.0);
    const auto ks = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(mats.stiffness).eigenvalues();
    CHECK(ks.minCoeff() >= -1e-9 * ks.maxCoeff());
    const auto cs = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(mats.damping).eigenvalues();
    CHECK(cs.minCoeff() >= -1e-9 * cs.maxCoeff());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (std::abs(i - j) > 1) CHECK(mats.stiffness(i, j) == 0.0);
  }
}

TEST_CASE("invalid models are rejected") {
  CHECK_THROWS_AS(assemble_matrices(fixture::shear_building({1, 0}, {1, 1})), ValidationError);
  CHECK_THROWS_AS(assemble_matrices(fixture::shear_building({1, 1}, {1, -1})), ValidationError);
  auto model = fixture::shear_building({1, 1}, {1, 1});
  model.story_height[0] = 0.0;
  CHECK_THROWS_AS(assemble_matrices(model), ValidationError);
  CHECK_THROWS_AS(assemble_matrices(fixture::shear_building({}, {})), ValidationError);
  auto bad_law = fixture::shear_building({1}, {1});
  bad_law.hysteresis = {HysteresisLaw::bilinear(0.01, 1.0)};
  CHECK_THROWS_AS(assemble_matrices(bad_law), ValidationError);
}

TEST_CASE("equal Rayleigh anchors are a singular specification") {
  auto model = fixture::uniform_building(3);
  model.damping = RayleighDamping{2, 2, 0.02, 0.02};
  CHECK_THROWS_AS(assemble_matrices(model), SingularityError);
}

TEST_CASE("single story with default anchors gets the requested ratio") {
  const auto mats = assemble_matrices(sdof(2.0, 50.0));
  const double w = 5.0;
  CHECK(mats.damping(0, 0) / (2.0 * w * 2.0) == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("explicit damping passes through") {
  auto model = fixture::shear_building({1, 1}, {2, 1});
  Eigen::Matrix2d c;
  c << 0.3, -0.1, -0.1, 0.2;
  model.damping = Eigen::MatrixXd(c);
  CHECK((assemble_matrices(model).damping - c).norm() == 0.0);
}

TEST_CASE("linear restoring force is Hooke's law") {
  const auto model = sdof(1.0, 1000.0);
  const auto rf = restoring_force(model, drift1(0.01), drift1(0.0), Eigen::VectorXd());
  CHECK(rf.story_shear(0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(rf.state.size() == 0);
}

TEST_CASE("bilinear monotonic loading to twice yield") {
  auto model = sdof(1.0, 1000.0);
  model.hysteresis = {HysteresisLaw::bilinear(0.01, 0.1)};
  const double expected = 0.011 * 1000.0;
  // Jump straight to the target and walk there incrementally: same answer.
  CHECK(shear_path(model, {0.02}).back() == doctest::Approx(expected).epsilon(1e-12));
  CHECK(shear_path(model, ramp(0.0, 0.02, 37)).back() == doctest::Approx(expected).epsilon(1e-12));
  const auto rf = restoring_force(model, drift1(0.02), drift1(0.0), Eigen::VectorXd::Zero(2));
  CHECK(rf.story_tangent(0) == doctest::Approx(100.0).epsilon(1e-12));
  const auto elastic = restoring_force(model, drift1(0.005), drift1(0.0), Eigen::VectorXd::Zero(2));
  CHECK(elastic.story_tangent(0) == 1000.0);
}

TEST_CASE("bilinear loop area matches the closed-form parallelogram") {
  for (double r : {0.0, 0.05, 0.1, 0.3}) {
    auto model = sdof(1.0, 2.0e6);
    const double dy = 0.01, x = 0.02;
    model.hysteresis = {HysteresisLaw::bilinear(dy, r)};
    // Prime to +x, then one full cycle +x -> -x -> +x.
    std::vector<double> path = ramp(0.0, x, 400);
    const std::size_t start = path.size();
    for (double d : ramp(x, -x, 4000)) path.push_back(d);
    for (double d : ramp(-x, x, 4000)) path.push_back(d);
    const auto force = shear_path(model, path);
    const std::vector<double> loop_d(path.begin() + static_cast<std::ptrdiff_t>(start), path.end());
    const std::vector<double> loop_f(force.begin() + static_cast<std::ptrdiff_t>(start), force.end());
    CHECK(oracle::loop_area(loop_d, loop_f) ==
          doctest::Approx(oracle::bilinear_loop_area(2.0e6, dy, r, x)).epsilon(1e-9));
  }
}

TEST_CASE("residual drift after unloading from a monotonic excursion") {
  const double k = 5e7, dy = 0.008;
  for (double r : {0.0, 0.02, 0.2}) {
    for (double x : {0.01, 0.02, 0.05}) {
      // Unloading to zero force must stay inside the elastic range 2*dy.
      if (r * (x - dy) > dy) continue;
      auto model = sdof(1.0, k);
      model.hysteresis = {HysteresisLaw::bilinear(dy, r)};
      auto path = ramp(0.0, x, 50);
      const double residual = (x - dy) * (1.0 - r);
      for (double d : ramp(x, residual, 50)) path.push_back(d);
      CHECK(std::abs(shear_path(model, path).back()) <= 1e-9 * k * dy);
    }
  }
}

TEST_CASE("bilinear force is continuous in drift and unloads with the initial stiffness") {
  auto model = sdof(1.0, 1e6);
  model.hysteresis = {HysteresisLaw::bilinear(0.01, 0.1)};
  std::vector<double> path = ramp(0.0, 0.03, 3000);
  for (double d : ramp(0.03, -0.03, 6000)) path.push_back(d);
  const auto force = shear_path(model, path);
  for (std::size_t i = 1; i < path.size(); ++i)
    CHECK(std::abs(force[i] - force[i - 1]) <= 1e6 * std::abs(path[i] - path[i - 1]) * (1 + 1e-9));
  // Just after reversal the slope equals k.
  const double slope = (force[3001] - force[3000]) / (path[3001] - path[3000]);
  CHECK(slope == doctest::Approx(1e6).epsilon(1e-9));
}

TEST_CASE("zero ground motion gives an identically zero response") {
  Record quiet;
  quiet.dt = 0.01;
  quiet.samples.assign(500, 0.0);
  auto model = fixture::seven_story_bilinear();
  const auto h = simulate_response(model, quiet);
  CHECK(h.q.cwiseAbs().maxCoeff() == 0.0);
  CHECK(h.qdot.cwiseAbs().maxCoeff() == 0.0);
  CHECK(h.z.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("linear SDOF at resonance reaches the frequency-response amplitude") {
  const double m = 1.0, wn = 2.0 * std::numbers::pi, xi = 0.02;
  auto model = sdof(m, m * wn * wn);
  model.damping = Eigen::MatrixXd::Constant(1, 1, 2.0 * xi * wn * m);
  const double a0 = 0.5, dt = 0.005;
  const auto ground = fixture::sine_record(a0, wn, dt, 24001);
  const auto h = simulate_response(model, ground);
  const double expected = m * a0 / std::hypot(m * wn * wn - m * wn * wn, 2.0 * xi * wn * m * wn);
  // Last five periods, well past the transient (exp(-xi wn t) ~ 3e-7).
  const Eigen::Index tail = static_cast<Eigen::Index>(5.0 / dt);
  const double amplitude = h.q.col(0).tail(tail).cwiseAbs().maxCoeff();
  CHECK(amplitude == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("bilinear SDOF pulse response converges to a fine-step reference") {
  auto model = sdof(1e5, 4e7);
  model.hysteresis = {HysteresisLaw::bilinear(0.01, 0.05)};
  Record pulse;
  pulse.dt = 0.01;
  for (int i = 0; i < 400; ++i) {
    const double t = i * pulse.dt;
    pulse.samples.push_back(t < 0.5 ? 8.0 * std::sin(std::numbers::pi * t / 0.5) : 0.0);
  }
  const auto coarse = simulate_response(model, pulse);
  IntegratorSettings fine;
  fine.dt = pulse.dt / 100.0;
  const auto reference = simulate_response(model, pulse, fine);
  const double peak = coarse.q.cwiseAbs().maxCoeff();
  const double peak_ref = reference.q.cwiseAbs().maxCoeff();
  CHECK(peak_ref > 0.01);  // actually yields
  CHECK(peak == doctest::Approx(peak_ref).epsilon(0.005));
}

TEST_CASE("energy balance for a linear model") {
  auto model = fixture::uniform_building(3);
  const auto mats = assemble_matrices(model);
  GroundMotionSpec spec = fixture::northridge_like(0.01, 10.0, 0.005);
  const Record ground = generate_realization(spec, 11);
  const auto h = simulate_response(model, ground);
  const Eigen::VectorXd load = -(mats.mass * Eigen::VectorXd::Ones(3));

  // Trapezoidal work sums over the sample intervals; with the
  // average-acceleration rule this identity is exact up to Newton tolerance.
  double input = 0.0, dissipated = 0.0, peak = 0.0;
  for (Eigen::Index i = 0; i + 1 < h.samples(); ++i) {
    const Eigen::VectorXd vmid = 0.5 * (h.qdot.row(i) + h.qdot.row(i + 1)).transpose();
    const double pmid = 0.5 * (ground.samples[static_cast<std::size_t>(i)] + ground.samples[static_cast<std::size_t>(i + 1)]);
    const Eigen::VectorXd dq = (h.q.row(i + 1) - h.q.row(i)).transpose();
    input += (load * pmid).dot(dq);
    dissipated += (mats.damping * vmid).dot(dq);
    const Eigen::VectorXd v = h.qdot.row(i + 1).transpose(), q = h.q.row(i + 1).transpose();
    peak = std::max(peak, 0.5 * v.dot(mats.mass * v) + 0.5 * q.dot(mats.stiffness * q));
  }
  const Eigen::VectorXd v = h.qdot.bottomRows(1).transpose(), q = h.q.bottomRows(1).transpose();
  const double stored = 0.5 * v.dot(mats.mass * v) + 0.5 * q.dot(mats.stiffness * q);
  CHECK(std::abs(input - stored - dissipated) <= 1e-3 * std::max(std::abs(input), peak));
}

TEST_CASE("average acceleration conserves energy in free vibration") {
  auto model = fixture::uniform_building(3);
  model.damping = Eigen::MatrixXd::Zero(3, 3);
  const auto mats = assemble_matrices(model);
  Record kick;
  kick.dt = 0.01;
  kick.samples.assign(1000, 0.0);
  for (int i = 0; i < 10; ++i) kick.samples[static_cast<std::size_t>(i)] = 1.0;
  const auto h = simulate_response(model, kick);
  auto energy = [&](Eigen::Index i) {
    const Eigen::VectorXd v = h.qdot.row(i).transpose(), q = h.q.row(i).transpose();
    return 0.5 * v.dot(mats.mass * v) + 0.5 * q.dot(mats.stiffness * q);
  };
  const double e0 = energy(20);
  CHECK(e0 > 0.0);
  for (Eigen::Index i = 20; i < h.samples(); i += 37) CHECK(energy(i) == doctest::Approx(e0).epsilon(1e-6));
}

TEST_CASE("halving dt shows second-order convergence") {
  auto model = fixture::uniform_building(2);
  const auto ground = fixture::sine_record(1.0, 7.0, 0.02, 301);
  auto run = [&](int sub) {
    IntegratorSettings s;
    s.dt = ground.dt / sub;
    return simulate_response(model, ground, s).q;
  };
  const Eigen::MatrixXd q1 = run(1), q2 = run(2), q4 = run(4);
  const double ratio = (q1 - q2).cwiseAbs().maxCoeff() / (q2 - q4).cwiseAbs().maxCoeff();
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("integrator errors") {
  auto model = fixture::uniform_building(2);
  const auto mats = assemble_matrices(model);
  Eigen::MatrixXd forcing = Eigen::MatrixXd::Zero(5, 2);
  forcing(2, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(integrate_newmark(model, mats.mass, mats.damping, forcing, 0.01, {}), DivergenceError);

  IntegratorSettings uneven;
  uneven.dt = 0.003;
  CHECK_THROWS_AS(simulate_response(model, fixture::sine_record(1, 1, 0.01, 10), uneven), ValidationError);
  IntegratorSettings bad_beta;
  bad_beta.beta = 0.0;
  CHECK_THROWS_AS(bad_beta.validate(), ValidationError);
  IntegratorSettings bad_gamma;
  bad_gamma.gamma = 0.4;
  CHECK_THROWS_AS(bad_gamma.validate(), ValidationError);

  auto yielding = sdof(1e5, 4e7);
  yielding.hysteresis = {HysteresisLaw::bilinear(0.001, 0.0)};
  IntegratorSettings starved;
  starved.max_iterations = 1;
  starved.newton_tol = 1e-14;
  const auto strong = fixture::sine_record(20.0, 10.0, 0.02, 200);
  try {
    simulate_response(yielding, strong, starved);
    FAIL("expected a convergence failure");
  } catch (const ConvergenceError& e) {
    CHECK(e.step() >= 1);
    CHECK(e.kind() == ErrorKind::convergence);
  }
}

TEST_CASE("velocity-tagged records cannot drive the building") {
  auto model = fixture::uniform_building(2);
  CHECK_THROWS_AS(simulate_response(model, fixture::sine_record(1, 1, 0.01, 10, Units::velocity)), UnitError);
}

TEST_CASE("process noise injection is deterministic and optional") {
  auto model = fixture::uniform_building(2);
  Record quiet;
  quiet.dt = 0.01;
  quiet.samples.assign(200, 0.0);
  ProcessNoise noise{1e-4, 5, {}};
  const auto a = simulate_response(model, quiet, {}, noise);
  const auto b = simulate_response(model, quiet, {}, noise);
  CHECK(a.q.cwiseAbs().maxCoeff() > 0.0);
  CHECK((a.q - b.q).norm() == 0.0);
  CHECK(simulate_response(model, quiet).q.norm() == 0.0);
}
