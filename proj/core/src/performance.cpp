#include "seismon/performance.hpp"

#include "seismon/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace seismon {

namespace {

constexpr double kMonotoneSlack = 1e-12;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_upper(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

}  // namespace

std::string_view to_string(Level level) noexcept {
  switch (level) {
    case Level::io: return "IO";
    case Level::ls: return "LS";
    case Level::cp: return "CP";
    case Level::collapse: return "C";
  }
  return "?";
}

void DriftEstimate::validate() const {
  if (mean.size() == 0 || mean.size() != sigma.size())
    throw ValidationError("drift estimate needs matching, non-empty mean and sigma");
  if ((mean.array() < 0.0).any() || (sigma.array() < 0.0).any() || !mean.allFinite() ||
      !sigma.allFinite())
    throw ValidationError("drift means and sigmas must be finite and non-negative");
}

void PerformanceThresholds::validate() const {
  if (!(io > 0.0 && io < ls && ls < cp))
    throw ValidationError("performance thresholds must satisfy 0 < io < ls < cp");
}

PerformanceThresholds PerformanceThresholds::rc_frame() {
  return {0.01, 0.02, 0.04, "rc-frame: FEMA-356-style transient drift limits (IO 1%, LS 2%, CP 4%)"};
}

DriftEstimate estimate_drifts(const ObserverSolution& solution, const BuildingModel& model) {
  const auto& q = solution.estimate.q;
  const int n = model.stories();
  if (q.rows() == 0) throw ValidationError("observer history is empty");
  if (q.cols() != n) throw ValidationError("observer history does not match the model story count");
  if (!solution.covariance) throw ValidationError("observer solution carries no error covariance");
  const auto& isd_var = solution.covariance->isd_variance;
  if (isd_var.size() != n) throw ValidationError("covariance does not match the model story count");

  DriftEstimate out;
  out.mean.resize(n);
  out.sigma.resize(n);
  for (int k = 0; k < n; ++k) {
    const double h = model.story_height[static_cast<std::size_t>(k)];
    const Eigen::VectorXd drift = k == 0 ? Eigen::VectorXd(q.col(0)) : Eigen::VectorXd(q.col(k) - q.col(k - 1));
    out.mean(k) = drift.cwiseAbs().maxCoeff() / h;
    out.sigma(k) = std::sqrt(std::max(isd_var(k), 0.0)) / h;
  }
  return out;
}

double exceedance_probability(double mean, double sigma, double level, const ExceedanceOptions& options) {
  if (sigma <= 0.0) return mean >= level ? 1.0 : 0.0;
  const double upper = normal_upper((level - mean) / sigma);
  if (!options.truncate_at_zero || level <= 0.0) return upper;
  const double positive = normal_upper(-mean / sigma);
  return positive > 0.0 ? std::min(upper / positive, 1.0) : 1.0;
}

Exceedance story_exceedance(const DriftEstimate& estimate, const PerformanceThresholds& thresholds,
                            int story, const ExceedanceOptions& options) {
  thresholds.validate();
  if (story < 0 || story >= estimate.mean.size()) throw ValidationError("story index out of range");
  const double m = estimate.mean(story);
  const double s = estimate.sigma(story);
  return {exceedance_probability(m, s, thresholds.io, options),
          exceedance_probability(m, s, thresholds.ls, options),
          exceedance_probability(m, s, thresholds.cp, options)};
}

ClassProbabilities class_probabilities(const Exceedance& p) {
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("exceedance probabilities must lie in [0, 1]");
  }
  if (p[1] > p[0] + kMonotoneSlack || p[2] > p[1] + kMonotoneSlack)
    throw ValidationError("exceedance probabilities must be non-increasing from IO to CP");
  const double io = p[0];
  const double ls = std::min(p[1], io);
  const double cp = std::min(p[2], ls);
  return {1.0 - io, io - ls, ls - cp, cp};
}

Exceedance building_exceedance(std::span<const Exceedance> stories) {
  Exceedance survive{1.0, 1.0, 1.0};
  for (const auto& s : stories) {
    for (std::size_t l = 0; l < 3; ++l) survive[l] *= 1.0 - s[l];
  }
  return {1.0 - survive[0], 1.0 - survive[1], 1.0 - survive[2]};
}

Level classify(const ClassProbabilities& probabilities) {
  std::size_t best = 0;
  for (std::size_t l = 1; l < probabilities.size(); ++l) {
    if (probabilities[l] >= probabilities[best]) best = l;
  }
  return static_cast<Level>(best);
}

Level classify(const PerformanceReport& report) { return classify(report.building.classes); }

PerformanceReport assess_exceedance(std::span<const Exceedance> stories,
                                    const PerformanceThresholds& thresholds) {
  thresholds.validate();
  if (stories.empty()) throw ValidationError("need at least one story");
  PerformanceReport report;
  report.thresholds = thresholds;
  for (const auto& e : stories) report.stories.push_back({e, class_probabilities(e)});
  report.building.exceed = building_exceedance(stories);
  report.building.classes = class_probabilities(report.building.exceed);
  report.classification = classify(report);
  return report;
}

PerformanceReport assess(const DriftEstimate& estimate, const PerformanceThresholds& thresholds,
                         const ExceedanceOptions& options, std::string covariance_provenance) {
  estimate.validate();
  std::vector<Exceedance> stories;
  for (int k = 0; k < estimate.mean.size(); ++k)
    stories.push_back(story_exceedance(estimate, thresholds, k, options));
  PerformanceReport report = assess_exceedance(stories, thresholds);
  report.covariance_provenance = std::move(covariance_provenance);
  report.drifts = estimate;
  return report;
}

DriftDistribution drift_distribution(const DriftEstimate& estimate, const PerformanceThresholds& thresholds,
                                     int points) {
  estimate.validate();
  if (points < 2) throw ValidationError("distribution grid needs at least 2 points");
  double upper = 1.5 * thresholds.cp;
  for (int k = 0; k < estimate.mean.size(); ++k)
    upper = std::max(upper, estimate.mean(k) + 4.0 * estimate.sigma(k));

  DriftDistribution out;
  const auto n = estimate.mean.size();
  out.drift = Eigen::VectorXd::LinSpaced(points, 0.0, upper);
  out.pdf.resize(points, n);
  out.cdf.resize(points, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double m = estimate.mean(k);
    const double s = estimate.sigma(k);
    for (int i = 0; i < points; ++i) {
      const double x = out.drift(i);
      if (s > 0.0) {
        const double z = (x - m) / s;
        out.pdf(i, k) = std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
        out.cdf(i, k) = normal_cdf(z);
      } else {
        out.pdf(i, k) = 0.0;
        out.cdf(i, k) = x >= m ? 1.0 : 0.0;
      }
    }
  }
  return out;
}

}  // namespace seismon
