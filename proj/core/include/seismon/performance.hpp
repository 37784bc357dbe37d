#pragma once

#include "seismon/observer.hpp"
#include "seismon/structure.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace seismon {

/// Performance classes in order of increasing severity.
enum class Level { io, ls, cp, collapse };

std::string_view to_string(Level level) noexcept;

/// Gaussian max-ISD model per story, in drift ratio (dimensionless).
struct DriftEstimate {
  Eigen::VectorXd mean;
  Eigen::VectorXd sigma;

  void validate() const;
};

struct PerformanceThresholds {
  double io = 0.01;
  double ls = 0.02;
  double cp = 0.04;
  std::string provenance;

  void validate() const;

  /// Transient-drift limits commonly quoted for reinforced-concrete frames
  /// (FEMA-356 style): 1%, 2%, 4%.
  static PerformanceThresholds rc_frame();
};

/// p(ISD >= IO), p(ISD >= LS), p(ISD >= CP).
using Exceedance = std::array<double, 3>;
/// p(IO), p(LS), p(CP), p(C).
using ClassProbabilities = std::array<double, 4>;

struct ExceedanceOptions {
  /// Condition the Gaussian on ISD >= 0. Off by default.
  bool truncate_at_zero = false;
};

/// mean_k = max_t |q_k - q_{k-1}| / h_k,  sigma_k = sqrt(P_ISD(k)) / h_k.
DriftEstimate estimate_drifts(const ObserverSolution& solution, const BuildingModel& model);

/// 1 - Phi((level - mean)/sigma); a step function when sigma == 0.
double exceedance_probability(double mean, double sigma, double level,
                              const ExceedanceOptions& options = {});

/// `story` is a 0-based index.
Exceedance story_exceedance(const DriftEstimate& estimate, const PerformanceThresholds& thresholds,
                            int story, const ExceedanceOptions& options = {});

/// Band probabilities from exceedance values. Throws ValidationError unless
/// the input is non-increasing from IO to CP.
ClassProbabilities class_probabilities(const Exceedance& exceed);

/// 1 - prod_k (1 - p_k) per level, assuming independent stories.
Exceedance building_exceedance(std::span<const Exceedance> stories);

/// argmax of the class probabilities; ties go to the more severe level.
Level classify(const ClassProbabilities& probabilities);

struct LevelProbabilities {
  Exceedance exceed{};
  ClassProbabilities classes{};
};

struct PerformanceReport {
  std::vector<LevelProbabilities> stories;
  LevelProbabilities building;
  PerformanceThresholds thresholds;
  Level classification = Level::io;
  std::string covariance_provenance;
  std::optional<DriftEstimate> drifts;
};

Level classify(const PerformanceReport& report);

PerformanceReport assess(const DriftEstimate& estimate, const PerformanceThresholds& thresholds,
                         const ExceedanceOptions& options = {},
                         std::string covariance_provenance = {});

/// Same aggregation, starting from story exceedance values supplied directly.
PerformanceReport assess_exceedance(std::span<const Exceedance> stories,
                                    const PerformanceThresholds& thresholds);

/// PDF and CDF of each story's drift Gaussian on a uniform drift-ratio grid.
struct DriftDistribution {
  Eigen::VectorXd drift;
  Eigen::MatrixXd pdf;  // grid x stories
  Eigen::MatrixXd cdf;
};

DriftDistribution drift_distribution(const DriftEstimate& estimate, const PerformanceThresholds& thresholds,
                                     int points = 401);

}  // namespace seismon
