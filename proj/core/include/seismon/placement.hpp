#pragma once

#include "seismon/observer.hpp"
#include "seismon/structure.hpp"

#include <map>
#include <vector>

namespace seismon {

/// How sigma2_max is expressed: absolute drift variance (m^2) or variance of
/// the height-normalized drift ratio.
enum class VarianceUnits { absolute, drift_ratio };

struct PlacementProblem {
  BuildingModel model;
  std::vector<int> candidates;  // 1-based story numbers
  int sensors = 1;
  double sigma2_max = 0.0;
  VarianceUnits sigma_units = VarianceUnits::absolute;
  NoiseModel noise;
  /// What the placement minimizes; trace_p matches argmin tr(P).
  GainObjective placement_objective = GainObjective::trace_p;
  /// What the nested gain optimization minimizes for each candidate layout.
  GainObjective gain_objective = GainObjective::trace_p;
  GainOptimizerSettings optimizer{};
  CovarianceOptions covariance{2048, 0.0, 64, false, 0.01};
  long long enumeration_cap = 10000;

  void validate() const;
};

struct LayoutEvaluation {
  SensorLayout layout;
  FeedbackGain gain;
  double trace_p = 0.0;
  double trace_isd = 0.0;
  double max_isd_var = 0.0;  // in the problem's sigma units
  bool gain_converged = false;

  double objective(GainObjective which) const {
    return which == GainObjective::trace_p ? trace_p : trace_isd;
  }
};

struct PlacementResult {
  SensorLayout layout;
  FeedbackGain gain;
  double trace_p = 0.0;
  double trace_isd = 0.0;
  double max_isd_var = 0.0;
  bool feasible = false;
  int evaluated_count = 0;
  std::vector<LayoutEvaluation> audit;  // every layout evaluated, in order
  std::vector<LayoutEvaluation> path;   // greedy only: chosen layout after each addition
};

/// Evaluates layouts (nested gain optimization plus covariance) and caches
/// results by sorted layout.
class LayoutEvaluator {
 public:
  explicit LayoutEvaluator(PlacementProblem problem);

  const LayoutEvaluation& evaluate(const SensorLayout& layout);
  const PlacementProblem& problem() const { return problem_; }
  const StructuralMatrices& matrices() const { return mats_; }

 private:
  PlacementProblem problem_;
  StructuralMatrices mats_;
  std::map<std::vector<int>, LayoutEvaluation> cache_;
};

LayoutEvaluation evaluate_layout(const PlacementProblem& problem, const SensorLayout& layout);

/// Every size-m subset of the candidates; minimal objective among feasible
/// subsets, or the least-violating subset with feasible = false. Throws
/// ValidationError when C(|candidates|, m) exceeds the enumeration cap.
PlacementResult place_exhaustive(const PlacementProblem& problem);

/// Forward selection: add the candidate that most reduces the objective
/// until the budget is reached.
PlacementResult place_greedy(const PlacementProblem& problem);

/// n choose k, saturating at the maximum long long.
long long binomial(int n, int k);

}  // namespace seismon
