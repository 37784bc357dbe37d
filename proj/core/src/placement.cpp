#include "seismon/placement.hpp"

#include "seismon/error.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace seismon {

namespace {

std::vector<int> sorted_dofs(const SensorLayout& layout) {
  std::vector<int> dofs = layout.measured_dofs;
  std::sort(dofs.begin(), dofs.end());
  return dofs;
}

bool feasible(const LayoutEvaluation& e, double sigma2_max) { return e.max_isd_var < sigma2_max; }

// Strict preference used by both search strategies: feasible beats
// infeasible; among feasible, lower objective; among infeasible, smaller
// violation. Remaining ties keep the earlier (lexicographically smaller)
// layout.
bool better(const LayoutEvaluation& a, const LayoutEvaluation& b, const PlacementProblem& problem) {
  const bool fa = feasible(a, problem.sigma2_max);
  const bool fb = feasible(b, problem.sigma2_max);
  if (fa != fb) return fa;
  if (fa) return a.objective(problem.placement_objective) < b.objective(problem.placement_objective);
  if (a.max_isd_var != b.max_isd_var) return a.max_isd_var < b.max_isd_var;
  return a.objective(problem.placement_objective) < b.objective(problem.placement_objective);
}

PlacementResult finish(const LayoutEvaluation& best, const PlacementProblem& problem,
                       std::vector<LayoutEvaluation> audit) {
  PlacementResult out;
  out.layout = best.layout;
  out.gain = best.gain;
  out.trace_p = best.trace_p;
  out.trace_isd = best.trace_isd;
  out.max_isd_var = best.max_isd_var;
  out.feasible = feasible(best, problem.sigma2_max);
  out.evaluated_count = static_cast<int>(audit.size());
  out.audit = std::move(audit);
  return out;
}

}  // namespace

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long result = 1;
  for (int i = 1; i <= k; ++i) {
    const long long numerator = n - k + i;
    if (result > std::numeric_limits<long long>::max() / numerator)
      return std::numeric_limits<long long>::max();
    result = result * numerator / i;
  }
  return result;
}

void PlacementProblem::validate() const {
  model.validate();
  const int n = model.stories();
  std::set<int> unique(candidates.begin(), candidates.end());
  if (unique.size() != candidates.size()) throw ValidationError("candidate DOFs must be unique");
  for (int c : candidates) {
    if (c < 1 || c > n) throw ValidationError("candidate DOF outside [1, n]");
  }
  if (sensors < 1 || sensors > static_cast<int>(candidates.size()))
    throw ValidationError("sensor budget must satisfy 1 <= m <= |candidates|");
  // 0 is accepted: the strict constraint is then unsatisfiable and the
  // least-violating layout is reported.
  if (!(sigma2_max >= 0.0)) throw ValidationError("sigma2_max must be non-negative");
}

LayoutEvaluator::LayoutEvaluator(PlacementProblem problem) : problem_(std::move(problem)) {
  problem_.validate();
  mats_ = assemble_matrices(problem_.model);
}

const LayoutEvaluation& LayoutEvaluator::evaluate(const SensorLayout& layout) {
  const std::vector<int> key = sorted_dofs(layout);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;

  SensorLayout canonical{key};
  canonical.validate(problem_.model.stories());
  const GainOptimization opt =
      optimize_gain(mats_, canonical, problem_.noise, problem_.gain_objective, problem_.optimizer);
  const ErrorCovariance cov =
      estimation_covariance(mats_, canonical, opt.gain, problem_.noise, problem_.covariance);

  LayoutEvaluation e;
  e.layout = canonical;
  e.gain = opt.gain;
  e.gain_converged = opt.converged;
  e.trace_p = cov.trace_p();
  e.trace_isd = cov.trace_isd();
  double worst = 0.0;
  for (int k = 0; k < problem_.model.stories(); ++k) {
    double v = cov.isd_variance(k);
    if (problem_.sigma_units == VarianceUnits::drift_ratio) {
      const double h = problem_.model.story_height[static_cast<std::size_t>(k)];
      v /= h * h;
    }
    worst = std::max(worst, v);
  }
  e.max_isd_var = worst;
  return cache_.emplace(key, std::move(e)).first->second;
}

LayoutEvaluation evaluate_layout(const PlacementProblem& problem, const SensorLayout& layout) {
  for (int dof : layout.measured_dofs) {
    if (std::find(problem.candidates.begin(), problem.candidates.end(), dof) == problem.candidates.end())
      throw ValidationError("layout DOF " + std::to_string(dof) + " is not a candidate");
  }
  LayoutEvaluator evaluator(problem);
  return evaluator.evaluate(layout);
}

PlacementResult place_exhaustive(const PlacementProblem& problem) {
  problem.validate();
  const int count = static_cast<int>(problem.candidates.size());
  const long long subsets = binomial(count, problem.sensors);
  if (subsets > problem.enumeration_cap)
    throw ValidationError(std::to_string(subsets) + " layouts exceed the enumeration cap of " +
                          std::to_string(problem.enumeration_cap) + "; use the greedy strategy");

  std::vector<int> candidates = problem.candidates;
  std::sort(candidates.begin(), candidates.end());
  LayoutEvaluator evaluator(problem);

  // Lexicographic enumeration of index combinations.
  std::vector<int> index(static_cast<std::size_t>(problem.sensors));
  for (int i = 0; i < problem.sensors; ++i) index[static_cast<std::size_t>(i)] = i;
  std::vector<LayoutEvaluation> audit;
  std::size_t best = 0;
  while (true) {
    SensorLayout layout;
    for (int i : index) layout.measured_dofs.push_back(candidates[static_cast<std::size_t>(i)]);
    audit.push_back(evaluator.evaluate(layout));
    if (audit.size() > 1 && better(audit.back(), audit[best], problem)) best = audit.size() - 1;

    int pos = problem.sensors - 1;
    while (pos >= 0 && index[static_cast<std::size_t>(pos)] == count - problem.sensors + pos) --pos;
    if (pos < 0) break;
    ++index[static_cast<std::size_t>(pos)];
    for (int i = pos + 1; i < problem.sensors; ++i)
      index[static_cast<std::size_t>(i)] = index[static_cast<std::size_t>(i - 1)] + 1;
  }
  const LayoutEvaluation chosen = audit[best];
  return finish(chosen, problem, std::move(audit));
}

PlacementResult place_greedy(const PlacementProblem& problem) {
  problem.validate();
  std::vector<int> remaining = problem.candidates;
  std::sort(remaining.begin(), remaining.end());
  LayoutEvaluator evaluator(problem);

  std::vector<int> chosen;
  std::vector<LayoutEvaluation> audit;
  std::vector<LayoutEvaluation> path;
  for (int step = 0; step < problem.sensors; ++step) {
    std::size_t best_pos = 0;
    LayoutEvaluation best;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      SensorLayout trial{chosen};
      trial.measured_dofs.push_back(remaining[i]);
      const LayoutEvaluation& e = evaluator.evaluate(trial);
      audit.push_back(e);
      if (i == 0 || e.objective(problem.placement_objective) < best.objective(problem.placement_objective)) {
        best = e;
        best_pos = i;
      }
    }
    chosen.push_back(remaining[best_pos]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_pos));
    path.push_back(best);
  }
  PlacementResult out = finish(path.back(), problem, std::move(audit));
  out.path = std::move(path);
  return out;
}

}  // namespace seismon
