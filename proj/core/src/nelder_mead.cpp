#include "seismon/nelder_mead.hpp"

#include "seismon/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace seismon {

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          std::vector<Eigen::VectorXd> simplex, const Eigen::VectorXd& lower,
                          const Eigen::VectorXd& upper, const SimplexSettings& settings) {
  const auto dim = static_cast<std::size_t>(lower.size());
  if (dim == 0 || upper.size() != lower.size() || simplex.size() != dim + 1)
    throw ValidationError("simplex needs n+1 vertices matching the bound dimension");

  SimplexResult result;
  auto project = [&](Eigen::VectorXd x) { return x.cwiseMax(lower).cwiseMin(upper); };
  auto evaluate = [&](const Eigen::VectorXd& x) {
    ++result.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) {
    simplex[i] = project(simplex[i]);
    values[i] = evaluate(simplex[i]);
    if (!std::isfinite(values[i]))
      throw ValidationError("objective is not finite at the initial simplex");
  }

  std::vector<std::size_t> order(dim + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Eigen::VectorXd> s(dim + 1);
    std::vector<double> v(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) {
      s[i] = simplex[order[i]];
      v[i] = values[order[i]];
    }
    simplex.swap(s);
    values.swap(v);
  };

  sort_simplex();
  while (true) {
    double fspread = 0.0, xspread = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      fspread = std::max(fspread, std::abs(values[i] - values[0]));
      xspread = std::max(xspread, (simplex[i] - simplex[0]).cwiseAbs().maxCoeff());
    }
    const double fscale = std::max(std::abs(values[0]), 1e-300);
    if (fspread <= settings.objective_tolerance * fscale && xspread <= settings.parameter_tolerance) {
      result.converged = true;
      break;
    }
    if (result.iterations >= settings.max_iterations) break;
    ++result.iterations;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) centroid += simplex[i];
    centroid /= static_cast<double>(dim);
    const Eigen::VectorXd& worst = simplex[dim];

    const Eigen::VectorXd reflected = project(centroid + (centroid - worst));
    const double f_reflected = evaluate(reflected);

    if (f_reflected < values[0]) {
      const Eigen::VectorXd expanded = project(centroid + 2.0 * (centroid - worst));
      const double f_expanded = evaluate(expanded);
      if (f_expanded < f_reflected) {
        simplex[dim] = expanded;
        values[dim] = f_expanded;
      } else {
        simplex[dim] = reflected;
        values[dim] = f_reflected;
      }
    } else if (f_reflected < values[dim - 1]) {
      simplex[dim] = reflected;
      values[dim] = f_reflected;
    } else {
      const bool outside = f_reflected < values[dim];
      const Eigen::VectorXd contracted =
          outside ? Eigen::VectorXd(project(centroid + 0.5 * (reflected - centroid)))
                  : Eigen::VectorXd(project(centroid + 0.5 * (worst - centroid)));
      const double f_contracted = evaluate(contracted);
      if (f_contracted < std::min(f_reflected, values[dim])) {
        simplex[dim] = contracted;
        values[dim] = f_contracted;
      } else {
        for (std::size_t i = 1; i <= dim; ++i) {
          simplex[i] = project(simplex[0] + 0.5 * (simplex[i] - simplex[0]));
          values[i] = evaluate(simplex[i]);
        }
      }
    }
    sort_simplex();
  }

  result.x = simplex[0];
  result.value = values[0];
  return result;
}

}  // namespace seismon
