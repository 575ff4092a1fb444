#include <cmath>
#include <string>

#include "lipfm/error.hpp"
#include "lipfm/numerics.hpp"

namespace lipfm {

namespace {

double checked(const std::function<double(double)>& g, double x, std::size_t& evals) {
  const double v = g(x);
  ++evals;
  if (std::isnan(v)) {
    fail(ErrorKind::kEvaluationFailure,
         "objective returned NaN at " + std::to_string(x));
  }
  return v;
}

}  // namespace

ScalarMaxResult maximize_scalar(const std::function<double(double)>& g, Interval domain,
                                double tol, std::size_t grid_points) {
  if (!(std::isfinite(domain.lo) && std::isfinite(domain.hi)) || !(domain.lo <= domain.hi)) {
    fail(ErrorKind::kInvalidArgument, "maximize_scalar needs a finite domain lo <= hi");
  }
  if (!(tol > 0.0)) fail(ErrorKind::kInvalidArgument, "maximize_scalar needs tol > 0");
  if (grid_points < 2) grid_points = 2;

  ScalarMaxResult res;
  if (domain.lo == domain.hi) {
    res.argmax = domain.lo;
    res.max_value = checked(g, domain.lo, res.evaluations);
    res.bracket = domain;
    return res;
  }

  const double step = (domain.hi - domain.lo) / static_cast<double>(grid_points - 1);
  auto grid_x = [&](std::size_t i) {
    return i + 1 == grid_points ? domain.hi : domain.lo + step * static_cast<double>(i);
  };

  std::size_t best = 0;
  double best_value = checked(g, grid_x(0), res.evaluations);
  for (std::size_t i = 1; i < grid_points; ++i) {
    const double v = checked(g, grid_x(i), res.evaluations);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }

  // Golden section on the two cells adjacent to the best grid point.
  double a = grid_x(best == 0 ? 0 : best - 1);
  double b = grid_x(best + 1 == grid_points ? best : best + 1);
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = checked(g, c, res.evaluations);
  double fd = checked(g, d, res.evaluations);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = checked(g, c, res.evaluations);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = checked(g, d, res.evaluations);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fmid = checked(g, mid, res.evaluations);

  res.argmax = grid_x(best);
  res.max_value = best_value;
  // The refined point only replaces the grid winner when strictly better.
  if (fmid > res.max_value) {
    res.argmax = mid;
    res.max_value = fmid;
  }
  if (fc > res.max_value) {
    res.argmax = c;
    res.max_value = fc;
  }
  if (fd > res.max_value) {
    res.argmax = d;
    res.max_value = fd;
  }
  res.bracket = {a, b};
  return res;
}

}  // namespace lipfm
