#include <cmath>

#include "lipfm/error.hpp"
#include "lipfm/numerics.hpp"
#include "lipfm/random_features.hpp"

namespace lipfm {

namespace {

void check_grid(const RandomFeatureMap& fm, const std::vector<Eigen::VectorXd>& grid) {
  if (grid.empty()) fail(ErrorKind::kInvalidArgument, "empirical_lipschitz needs a non-empty grid");
  for (const auto& p : grid) {
    if (p.size() != fm.dim()) fail(ErrorKind::kInvalidArgument, "grid point has wrong dimension");
  }
}

// Squared operator norm of the Jacobian at x from its Gram matrix.
double squared_jacobian_norm(const RandomFeatureMap& fm, const Eigen::VectorXd& x) {
  const RowMatrix& w = fm.weights();
  const Eigen::VectorXd& b = fm.biases();
  const Activation& act = fm.activation();
  const Eigen::Index n = w.rows();
  const Eigen::Index d = w.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  if (d == 1) {
    const double x0 = x(0);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double wi = w(i, 0);
      const double s = act.derivative(wi * x0 + b(i)) * wi;
      sum += s * s;
    }
    return sum * inv_n;
  }

  const Eigen::VectorXd pre = w * x + b;
  Eigen::VectorXd s2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = act.derivative(pre(i));
    s2(i) = s * s;
  }
  Eigen::MatrixXd gram(d, d);
  gram.noalias() = w.transpose() * s2.asDiagonal() * w;
  return sym_eig_max(gram * inv_n);
}

EmpiricalLipschitz pick_max(const std::vector<double>& values,
                            const std::vector<Eigen::VectorXd>& grid) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < values.size(); ++j) {
    if (values[j] > values[best]) best = j;
  }
  return {values[best], best, grid[best]};
}

}  // namespace

EmpiricalLipschitz empirical_lipschitz_reference(const RandomFeatureMap& fm,
                                                 const std::vector<Eigen::VectorXd>& grid) {
  check_grid(fm, grid);
  std::vector<double> values(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    values[j] = spectral_norm(fm.jacobian(grid[j]));
  }
  return pick_max(values, grid);
}

EmpiricalLipschitz empirical_lipschitz(const RandomFeatureMap& fm,
                                       const std::vector<Eigen::VectorXd>& grid, bool parallel) {
  check_grid(fm, grid);
  std::vector<double> values(grid.size());
  const auto points = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t j = 0; j < points; ++j) {
    const auto u = static_cast<std::size_t>(j);
    values[u] = std::sqrt(std::max(0.0, squared_jacobian_norm(fm, grid[u])));
  }
  return pick_max(values, grid);
}

}  // namespace lipfm
