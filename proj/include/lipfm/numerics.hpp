#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace lipfm {

class BiasDistribution;

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

enum class MeasureTag { kGaussHermite, kGaussLegendre };

/// Nodes strictly increasing, weights positive.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  MeasureTag tag = MeasureTag::kGaussHermite;
  double a = 0.0;  // Legendre interval; unused for Hermite
  double b = 0.0;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

inline constexpr int kMaxQuadratureOrder = 256;

/// Gauss-Hermite rule against exp(-t^2) on the real line, 1 <= n <= 256.
QuadratureRule gauss_hermite(int n);

/// Gauss-Legendre rule against the unit weight on [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

struct QuadratureOrders {
  int zeta = 64;
  int bias = 64;
  friend bool operator==(const QuadratureOrders&, const QuadratureOrders&) = default;
};

/// Breakpoints of the zeta-integrand for a given bias value. When supplied, the
/// zeta integral runs over the truncated Gaussian support [-10 gamma, 10 gamma]
/// split at the returned points, each piece by a mapped Legendre rule.
using ZetaBreaks = std::function<void(double bias_value, std::vector<double>& breaks)>;

using Integrand2D = std::function<double(double zeta, double bias_value)>;

/// E[f(zeta, b)] for zeta ~ N(0, gamma^2) independent of b ~ bias, by
/// tensor-product quadrature at fixed orders.
double expectation_2d(const Integrand2D& f, double gamma, const BiasDistribution& bias,
                      QuadratureOrders orders, const ZetaBreaks& breaks = {});

struct LadderResult {
  double value = 0.0;
  double error_estimate = 0.0;  // |I(order) - I(order/2)|
  QuadratureOrders orders;      // finest orders used
};

/// Doubles both orders from `start` until successive results differ by less
/// than `rel_tol` (relative to max(1, |I|)) or the order cap is hit.
LadderResult expectation_2d_adaptive(const Integrand2D& f, double gamma,
                                     const BiasDistribution& bias,
                                     QuadratureOrders start = {},
                                     const ZetaBreaks& breaks = {},
                                     double rel_tol = 1e-8);

// ---------------------------------------------------------------------------
// Scalar maximization
// ---------------------------------------------------------------------------

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct ScalarMaxResult {
  double argmax = 0.0;
  double max_value = 0.0;
  std::size_t evaluations = 0;
  Interval bracket;
};

/// Grid scan followed by golden-section refinement around the best cell.
/// Ties resolve to the smallest grid point. NaN from g raises evaluation-failure.
ScalarMaxResult maximize_scalar(const std::function<double(double)>& g, Interval domain,
                                double tol, std::size_t grid_points = 512);

// ---------------------------------------------------------------------------
// Symmetric eigenvalues and spectral norms
// ---------------------------------------------------------------------------

/// All eigenvalues of a symmetric matrix by cyclic Jacobi, ascending.
std::vector<double> jacobi_eigenvalues(const Eigen::MatrixXd& m);

/// Largest eigenvalue by power iteration on the Gershgorin-shifted matrix.
double power_iteration_max(const Eigen::MatrixXd& m);

/// Largest eigenvalue; Jacobi for d <= 64, power iteration above.
double sym_eig_max(const Eigen::MatrixXd& m);

/// Largest singular value.
double spectral_norm(const Eigen::MatrixXd& m);

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

using ScalarField = std::function<double(const Eigen::VectorXd&)>;

struct HessianEstimate {
  Eigen::MatrixXd hessian;
  double error_estimate = 0.0;  // max-entry change between h and h/2
};

/// Central second differences of f at 0 with step h (no extrapolation).
Eigen::MatrixXd central_hessian_at_zero(const ScalarField& f, int dim, double h);

/// Richardson extrapolation of central_hessian_at_zero from steps h and h/2.
HessianEstimate hessian_fd(const ScalarField& f, int dim, double h = 1e-4);

}  // namespace lipfm
