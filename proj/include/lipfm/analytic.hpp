#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "lipfm/kernels.hpp"
#include "lipfm/numerics.hpp"

namespace lipfm {

enum class LipschitzMethod {
  kRadialQuadrature,    // sup_r sqrt(nu(r)) for isotropic Gaussian weights
  kSpectralCovariance,  // sqrt(kappa0 lambda_max(Cov w))
  kHessianFd,           // sqrt(lambda_max(-Hess kappa(0))) by finite differences
  kUpperBound,          // Lip(sigma) sqrt(E||w||^2)
  kDivergent,
};

std::string to_string(LipschitzMethod m);

/// Lipschitz constant of a feature map. `value` is +inf exactly when the
/// method is kDivergent; `argmax_r` is set only for kRadialQuadrature.
struct LipschitzReport {
  double value = 0.0;
  std::optional<double> argmax_r;
  LipschitzMethod method = LipschitzMethod::kDivergent;
  double error_estimate = 0.0;

  bool finite() const { return method != LipschitzMethod::kDivergent; }

  static LipschitzReport divergent() {
    return {std::numeric_limits<double>::infinity(), std::nullopt, LipschitzMethod::kDivergent,
            0.0};
  }
};

/// One CSV row "method,value,argmax_r,error_estimate"; +inf is written "inf".
std::string to_csv_row(const LipschitzReport& report);
inline constexpr const char* kReportCsvHeader = "method,value,argmax_r,error_estimate";

// ---------------------------------------------------------------------------
// Isotropic Gaussian weights: w ~ N(0, gamma^2 I), b ~ p_b
// ---------------------------------------------------------------------------

/// The radial profile nu(r) = E[zeta^2 sigma'(zeta r + b)^2], zeta ~ N(0, gamma^2).
///
/// Holds the configuration once so repeated evaluations over r share it.
/// Activations with kinks split the zeta integral at each kink crossing.
class RadialProfile {
 public:
  RadialProfile(Activation act, double gamma, BiasDistribution bias,
                QuadratureOrders orders = {});

  /// nu(r) through the quadrature doubling ladder.
  LadderResult nu(double r) const;
  /// alpha(a) = E[sigma'(a zeta + b)^2].
  LadderResult alpha(double a) const;
  /// beta(a) = E[(zeta^2 - gamma^2) sigma'(a zeta + b)^2].
  LadderResult beta(double a) const;

  const Activation& activation() const { return act_; }
  double gamma() const { return gamma_; }
  const BiasDistribution& bias() const { return bias_; }

 private:
  LadderResult expect(double r, const std::function<double(double, double)>& weight) const;

  Activation act_;
  double gamma_;
  BiasDistribution bias_;
  QuadratureOrders orders_;
};

double nu_function(const Activation& act, double gamma, const BiasDistribution& bias, double r);

struct RadialOptions {
  /// Search interval for r = ||x||. Empty means [0, 10 gamma (1 + sd(b))].
  std::optional<Interval> r_domain;
  double tol = 1e-8;
  QuadratureOrders orders;
};

Interval default_radial_domain(double gamma, const BiasDistribution& bias);

/// sup over r of sqrt(nu(r)). Rejects configurations outside the theory's
/// hypotheses with hypothesis-violation.
LipschitzReport rnn_lipschitz(const Activation& act, double gamma, const BiasDistribution& bias,
                              const RadialOptions& options = {});

struct VarianceCheck {
  double lhs = 0.0;             // Monte-Carlo E[((w.z) sigma'(w.x + b))^2]
  double lhs_standard_error = 0.0;
  double rhs = 0.0;             // (x.z)^2/||x||^2 beta(||x||) + ||z||^2 gamma^2 alpha(||x||)
};

VarianceCheck variance_decomposition_check(const Activation& act, double gamma,
                                           const BiasDistribution& bias,
                                           const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                                           std::size_t mc_samples, std::uint64_t seed);

/// Lip(sigma) sqrt(trace Cov(w)), valid for any weight law with finite second moment.
LipschitzReport moment_upper_bound(const Activation& act, const WeightDistribution& dist);

// ---------------------------------------------------------------------------
// Shift-invariant kernels
// ---------------------------------------------------------------------------

/// sqrt(kappa0 lambda_max(Cov w)) or +inf when the spectral law has no second moment.
LipschitzReport shift_invariant_lipschitz(const ShiftInvariantKernel& kernel);

/// sqrt(lambda_max(-Hess kappa(0))) by Richardson-extrapolated finite differences.
LipschitzReport hessian_lipschitz_oracle(const ShiftInvariantKernel& kernel, double h = 1e-4);

using KernelFunction = std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

/// sqrt(D_x D_y k(x, x)[z, z]) by a mixed central difference; a lower bound on
/// the feature-map Lipschitz constant at every x.
double diagonal_curvature_oracle(const KernelFunction& k, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& z, double h = 1e-4);

// ---------------------------------------------------------------------------
// Wiener kernel min(x, y) on (0, 1)
// ---------------------------------------------------------------------------

/// sum_{n <= M} lambda_n phi_n'(0)^2, which equals 2M.
double wiener_divergence(std::size_t terms);

/// Truncated Mercer series sum_{n <= M} lambda_n phi_n(x) phi_n(y).
double wiener_kernel_truncated(double x, double y, std::size_t terms);

}  // namespace lipfm
