#include <cmath>
#include <iomanip>
#include <sstream>

#include "lipfm/analytic.hpp"
#include "lipfm/error.hpp"

namespace lipfm {

std::string to_string(LipschitzMethod m) {
  switch (m) {
    case LipschitzMethod::kRadialQuadrature: return "radial-quadrature";
    case LipschitzMethod::kSpectralCovariance: return "spectral-covariance";
    case LipschitzMethod::kHessianFd: return "hessian-fd";
    case LipschitzMethod::kUpperBound: return "upper-bound";
    case LipschitzMethod::kDivergent: return "divergent";
  }
  return "?";
}

std::string to_csv_row(const LipschitzReport& report) {
  std::ostringstream out;
  out << std::setprecision(17) << to_string(report.method) << ',';
  if (std::isinf(report.value)) {
    out << "inf";
  } else {
    out << report.value;
  }
  out << ',';
  if (report.argmax_r) out << *report.argmax_r;
  out << ',' << report.error_estimate;
  return out.str();
}

LipschitzReport shift_invariant_lipschitz(const ShiftInvariantKernel& kernel) {
  const MomentStatus status = second_moment_status(kernel.spectral());
  if (!status.finite()) return LipschitzReport::divergent();
  LipschitzReport report;
  report.method = LipschitzMethod::kSpectralCovariance;
  report.value = std::sqrt(kernel.kappa0() * sym_eig_max(*status.covariance));
  report.error_estimate = 1e-15 * report.value;
  return report;
}

LipschitzReport hessian_lipschitz_oracle(const ShiftInvariantKernel& kernel, double h) {
  if (!second_moment_status(kernel.spectral()).finite()) {
    fail(ErrorKind::kHypothesisViolation,
         kernel.name() + " kernel: kappa is not twice differentiable at 0 (spectral law has "
                         "no second moment)");
  }
  const HessianEstimate est =
      hessian_fd([&](const Eigen::VectorXd& d) { return kernel.kappa(d); }, kernel.dim(), h);
  LipschitzReport report;
  report.method = LipschitzMethod::kHessianFd;
  report.value = std::sqrt(std::max(0.0, sym_eig_max(-est.hessian)));
  // |delta lambda_max| <= ||delta H||_2 <= dim * max|delta H_ij|.
  const double lambda_err = kernel.dim() * est.error_estimate;
  report.error_estimate =
      report.value > 0.0 ? lambda_err / (2.0 * report.value) : std::sqrt(lambda_err);
  return report;
}

double diagonal_curvature_oracle(const KernelFunction& k, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& z, double h) {
  if (x.size() != z.size()) fail(ErrorKind::kInvalidArgument, "x and z dimensions differ");
  if (std::abs(z.norm() - 1.0) > 1e-10) fail(ErrorKind::kInvalidArgument, "z must be a unit vector");
  if (!(h > 0.0)) fail(ErrorKind::kInvalidArgument, "step must be positive");
  const Eigen::VectorXd p = x + h * z;
  const Eigen::VectorXd m = x - h * z;
  const double mixed = (k(p, p) - k(p, m) - k(m, p) + k(m, m)) / (4.0 * h * h);
  if (mixed < -1e-8) {
    std::ostringstream msg;
    msg << "negative diagonal curvature " << mixed << " (kernel not positive definite?)";
    fail(ErrorKind::kNumericalFailure, msg.str());
  }
  return std::sqrt(std::max(0.0, mixed));
}

}  // namespace lipfm
