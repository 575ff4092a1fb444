#include <cmath>

#include "lipfm/error.hpp"
#include "lipfm/numerics.hpp"

namespace lipfm {

Eigen::MatrixXd central_hessian_at_zero(const ScalarField& f, int dim, double h) {
  if (dim < 1) fail(ErrorKind::kInvalidArgument, "dimension must be >= 1");
  if (!(h > 0.0)) fail(ErrorKind::kInvalidArgument, "step must be positive");
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dim);
  const double f0 = f(zero);
  Eigen::MatrixXd hess(dim, dim);
  Eigen::VectorXd e = zero;
  for (int i = 0; i < dim; ++i) {
    e.setZero();
    e(i) = h;
    hess(i, i) = (f(e) - 2.0 * f0 + f(-e)) / (h * h);
    for (int j = i + 1; j < dim; ++j) {
      Eigen::VectorXd pp = zero, pm = zero;
      pp(i) = h;
      pp(j) = h;
      pm(i) = h;
      pm(j) = -h;
      const double v = (f(pp) - f(pm) - f(-pm) + f(-pp)) / (4.0 * h * h);
      hess(i, j) = hess(j, i) = v;
    }
  }
  return hess;
}

HessianEstimate hessian_fd(const ScalarField& f, int dim, double h) {
  const Eigen::MatrixXd coarse = central_hessian_at_zero(f, dim, h);
  const Eigen::MatrixXd fine = central_hessian_at_zero(f, dim, 0.5 * h);
  HessianEstimate out;
  out.hessian = (4.0 * fine - coarse) / 3.0;
  out.hessian = 0.5 * (out.hessian + out.hessian.transpose()).eval();
  out.error_estimate = (fine - coarse).cwiseAbs().maxCoeff() / 3.0;
  return out;
}

}  // namespace lipfm
