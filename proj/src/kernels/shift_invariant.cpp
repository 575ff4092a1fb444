#include <cmath>

#include "lipfm/error.hpp"
#include "lipfm/kernels.hpp"

namespace lipfm {

double matern_profile(double nu, double z) {
  if (z < 1e-8) return 1.0;
  const double v = std::pow(2.0, 1.0 - nu) / std::tgamma(nu) * std::pow(z, nu) *
                   std::cyl_bessel_k(nu, z);
  return std::isfinite(v) ? v : 0.0;
}

ShiftInvariantKernel ShiftInvariantKernel::gaussian(Eigen::MatrixXd sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
    fail(ErrorKind::kInvalidArgument, "gaussian kernel needs a square sigma");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::kInvalidArgument, "gaussian kernel sigma must be positive definite");
  }
  return ShiftInvariantKernel(GaussianKernel{std::move(sigma)});
}

ShiftInvariantKernel ShiftInvariantKernel::gaussian_isotropic(double gamma, int dim) {
  if (!(gamma > 0.0) || dim < 1) {
    fail(ErrorKind::kInvalidArgument, "gaussian kernel needs gamma > 0 and dim >= 1");
  }
  return gaussian(gamma * gamma * Eigen::MatrixXd::Identity(dim, dim));
}

ShiftInvariantKernel ShiftInvariantKernel::matern(double nu, Eigen::MatrixXd sigma) {
  if (!(nu > 0.0)) fail(ErrorKind::kInvalidArgument, "matern kernel needs nu > 0");
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
    fail(ErrorKind::kInvalidArgument, "matern kernel needs a square sigma");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::kInvalidArgument, "matern kernel sigma must be positive definite");
  }
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols()));
  inv = 0.5 * (inv + inv.transpose()).eval();
  return ShiftInvariantKernel(MaternKernel{nu, std::move(sigma), std::move(inv)});
}

ShiftInvariantKernel ShiftInvariantKernel::laplace(int dim) {
  if (dim < 1) fail(ErrorKind::kInvalidArgument, "laplace kernel needs dim >= 1");
  return ShiftInvariantKernel(LaplaceKernel{dim});
}

int ShiftInvariantKernel::dim() const {
  struct {
    int operator()(const GaussianKernel& k) const { return static_cast<int>(k.sigma.rows()); }
    int operator()(const MaternKernel& k) const { return static_cast<int>(k.sigma.rows()); }
    int operator()(const LaplaceKernel& k) const { return k.dim; }
  } visitor;
  return std::visit(visitor, family_);
}

std::string ShiftInvariantKernel::name() const {
  struct {
    std::string operator()(const GaussianKernel&) const { return "gaussian"; }
    std::string operator()(const MaternKernel&) const { return "matern"; }
    std::string operator()(const LaplaceKernel&) const { return "laplace"; }
  } visitor;
  return std::visit(visitor, family_);
}

double ShiftInvariantKernel::kappa(const Eigen::VectorXd& delta) const {
  if (delta.size() != dim()) {
    fail(ErrorKind::kInvalidArgument,
         "kernel of dimension " + std::to_string(dim()) + " evaluated at a vector of size " +
             std::to_string(delta.size()));
  }
  struct {
    const Eigen::VectorXd& d;
    double operator()(const GaussianKernel& k) const {
      return std::exp(-0.5 * d.dot(k.sigma * d));
    }
    double operator()(const MaternKernel& k) const {
      // Standard convention: z = sqrt(2 nu D^T sigma^-1 D), consistent with
      // the spectral law t_{2 nu}(0, sigma^-1).
      const double q = std::max(0.0, d.dot(k.sigma_inv * d));
      return matern_profile(k.nu, std::sqrt(2.0 * k.nu * q));
    }
    double operator()(const LaplaceKernel&) const { return std::exp(-d.norm()); }
  } visitor{delta};
  return std::visit(visitor, family_);
}

WeightDistribution ShiftInvariantKernel::spectral() const {
  struct {
    WeightDistribution operator()(const GaussianKernel& k) const {
      return WeightDistribution::gaussian_cov(k.sigma);
    }
    WeightDistribution operator()(const MaternKernel& k) const {
      return WeightDistribution::student_t(k.nu, k.sigma_inv);
    }
    WeightDistribution operator()(const LaplaceKernel& k) const {
      return WeightDistribution::cauchy(k.dim);
    }
  } visitor;
  return std::visit(visitor, family_);
}

}  // namespace lipfm
