#include <algorithm>
#include <cmath>

#include "lipfm/error.hpp"
#include "lipfm/numerics.hpp"

namespace lipfm {

namespace {

constexpr Eigen::Index kJacobiMaxDim = 64;

void check_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    fail(ErrorKind::kInvalidArgument, "expected a non-empty square matrix");
  }
  if (!m.allFinite()) fail(ErrorKind::kInvalidArgument, "matrix has non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    fail(ErrorKind::kInvalidArgument, "matrix is not symmetric within 1e-10");
  }
}

}  // namespace

std::vector<double> jacobi_eigenvalues(const Eigen::MatrixXd& input) {
  check_symmetric(input);
  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  const Eigen::Index n = a.rows();
  const double frob = a.norm();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= 1e-15 * frob) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
      }
    }
  }
  std::vector<double> eig(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

double power_iteration_max(const Eigen::MatrixXd& input) {
  check_symmetric(input);
  const Eigen::MatrixXd m = 0.5 * (input + input.transpose());
  const Eigen::Index n = m.rows();
  // Shift by a Gershgorin bound so the spectrum is non-negative and the
  // dominant eigenvalue is the algebraically largest one.
  double shift = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double radius = m.row(i).cwiseAbs().sum() - std::abs(m(i, i));
    shift = std::max(shift, radius - m(i, i));
  }
  const Eigen::MatrixXd shifted = m + shift * Eigen::MatrixXd::Identity(n, n);

  Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
  double rayleigh = v.dot(shifted * v);
  for (int it = 0; it < 10000; ++it) {
    Eigen::VectorXd next = shifted * v;
    const double norm = next.norm();
    if (norm == 0.0) return -shift;
    v = next / norm;
    const double r = v.dot(shifted * v);
    if (std::abs(r - rayleigh) < 1e-12 * std::max(1.0, std::abs(r))) {
      rayleigh = r;
      break;
    }
    rayleigh = r;
  }
  return rayleigh - shift;
}

double sym_eig_max(const Eigen::MatrixXd& m) {
  if (m.rows() == 1 && m.cols() == 1) {
    if (!std::isfinite(m(0, 0))) fail(ErrorKind::kInvalidArgument, "non-finite entry");
    return m(0, 0);
  }
  if (m.rows() <= kJacobiMaxDim) return jacobi_eigenvalues(m).back();
  return power_iteration_max(m);
}

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) fail(ErrorKind::kInvalidArgument, "spectral_norm of an empty matrix");
  if (!m.allFinite()) fail(ErrorKind::kInvalidArgument, "spectral_norm: non-finite entries");
  // Gram on the smaller side.
  const Eigen::MatrixXd gram =
      m.cols() <= m.rows() ? Eigen::MatrixXd(m.transpose() * m) : Eigen::MatrixXd(m * m.transpose());
  return std::sqrt(std::max(0.0, sym_eig_max(gram)));
}

}  // namespace lipfm
