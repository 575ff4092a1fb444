#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "lipfm/error.hpp"
#include "lipfm/kernels.hpp"
#include "lipfm/numerics.hpp"

using namespace lipfm;

namespace {

constexpr double kPi = std::numbers::pi;

// Integral of |t|^k exp(-t^2) over the real line.
double hermite_abs_moment(int k) { return std::tgamma((k + 1) / 2.0); }

Eigen::MatrixXd random_matrix(std::mt19937_64& gen, int rows, int cols) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = nd(gen);
  return m;
}

Eigen::MatrixXd random_orthogonal(std::mt19937_64& gen, int d) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(gen, d, d));
  return qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
}

}  // namespace

TEST_CASE("gauss_hermite small rules") {
  const auto r1 = gauss_hermite(1);
  REQUIRE(r1.size() == 1);
  CHECK(r1.nodes[0] == 0.0);
  CHECK(r1.weights[0] == doctest::Approx(std::sqrt(kPi)).epsilon(1e-14));

  const auto r2 = gauss_hermite(2);
  REQUIRE(r2.size() == 2);
  CHECK(r2.nodes[0] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(r2.nodes[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(r2.weights[0] == doctest::Approx(std::sqrt(kPi) / 2).epsilon(1e-14));
  CHECK(r2.weights[1] == doctest::Approx(std::sqrt(kPi) / 2).epsilon(1e-14));
  CHECK(r2.integrate([](double t) { return t * t; }) ==
        doctest::Approx(std::sqrt(kPi) / 2).epsilon(1e-14));
}

TEST_CASE("gauss_legendre small rules") {
  const auto r1 = gauss_legendre(1, -1, 1);
  CHECK(r1.nodes[0] == 0.0);
  CHECK(r1.weights[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(gauss_legendre(2, -1, 1).integrate([](double t) { return t * t; }) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  for (int n : {1, 5, 17, 64}) {
    CHECK(gauss_legendre(n, 0, 2 * kPi).integrate([](double) { return 1.0; }) ==
          doctest::Approx(2 * kPi).epsilon(1e-13));
  }
}

TEST_CASE("quadrature argument checks") {
  CHECK_THROWS_AS(gauss_hermite(0), Error);
  CHECK_THROWS_AS(gauss_hermite(kMaxQuadratureOrder + 1), Error);
  CHECK_THROWS_AS(gauss_legendre(4, 1.0, 1.0), Error);
  CHECK_THROWS_AS(gauss_legendre(4, 2.0, 1.0), Error);
  try {
    gauss_legendre(4, 2.0, 1.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidArgument);
  }
}

TEST_CASE("quadrature exactness up to degree 2n-1") {
  for (int n = 1; n <= 32; ++n) {
    const auto h = gauss_hermite(n);
    const auto l = gauss_legendre(n, -0.5, 2.0);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      const double hq = h.integrate([k](double t) { return std::pow(t, k); });
      const double hx = k % 2 ? 0.0 : hermite_abs_moment(k);
      CHECK(std::abs(hq - hx) <= 1e-10 * hermite_abs_moment(k));
      const double lq = l.integrate([k](double t) { return std::pow(t, k); });
      const double lx = (std::pow(2.0, k + 1) - std::pow(-0.5, k + 1)) / (k + 1);
      const double labs = (std::pow(2.0, k + 1) + std::pow(0.5, k + 1)) / (k + 1);
      CHECK(std::abs(lq - lx) <= 1e-10 * labs);
    }
  }
}

TEST_CASE("rules are ordered with positive weights at every order") {
  for (int n = 1; n <= kMaxQuadratureOrder; ++n) {
    for (const auto& r : {gauss_hermite(n), gauss_legendre(n, -1, 1)}) {
      REQUIRE(r.size() == static_cast<std::size_t>(n));
      for (std::size_t i = 0; i < r.size(); ++i) {
        REQUIRE(r.weights[i] > 0.0);
        if (i > 0) REQUIRE(r.nodes[i] > r.nodes[i - 1]);
      }
    }
    const auto h = gauss_hermite(n);
    CHECK(h.integrate([](double) { return 1.0; }) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
    if (n >= 2) {
      CHECK(h.integrate([](double t) { return t * t; }) ==
            doctest::Approx(std::sqrt(kPi) / 2).epsilon(1e-12));
    }
  }
}

TEST_CASE("expectation_2d normalization and moments") {
  const std::vector<BiasDistribution> biases = {BiasDistribution::uniform_phase(),
                                                BiasDistribution::uniform(-1, 3),
                                                BiasDistribution::gaussian(0.7),
                                                BiasDistribution::point_mass()};
  for (const auto& b : biases) {
    CHECK(std::abs(expectation_2d([](double, double) { return 1.0; }, 1.3, b, {}) - 1.0) < 1e-12);
    CHECK(std::abs(expectation_2d([](double z, double) { return z * z; }, 1.0, b, {}) - 1.0) <
          1e-10);
  }
  CHECK(expectation_2d([](double, double c) { return c * c; }, 1.0, BiasDistribution::gaussian(0.7),
                       {}) == doctest::Approx(0.49).epsilon(1e-12));
  CHECK(expectation_2d([](double, double c) { return c; }, 1.0, BiasDistribution::uniform(-1, 3),
                       {}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(expectation_2d([](double, double) { return 1.0; }, 1.0,
                                 BiasDistribution::point_mass(), {4, 64}),
                  Error);
}

TEST_CASE("expectation_2d of 2 zeta^2 sin^2(r zeta + b) with uniform phase is one") {
  for (double r : {0.0, 0.3, 1.0, 2.5, 7.0}) {
    const double v = expectation_2d(
        [r](double z, double b) {
          const double s = std::sin(r * z + b);
          return 2.0 * z * z * s * s;
        },
        1.0, BiasDistribution::uniform_phase(), {});
    CHECK(std::abs(v - 1.0) < 1e-6);
  }
}

TEST_CASE("expectation_2d is linear and monotone") {
  const auto b = BiasDistribution::gaussian(1.0);
  auto f = [](double z, double c) { return std::exp(-z * z) * std::cos(c); };
  auto g = [](double z, double c) { return z * z * std::tanh(c) * std::tanh(c); };
  const double ef = expectation_2d(f, 0.8, b, {32, 32});
  const double eg = expectation_2d(g, 0.8, b, {32, 32});
  const double combo =
      expectation_2d([&](double z, double c) { return 2.5 * f(z, c) - 1.5 * g(z, c); }, 0.8, b,
                     {32, 32});
  CHECK(std::abs(combo - (2.5 * ef - 1.5 * eg)) < 1e-13);
  const double bigger = expectation_2d(
      [&](double z, double c) { return f(z, c) + 0.01 * (1 + z * z); }, 0.8, b, {32, 32});
  CHECK(bigger >= ef);
}

TEST_CASE("adaptive ladder converges and reports the last doubling gap") {
  auto f = [](double z, double c) { return std::cos(3 * z + c) * std::cos(3 * z + c); };
  const auto res = expectation_2d_adaptive(f, 1.0, BiasDistribution::gaussian(1.0), {8, 8});
  // E cos^2(3 zeta + b) = (1 + E cos(6 zeta + 2b)) / 2 = (1 + exp(-18) exp(-2)) / 2.
  CHECK(std::abs(res.value - 0.5 * (1.0 + std::exp(-20.0))) < 1e-10);
  CHECK(res.error_estimate < 1e-8);
  CHECK(res.orders.zeta > 8);
}

TEST_CASE("kink splitting integrates a step exactly") {
  // E[1{zeta > -b}] for b ~ N(0,1), zeta ~ N(0,1) is 1/2.
  auto f = [](double z, double c) { return z + c > 0.0 ? 1.0 : 0.0; };
  ZetaBreaks breaks = [](double c, std::vector<double>& out) { out.push_back(-c); };
  const double v = expectation_2d(f, 1.0, BiasDistribution::gaussian(1.0), {64, 64}, breaks);
  CHECK(std::abs(v - 0.5) < 1e-12);
  const double unsplit = expectation_2d(f, 1.0, BiasDistribution::gaussian(1.0), {64, 64});
  CHECK(std::abs(unsplit - 0.5) > std::abs(v - 0.5));
}

TEST_CASE("maximize_scalar examples") {
  auto a = maximize_scalar([](double r) { return -(r - 1) * (r - 1); }, {0, 10}, 1e-10);
  CHECK(std::abs(a.argmax - 1.0) < 1e-8);
  CHECK(std::abs(a.max_value) < 1e-15);

  auto c = maximize_scalar([](double) { return 3.0; }, {-2, 5}, 1e-8);
  CHECK(c.max_value == 3.0);
  CHECK(c.argmax == -2.0);

  auto e = maximize_scalar([](double r) { return r * std::exp(-r); }, {0, 10}, 1e-10);
  CHECK(std::abs(e.argmax - 1.0) < 1e-6);
  CHECK(std::abs(e.max_value - std::exp(-1.0)) < 1e-14);
  CHECK(e.evaluations >= 512);
}

TEST_CASE("maximize_scalar result properties") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 30; ++t) {
    const double p = u(gen), q = u(gen), s = u(gen);
    auto g = [&](double r) { return std::sin(p * r) + q * std::cos(r) + s * r; };
    const Interval dom{-1.0, 4.0};
    const auto res = maximize_scalar(g, dom, 1e-9);
    CHECK(res.argmax >= dom.lo);
    CHECK(res.argmax <= dom.hi);
    CHECK(res.max_value >= g(dom.lo));
    CHECK(res.max_value >= g(dom.hi));
    CHECK(res.max_value == g(res.argmax));
  }
}

TEST_CASE("maximize_scalar rejects NaN and bad domains") {
  try {
    maximize_scalar([](double r) { return r > 2 ? std::nan("") : r; }, {0, 5}, 1e-8);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kEvaluationFailure);
  }
  CHECK_THROWS_AS(maximize_scalar([](double r) { return r; }, {2, 1}, 1e-8), Error);
  CHECK_THROWS_AS(maximize_scalar([](double r) { return r; }, {0, INFINITY}, 1e-8), Error);
  const auto point = maximize_scalar([](double r) { return r * r; }, {1.5, 1.5}, 1e-8);
  CHECK(point.argmax == 1.5);
  CHECK(point.max_value == 2.25);
  CHECK_THROWS_AS(maximize_scalar([](double r) { return r; }, {0, 1}, 0.0), Error);
}

TEST_CASE("sym_eig_max examples") {
  CHECK(sym_eig_max(Eigen::MatrixXd::Identity(2, 2)) == doctest::Approx(1.0).epsilon(1e-14));
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 1;
  d(1, 1) = 4;
  CHECK(sym_eig_max(d) == doctest::Approx(4.0).epsilon(1e-14));
  Eigen::MatrixXd m(2, 2);
  m << 2, 1, 1, 2;
  CHECK(sym_eig_max(m) == doctest::Approx(3.0).epsilon(1e-14));
  Eigen::MatrixXd bad(2, 2);
  bad << 2, 1, 0, 2;
  try {
    sym_eig_max(bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidArgument);
  }
}

TEST_CASE("sym_eig_max of Q D Q^T recovers max D") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int d : {1, 2, 3, 8, 33, 64, 65, 80, 120}) {
    for (int trial = 0; trial < 3; ++trial) {
      Eigen::VectorXd diag(d);
      for (int k = 0; k < d; ++k) diag(k) = u(gen);
      diag(trial % d) = 2.0 + trial;  // separated top eigenvalue
      const Eigen::MatrixXd q = random_orthogonal(gen, d);
      Eigen::MatrixXd m = q * diag.asDiagonal() * q.transpose();
      m = 0.5 * (m + m.transpose());
      CHECK(std::abs(sym_eig_max(m) - diag.maxCoeff()) <= 1e-8 * diag.maxCoeff());
    }
  }
}

TEST_CASE("jacobi and power iteration agree with Eigen's solver") {
  std::mt19937_64 gen(23);
  for (int d : {2, 5, 16, 40}) {
    const Eigen::MatrixXd a = random_matrix(gen, d, d);
    const Eigen::MatrixXd m = a + a.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const auto ours = jacobi_eigenvalues(m);
    REQUIRE(ours.size() == static_cast<std::size_t>(d));
    const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    for (int k = 0; k < d; ++k) CHECK(std::abs(ours[k] - es.eigenvalues()(k)) <= 1e-10 * scale);
  }
  for (int d : {70, 100}) {
    const Eigen::MatrixXd a = random_matrix(gen, d, 3);
    const Eigen::MatrixXd m = a * a.transpose();  // rank 3, clear gap to zero
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues()(d - 1);
    CHECK(std::abs(power_iteration_max(m) - top) <= 1e-10 * top);
    CHECK(std::abs(sym_eig_max(m) - top) <= 1e-10 * top);
  }
}

TEST_CASE("power iteration handles indefinite matrices") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m(0, 0) = -5;
  m(1, 1) = 1;
  m(2, 2) = 0.5;
  CHECK(power_iteration_max(m) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("spectral_norm examples") {
  CHECK(spectral_norm(Eigen::MatrixXd::Identity(4, 4)) == doctest::Approx(1.0).epsilon(1e-14));
  Eigen::MatrixXd v(3, 1);
  v << 3, -4, 12;
  CHECK(spectral_norm(v) == doctest::Approx(13.0).epsilon(1e-14));

  std::mt19937_64 gen(29);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd m = random_matrix(gen, 3, 2);
    const Eigen::Matrix2d g = m.transpose() * m;
    const double tr = g.trace(), det = g.determinant();
    const double lmax = 0.5 * (tr + std::sqrt(tr * tr - 4 * det));
    CHECK(std::abs(spectral_norm(m) - std::sqrt(lmax)) <= 1e-8 * std::sqrt(lmax));
    CHECK(std::abs(spectral_norm(-2.5 * m) - 2.5 * spectral_norm(m)) <= 1e-10 * spectral_norm(m));
    CHECK(spectral_norm(m.transpose()) == doctest::Approx(spectral_norm(m)).epsilon(1e-12));
  }
  Eigen::MatrixXd nan = Eigen::MatrixXd::Zero(2, 2);
  nan(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(spectral_norm(nan), Error);
}

TEST_CASE("hessian_fd on exact quadratics") {
  const auto est = hessian_fd([](const Eigen::VectorXd& d) { return -d.squaredNorm(); }, 2);
  CHECK((est.hessian + 2.0 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-6);

  std::mt19937_64 gen(31);
  for (int d : {1, 3, 5}) {
    const Eigen::MatrixXd b = random_matrix(gen, d, d);
    const Eigen::MatrixXd a = b * b.transpose();
    const double h = 1e-4;
    const auto q = hessian_fd([&](const Eigen::VectorXd& x) { return -0.5 * x.dot(a * x); }, d, h);
    CHECK((q.hessian + a).cwiseAbs().maxCoeff() <= 10 * h * a.cwiseAbs().maxCoeff());
    CHECK(q.hessian.isApprox(q.hessian.transpose(), 0.0));
  }
}

TEST_CASE("hessian_fd on catalogue kernels at the origin") {
  const auto g = ShiftInvariantKernel::gaussian_isotropic(1.0, 2);
  const auto hg = hessian_fd([&](const Eigen::VectorXd& d) { return g.kappa(d); }, 2);
  CHECK((hg.hessian + Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-4);

  const auto m = ShiftInvariantKernel::matern(2.0, Eigen::MatrixXd::Identity(2, 2));
  const auto hm = hessian_fd([&](const Eigen::VectorXd& d) { return m.kappa(d); }, 2);
  CHECK((hm.hessian + 2.0 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-3);
}
