#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "lipfm/error.hpp"
#include "lipfm/kernels.hpp"
#include "lipfm/monte_carlo.hpp"
#include "lipfm/numerics.hpp"
#include "lipfm/rng.hpp"

using namespace lipfm;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an lipfm::Error");
  return ErrorKind::kUsage;
}

Eigen::MatrixXd diag2(double a, double b) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd second;  // E[w w^T]
};

Moments sample_moments(const WeightDistribution& dist, std::size_t n, std::uint64_t seed) {
  const WeightSample s = sample_weights(dist, BiasDistribution::point_mass(), n, seed);
  Moments m;
  m.mean = s.weights.colwise().mean().transpose();
  m.second = s.weights.transpose() * s.weights / static_cast<double>(n);
  return m;
}

}  // namespace

TEST_CASE("activation catalogue values") {
  const auto cosine = Activation::scaled_cosine(1.0);
  CHECK(cosine.value(0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(cosine.lipschitz_bound() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(Activation::scaled_cosine(4.5).scale() == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(Activation::relu().value(-2.0) == 0.0);
  CHECK(Activation::relu().value(2.0) == 2.0);
  CHECK(Activation::relu().derivative(0.0) == 0.0);
  CHECK(Activation::relu().kinks() == std::vector<double>{0.0});
  CHECK(Activation::tanh().kinks().empty());
  CHECK_FALSE(Activation::relu().differentiable_everywhere());
  CHECK(Activation::identity().derivative(7.0) == 1.0);
  CHECK(Activation::from_name("cos") == Activation::scaled_cosine(1.0));
  CHECK(Activation::from_name("relu") == Activation::relu());
  CHECK(kind_of([] { Activation::from_name("sigmoid"); }) == ErrorKind::kInvalidConfiguration);
  CHECK(kind_of([] { Activation::scaled_cosine(0.0); }) == ErrorKind::kInvalidArgument);
}

TEST_CASE("activation Lipschitz bound and derivative") {
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> u(-6, 6);
  const double h = 1e-5;
  for (const auto& act : {Activation::identity(), Activation::relu(), Activation::tanh(),
                          Activation::scaled_cosine(1.0), Activation::scaled_cosine(2.0)}) {
    for (int t = 0; t < 2000; ++t) {
      const double a = u(gen), b = u(gen);
      CHECK(std::abs(act.value(a) - act.value(b)) <=
            act.lipschitz_bound() * std::abs(a - b) * (1 + 1e-12) + 1e-15);
      bool near_kink = false;
      for (double k : act.kinks()) near_kink |= std::abs(a - k) <= h;
      const double fd = (act.value(a + h) - act.value(a - h)) / (2 * h);
      CHECK(std::abs(act.derivative(a) - fd) <= 1e-6 + (near_kink ? act.lipschitz_bound() : 0.0));
    }
  }
}

TEST_CASE("bias laws") {
  const auto phase = BiasDistribution::uniform_phase();
  CHECK(phase.lower() == 0.0);
  CHECK(phase.upper() == doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK(phase.stddev() == doctest::Approx(2 * kPi / std::sqrt(12.0)).epsilon(1e-14));
  const auto leg = gauss_legendre(64, 0.0, 2 * kPi);
  for (double theta : {0.0, 0.4, 1.0, 2.2, 5.9}) {
    const double m = leg.integrate([theta](double b) {
      const double s = std::sin(theta + b);
      return s * s;
    }) / (2 * kPi);
    CHECK(std::abs(m - 0.5) < 1e-14);
  }
  CHECK(BiasDistribution::parse("uniform:0:6.283185307179586") == phase);
  CHECK(BiasDistribution::parse("gaussian:1.5") == BiasDistribution::gaussian(1.5));
  CHECK(BiasDistribution::parse("point:0") == BiasDistribution::point_mass());
  CHECK(BiasDistribution::parse(BiasDistribution::gaussian(0.3).to_string()) ==
        BiasDistribution::gaussian(0.3));
  CHECK(BiasDistribution::parse(phase.to_string()) == phase);
  CHECK_FALSE(BiasDistribution::point_mass().absolutely_continuous());
  CHECK(kind_of([] { BiasDistribution::parse("gamma:2"); }) == ErrorKind::kInvalidConfiguration);
  CHECK(kind_of([] { BiasDistribution::parse("gaussian:x"); }) ==
        ErrorKind::kInvalidConfiguration);
  CHECK(kind_of([] { BiasDistribution::parse("uniform:3:1"); }) == ErrorKind::kInvalidArgument);
  CHECK(kind_of([] { BiasDistribution::parse("point:1"); }) ==
        ErrorKind::kUnsupportedDistribution);
}

TEST_CASE("bias samplers match their laws") {
  const std::size_t n = 200000;
  for (const auto& b : {BiasDistribution::uniform(-1, 3), BiasDistribution::gaussian(0.5)}) {
    const auto est = monte_carlo_mean(n, 12, [&](CounterStream& s) { return b.sample(s); });
    const double mean = b.family() == BiasFamily::kUniform ? 1.0 : 0.0;
    CHECK(std::abs(est.mean - mean) < 4.0 * b.stddev() / std::sqrt(double(n)));
  }
  CounterStream s(1, 1);
  CHECK(BiasDistribution::point_mass().sample(s) == 0.0);
}

TEST_CASE("second moment status") {
  const auto g = second_moment_status(WeightDistribution::gaussian_cov(diag2(1, 4)));
  REQUIRE(g.finite());
  CHECK(g.covariance->isApprox(diag2(1, 4)));
  const auto iso = second_moment_status(WeightDistribution::isotropic_gaussian(1.5, 3));
  REQUIRE(iso.finite());
  CHECK(iso.covariance->isApprox(2.25 * Eigen::MatrixXd::Identity(3, 3)));
  const auto t2 = second_moment_status(WeightDistribution::student_t(2.0, diag2(1, 1)));
  REQUIRE(t2.finite());
  CHECK(t2.covariance->isApprox(2.0 * Eigen::MatrixXd::Identity(2, 2)));
  CHECK_FALSE(second_moment_status(WeightDistribution::student_t(1.0, diag2(1, 1))).finite());
  CHECK_FALSE(second_moment_status(WeightDistribution::student_t(0.5, diag2(1, 1))).finite());
  CHECK_FALSE(second_moment_status(WeightDistribution::cauchy(3)).finite());
  CHECK_FALSE(second_moment_status(WeightDistribution::discrete_spectrum(10)).finite());
}

TEST_CASE("weight samplers: determinism and prefixes") {
  const auto dist = WeightDistribution::student_t(2.0, diag2(1, 2));
  const auto bias = BiasDistribution::uniform_phase();
  const auto a = sample_weights(dist, bias, 500, 77);
  const auto b = sample_weights(dist, bias, 500, 77);
  CHECK(a.weights == b.weights);
  CHECK(a.biases == b.biases);
  const auto small = sample_weights(dist, bias, 123, 77);
  CHECK(small.weights == a.weights.topRows(123));
  CHECK(small.biases == a.biases.head(123));
  const auto other = sample_weights(dist, bias, 500, 78);
  CHECK(other.weights != a.weights);
  CHECK(kind_of([&] { sample_weights(WeightDistribution::discrete_spectrum(5), bias, 3, 1); }) ==
        ErrorKind::kUnsupportedDistribution);
  CHECK(kind_of([&] { sample_weights(dist, bias, 0, 1); }) == ErrorKind::kInvalidArgument);
}

TEST_CASE("weight sampler moments at one million draws") {
  const std::size_t n = 1000000;
  SUBCASE("isotropic gaussian gamma 2, d 3") {
    const auto m = sample_moments(WeightDistribution::isotropic_gaussian(2.0, 3), n, 101);
    CHECK(std::abs(m.second.trace() / 3.0 - 4.0) < 0.03 * 4.0);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(m.mean(k)) < 4.0 * 2.0 / std::sqrt(double(n)));
  }
  SUBCASE("gaussian covariance") {
    Eigen::MatrixXd sigma(2, 2);
    sigma << 2.0, 0.6, 0.6, 0.5;
    const auto m = sample_moments(WeightDistribution::gaussian_cov(sigma), n, 102);
    CHECK((m.second - sigma).norm() < 0.05 * sigma.norm());
    for (int k = 0; k < 2; ++k)
      CHECK(std::abs(m.mean(k)) < 4.0 * std::sqrt(sigma(k, k)) / std::sqrt(double(n)));
  }
  SUBCASE("student t with four degrees of freedom") {
    const auto m = sample_moments(WeightDistribution::student_t(2.0, diag2(1, 1)), n, 103);
    const Eigen::MatrixXd expected = 2.0 * Eigen::MatrixXd::Identity(2, 2);
    CHECK((m.second - expected).norm() < 0.05 * expected.norm());
    for (int k = 0; k < 2; ++k) CHECK(std::abs(m.mean(k)) < 4.0 * std::sqrt(2.0 / double(n)));
  }
  SUBCASE("student t with a general scale") {
    Eigen::MatrixXd scale(2, 2);
    scale << 1.0, 0.3, 0.3, 0.4;
    const auto m = sample_moments(WeightDistribution::student_t(3.0, scale), n, 104);
    const Eigen::MatrixXd expected = 6.0 / 4.0 * scale;
    CHECK((m.second - expected).norm() < 0.05 * expected.norm());
  }
  SUBCASE("cauchy marginals have unit median absolute value") {
    const WeightSample s =
        sample_weights(WeightDistribution::cauchy(2), BiasDistribution::point_mass(), n, 105);
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = std::abs(s.weights(static_cast<Eigen::Index>(i), 0));
    std::nth_element(a.begin(), a.begin() + n / 2, a.end());
    CHECK(std::abs(a[n / 2] - 1.0) < 0.01);
  }
}

TEST_CASE("kernel evaluation examples") {
  const Eigen::VectorXd zero2 = Eigen::VectorXd::Zero(2);
  const auto g = ShiftInvariantKernel::gaussian(Eigen::MatrixXd::Identity(2, 2));
  const auto m = ShiftInvariantKernel::matern(2.0, Eigen::MatrixXd::Identity(2, 2));
  const auto l = ShiftInvariantKernel::laplace(2);
  for (const auto* k : {&g, &m, &l}) {
    CHECK(k->kappa(zero2) == 1.0);
    CHECK(k->kappa0() == 1.0);
  }
  Eigen::VectorXd d(2);
  d << 1.0, 1.0;
  CHECK(g.kappa(d) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(l.kappa(d) == doctest::Approx(std::exp(-std::sqrt(2.0))).epsilon(1e-15));
  CHECK(ShiftInvariantKernel::gaussian_isotropic(0.5, 2).kappa(d) ==
        doctest::Approx(std::exp(-0.25)).epsilon(1e-15));

  // nu = 3/2: kappa = (1 + sqrt(3) r) exp(-sqrt(3) r) in the unit-Sigma convention.
  const auto m32 = ShiftInvariantKernel::matern(1.5, Eigen::MatrixXd::Identity(2, 2));
  const double r = d.norm();
  CHECK(m32.kappa(d) ==
        doctest::Approx((1 + std::sqrt(3.0) * r) * std::exp(-std::sqrt(3.0) * r)).epsilon(1e-12));

  double previous = 0.0;
  for (double t : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4, 1e-6, 1e-9}) {
    const double v = m.kappa(Eigen::VectorXd::Constant(2, t));
    CHECK(v <= 1.0);
    CHECK(v >= previous);
    previous = v;
  }
  CHECK(previous == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(kind_of([&] { g.kappa(Eigen::VectorXd::Zero(3)); }) == ErrorKind::kInvalidArgument);
  CHECK(matern_profile(2.0, 0.0) == 1.0);
  CHECK(matern_profile(0.5, 1.3) == doctest::Approx(std::exp(-1.3)).epsilon(1e-13));
}

TEST_CASE("kernels are symmetric and peak at the origin") {
  std::mt19937_64 gen(43);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd sigma(3, 3);
  sigma << 2, 0.3, 0, 0.3, 1, 0.2, 0, 0.2, 0.7;
  const std::vector<ShiftInvariantKernel> ks = {
      ShiftInvariantKernel::gaussian(sigma), ShiftInvariantKernel::matern(2.0, sigma),
      ShiftInvariantKernel::matern(0.5, sigma), ShiftInvariantKernel::laplace(3)};
  for (const auto& k : ks) {
    for (int t = 0; t < 200; ++t) {
      Eigen::VectorXd d(3);
      for (int i = 0; i < 3; ++i) d(i) = 2 * nd(gen);
      CHECK(k.kappa(d) == doctest::Approx(k.kappa(-d)).epsilon(1e-14));
      CHECK(k.kappa0() >= std::abs(k.kappa(d)));
    }
  }
}

TEST_CASE("spectral laws reproduce the kernel by Monte Carlo") {
  std::mt19937_64 gen(47);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, 0.2, 0.2, 0.6;
  const std::vector<ShiftInvariantKernel> ks = {
      ShiftInvariantKernel::gaussian(diag2(1, 4)), ShiftInvariantKernel::gaussian(sigma),
      ShiftInvariantKernel::matern(2.0, Eigen::MatrixXd::Identity(2, 2)),
      ShiftInvariantKernel::matern(1.5, sigma)};
  const std::size_t n = 1000000;
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    const auto& k = ks[ki];
    REQUIRE(second_moment_status(k.spectral()).finite());
    const WeightSample s =
        sample_weights(k.spectral(), BiasDistribution::point_mass(), n, 200 + ki);
    for (int t = 0; t < 10; ++t) {
      Eigen::VectorXd d(2);
      do {
        d << 2 * u(gen), 2 * u(gen);
      } while (d.norm() > 2.0);
      const Eigen::ArrayXd c = (s.weights * d).array().cos();
      const double mc = k.kappa0() * c.mean();
      const double se = k.kappa0() * std::sqrt((c - c.mean()).square().sum() / (n - 1.0) / n);
      CHECK(std::abs(mc - k.kappa(d)) <= std::max(0.01 * k.kappa(d), 5.0 * se));
    }
  }
}

TEST_CASE("matrix specifications") {
  CHECK(parse_matrix_spec("identity", 3).isApprox(Eigen::MatrixXd::Identity(3, 3)));
  CHECK(parse_matrix_spec("diag:1,4", 2).isApprox(diag2(1, 4)));
  CHECK(kind_of([] { parse_matrix_spec("diag:1,4", 3); }) == ErrorKind::kInvalidConfiguration);
  CHECK(kind_of([] { parse_matrix_spec("diag:1,x", 2); }) == ErrorKind::kInvalidConfiguration);
  CHECK(kind_of([] { parse_matrix_spec("ones", 2); }) == ErrorKind::kInvalidConfiguration);
  CHECK(kind_of([] { parse_matrix_spec("file:/nonexistent/sigma.txt", 2); }) ==
        ErrorKind::kIoError);

  const std::string path = "kernels_sigma_fixture.txt";
  {
    std::ofstream f(path);
    f << "2 0.5\n0.5 1\n";
  }
  Eigen::MatrixXd expected(2, 2);
  expected << 2, 0.5, 0.5, 1;
  CHECK(parse_matrix_spec("file:" + path, 2).isApprox(expected));
  CHECK(kind_of([&] { parse_matrix_spec("file:" + path, 3); }) ==
        ErrorKind::kInvalidConfiguration);
  std::remove(path.c_str());
}

TEST_CASE("weight law descriptors") {
  CHECK(WeightDistribution::isotropic_gaussian(1.0, 4).dim() == 4);
  CHECK(WeightDistribution::cauchy(2).dim() == 2);
  CHECK_FALSE(WeightDistribution::discrete_spectrum(3).samplable());
  const DiscreteSpectrum ds{3};
  CHECK(ds.lambda(1) == doctest::Approx(1.0 / (0.25 * kPi * kPi)).epsilon(1e-15));
  CHECK(kind_of([] { WeightDistribution::gaussian_cov(diag2(1, -1)); }) ==
        ErrorKind::kInvalidArgument);
  const auto lap = ShiftInvariantKernel::laplace(3).spectral();
  CHECK(std::holds_alternative<Cauchy>(lap.family()));
  const auto mat = ShiftInvariantKernel::matern(2.0, diag2(1, 4)).spectral();
  REQUIRE(std::holds_alternative<StudentT>(mat.family()));
  CHECK(std::get<StudentT>(mat.family()).scale.isApprox(diag2(1, 0.25)));
}
