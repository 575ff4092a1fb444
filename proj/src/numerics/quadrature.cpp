#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "lipfm/error.hpp"
#include "lipfm/kernels.hpp"
#include "lipfm/numerics.hpp"

namespace lipfm {

namespace {

QuadratureRule compute_hermite(int n) {
  // Golub-Welsch eigenvalues seed Newton on the orthonormal Hermite recurrence;
  // the asymptotic root guesses lose track of the roots beyond n ~ 150.
  constexpr double kPiM4 = 0.7511255444649425;  // pi^(-1/4)
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n), sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> jacobi;
  jacobi.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& guess = jacobi.eigenvalues();  // ascending

  std::vector<double> x(n), w(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = guess(n - 1 - i);
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = kPiM4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    if (n % 2 == 1 && i == m - 1) z = 0.0;
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / (pp * pp);
  }
  QuadratureRule rule;
  rule.tag = MeasureTag::kGaussHermite;
  rule.nodes.assign(x.rbegin(), x.rend());
  rule.weights.assign(w.rbegin(), w.rend());
  return rule;
}

QuadratureRule compute_legendre_unit(int n) {
  std::vector<double> x(n), w(n);
  const int m = (n + 1) / 2;
  for (int i = 1; i <= m; ++i) {
    double z = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-16) break;
    }
    if (n % 2 == 1 && i == m) z = 0.0;
    x[i - 1] = -z;
    x[n - i] = z;
    w[i - 1] = w[n - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  QuadratureRule rule;
  rule.tag = MeasureTag::kGaussLegendre;
  rule.nodes = std::move(x);
  rule.weights = std::move(w);
  rule.a = -1.0;
  rule.b = 1.0;
  return rule;
}

// Rules are immutable once built; each order is computed at most once.
struct RuleTable {
  std::array<std::once_flag, kMaxQuadratureOrder + 1> once;
  std::array<QuadratureRule, kMaxQuadratureOrder + 1> rules;
};

const QuadratureRule& standard_hermite(int n) {
  static RuleTable table;
  std::call_once(table.once[n], [&] { table.rules[n] = compute_hermite(n); });
  return table.rules[n];
}

const QuadratureRule& standard_legendre(int n) {
  static RuleTable table;
  std::call_once(table.once[n], [&] { table.rules[n] = compute_legendre_unit(n); });
  return table.rules[n];
}

void check_order(int n, const char* what) {
  if (n < 1 || n > kMaxQuadratureOrder) {
    fail(ErrorKind::kInvalidArgument,
         std::string(what) + " order must be in [1, 256], got " + std::to_string(n));
  }
}

// Nodes and probability weights for the bias law.
void bias_rule(const BiasDistribution& bias, int n, std::vector<double>& nodes,
               std::vector<double>& weights) {
  nodes.clear();
  weights.clear();
  switch (bias.family()) {
    case BiasFamily::kPointMass:
      nodes.push_back(0.0);
      weights.push_back(1.0);
      return;
    case BiasFamily::kUniform: {
      const auto& r = standard_legendre(n);
      const double lo = bias.lower(), hi = bias.upper();
      const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
      for (int i = 0; i < n; ++i) {
        nodes.push_back(mid + half * r.nodes[i]);
        weights.push_back(0.5 * r.weights[i]);
      }
      return;
    }
    case BiasFamily::kGaussian: {
      const auto& r = standard_hermite(n);
      const double scale = std::numbers::sqrt2 * bias.stddev();
      for (int i = 0; i < n; ++i) {
        nodes.push_back(scale * r.nodes[i]);
        weights.push_back(r.weights[i] / std::sqrt(std::numbers::pi));
      }
      return;
    }
  }
  fail(ErrorKind::kUnsupportedDistribution, "bias family has no quadrature rule");
}

}  // namespace

QuadratureRule gauss_hermite(int n) {
  check_order(n, "gauss_hermite");
  return standard_hermite(n);
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) fail(ErrorKind::kInvalidArgument, "gauss_legendre order must be >= 1");
  if (!(a < b)) fail(ErrorKind::kInvalidArgument, "gauss_legendre requires a < b");
  QuadratureRule rule = n <= kMaxQuadratureOrder ? standard_legendre(n) : compute_legendre_unit(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  rule.a = a;
  rule.b = b;
  return rule;
}

double expectation_2d(const Integrand2D& f, double gamma, const BiasDistribution& bias,
                      QuadratureOrders orders, const ZetaBreaks& breaks) {
  check_order(orders.zeta, "zeta quadrature");
  check_order(orders.bias, "bias quadrature");
  if (orders.zeta < 8 || orders.bias < 8) {
    fail(ErrorKind::kInvalidArgument, "expectation_2d needs orders of at least (8, 8)");
  }
  if (!(gamma > 0.0)) fail(ErrorKind::kInvalidArgument, "gamma must be positive");

  std::vector<double> b_nodes, b_weights;
  bias_rule(bias, orders.bias, b_nodes, b_weights);

  double total = 0.0;
  if (!breaks) {
    const auto& h = standard_hermite(orders.zeta);
    const double scale = std::numbers::sqrt2 * gamma;
    const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
    for (std::size_t j = 0; j < b_nodes.size(); ++j) {
      double inner = 0.0;
      for (int i = 0; i < orders.zeta; ++i) {
        inner += h.weights[i] * f(scale * h.nodes[i], b_nodes[j]);
      }
      total += b_weights[j] * inner * inv_sqrt_pi;
    }
    return total;
  }

  // Truncated Gaussian support; the mass beyond 10 gamma is below 1e-22.
  const auto& leg = standard_legendre(orders.zeta);
  const double lo = -10.0 * gamma, hi = 10.0 * gamma;
  const double norm = 1.0 / (gamma * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> cuts;
  for (std::size_t j = 0; j < b_nodes.size(); ++j) {
    cuts.clear();
    breaks(b_nodes[j], cuts);
    std::erase_if(cuts, [&](double c) { return !(c > lo && c < hi); });
    cuts.push_back(lo);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    double inner = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double a = cuts[k], b = cuts[k + 1];
      if (!(b > a)) continue;
      const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
      double piece = 0.0;
      for (int i = 0; i < orders.zeta; ++i) {
        const double zeta = mid + half * leg.nodes[i];
        const double u = zeta / gamma;
        piece += leg.weights[i] * std::exp(-0.5 * u * u) * f(zeta, b_nodes[j]);
      }
      inner += half * piece;
    }
    total += b_weights[j] * inner * norm;
  }
  return total;
}

LadderResult expectation_2d_adaptive(const Integrand2D& f, double gamma,
                                     const BiasDistribution& bias, QuadratureOrders start,
                                     const ZetaBreaks& breaks, double rel_tol) {
  QuadratureOrders orders = start;
  double previous = expectation_2d(f, gamma, bias, orders, breaks);
  LadderResult result{previous, 0.0, orders};
  while (orders.zeta < kMaxQuadratureOrder || orders.bias < kMaxQuadratureOrder) {
    orders.zeta = std::min(2 * orders.zeta, kMaxQuadratureOrder);
    orders.bias = std::min(2 * orders.bias, kMaxQuadratureOrder);
    const double current = expectation_2d(f, gamma, bias, orders, breaks);
    result = {current, std::abs(current - previous), orders};
    if (result.error_estimate < rel_tol * std::max(1.0, std::abs(current))) break;
    previous = current;
  }
  return result;
}

}  // namespace lipfm
