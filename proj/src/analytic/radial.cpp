#include <cmath>
#include <sstream>

#include "lipfm/analytic.hpp"
#include "lipfm/error.hpp"
#include "lipfm/monte_carlo.hpp"
#include "lipfm/rng.hpp"

namespace lipfm {

RadialProfile::RadialProfile(Activation act, double gamma, BiasDistribution bias,
                             QuadratureOrders orders)
    : act_(act), gamma_(gamma), bias_(bias), orders_(orders) {
  if (!(gamma > 0.0 && std::isfinite(gamma))) {
    fail(ErrorKind::kInvalidArgument, "gamma must be positive and finite");
  }
  if (orders.zeta < 8 || orders.bias < 8) {
    fail(ErrorKind::kInvalidArgument, "quadrature orders must be at least (8, 8)");
  }
}

LadderResult RadialProfile::expect(double r,
                                   const std::function<double(double, double)>& weight) const {
  if (!(r >= 0.0)) fail(ErrorKind::kInvalidArgument, "radius must be non-negative");
  const Activation act = act_;
  const Integrand2D f = [act, r, &weight](double zeta, double b) {
    const double s = act.derivative(zeta * r + b);
    return weight(zeta, b) * s * s;
  };
  ZetaBreaks breaks;
  if (!act_.differentiable_everywhere()) {
    const std::vector<double> kinks = act_.kinks();
    breaks = [kinks, r](double b, std::vector<double>& out) {
      if (r > 0.0) {
        for (double k : kinks) out.push_back((k - b) / r);
      }
    };
  }
  return expectation_2d_adaptive(f, gamma_, bias_, orders_, breaks);
}

LadderResult RadialProfile::nu(double r) const {
  return expect(r, [](double zeta, double) { return zeta * zeta; });
}

LadderResult RadialProfile::alpha(double a) const {
  return expect(a, [](double, double) { return 1.0; });
}

LadderResult RadialProfile::beta(double a) const {
  const double g2 = gamma_ * gamma_;
  return expect(a, [g2](double zeta, double) { return zeta * zeta - g2; });
}

double nu_function(const Activation& act, double gamma, const BiasDistribution& bias, double r) {
  return RadialProfile(act, gamma, bias).nu(r).value;
}

Interval default_radial_domain(double gamma, const BiasDistribution& bias) {
  return {0.0, 10.0 * gamma * (1.0 + bias.stddev())};
}

LipschitzReport rnn_lipschitz(const Activation& act, double gamma, const BiasDistribution& bias,
                              const RadialOptions& options) {
  if (!act.differentiable_everywhere() && !bias.absolutely_continuous()) {
    fail(ErrorKind::kHypothesisViolation,
         "activation '" + act.name() +
             "' is not differentiable everywhere, so the law of (w, b) must be absolutely "
             "continuous; bias '" + bias.to_string() + "' is a point mass");
  }
  const RadialProfile profile(act, gamma, bias, options.orders);
  const Interval domain = options.r_domain.value_or(default_radial_domain(gamma, bias));
  if (!(domain.lo >= 0.0 && domain.lo < domain.hi && std::isfinite(domain.hi))) {
    fail(ErrorKind::kInvalidArgument, "radial domain must satisfy 0 <= r_min < r_max < inf");
  }

  const ScalarMaxResult best =
      maximize_scalar([&](double r) { return profile.nu(r).value; }, domain, options.tol);
  const LadderResult at = profile.nu(best.argmax);

  LipschitzReport report;
  report.method = LipschitzMethod::kRadialQuadrature;
  report.value = std::sqrt(std::max(0.0, best.max_value));
  report.argmax_r = best.argmax;
  report.error_estimate =
      report.value > 0.0 ? at.error_estimate / (2.0 * report.value) : std::sqrt(at.error_estimate);
  return report;
}

VarianceCheck variance_decomposition_check(const Activation& act, double gamma,
                                           const BiasDistribution& bias,
                                           const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                                           std::size_t mc_samples, std::uint64_t seed) {
  if (x.size() != z.size() || x.size() == 0) {
    fail(ErrorKind::kInvalidArgument, "x and z must be non-empty and of equal dimension");
  }
  const double xn = x.norm();
  if (xn == 0.0) {
    fail(ErrorKind::kInvalidArgument,
         "x = 0 has no direction; evaluate nu(0) with nu_function instead");
  }
  if (z.norm() == 0.0) fail(ErrorKind::kInvalidArgument, "z must be non-zero");
  if (mc_samples < 2) fail(ErrorKind::kInvalidArgument, "need at least two Monte-Carlo samples");

  const RadialProfile profile(act, gamma, bias);
  const double xz = x.dot(z);
  VarianceCheck out;
  out.rhs = xz * xz / (xn * xn) * profile.beta(xn).value +
            z.squaredNorm() * gamma * gamma * profile.alpha(xn).value;

  const Eigen::Index d = x.size();
  const McEstimate mc =
      monte_carlo_mean(mc_samples, derive_stream(seed, {0x76617264ull}), [&](CounterStream& s) {
        double wx = 0.0, wz = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) {
          const double w = gamma * s.normal();
          wx += w * x(k);
          wz += w * z(k);
        }
        const double b = bias.sample(s);
        const double v = wz * act.derivative(wx + b);
        return v * v;
      });
  out.lhs = mc.mean;
  out.lhs_standard_error = mc.standard_error;
  return out;
}

LipschitzReport moment_upper_bound(const Activation& act, const WeightDistribution& dist) {
  const MomentStatus status = second_moment_status(dist);
  if (!status.finite()) {
    fail(ErrorKind::kHypothesisViolation,
         "upper bound needs E||w||^2 < inf; " + dist.name() + " has no second moment");
  }
  LipschitzReport report;
  report.method = LipschitzMethod::kUpperBound;
  report.value = act.lipschitz_bound() * std::sqrt(status.covariance->trace());
  return report;
}

}  // namespace lipfm
