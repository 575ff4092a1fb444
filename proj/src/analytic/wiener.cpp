#include <cmath>
#include <numbers>

#include "lipfm/analytic.hpp"
#include "lipfm/error.hpp"

namespace lipfm {

namespace {

// lambda_n phi_n'(x)^2 = 2 cos^2((n - 1/2) pi x); the eigenvalue cancels the
// frequency factor of the derivative exactly.
double derivative_energy_term(std::size_t n, double x) {
  const double c = std::cos((static_cast<double>(n) - 0.5) * std::numbers::pi * x);
  return 2.0 * c * c;
}

}  // namespace

double wiener_divergence(std::size_t terms) {
  if (terms < 1) fail(ErrorKind::kInvalidArgument, "need at least one term");
  double sum = 0.0;
  for (std::size_t n = 1; n <= terms; ++n) sum += derivative_energy_term(n, 0.0);
  return sum;
}

double wiener_kernel_truncated(double x, double y, std::size_t terms) {
  if (terms < 1) fail(ErrorKind::kInvalidArgument, "need at least one term");
  const DiscreteSpectrum spectrum{terms};
  double sum = 0.0;
  for (std::size_t n = 1; n <= terms; ++n) {
    const double f = (static_cast<double>(n) - 0.5) * std::numbers::pi;
    sum += spectrum.lambda(n) * 2.0 * std::sin(f * x) * std::sin(f * y);
  }
  return sum;
}

}  // namespace lipfm
