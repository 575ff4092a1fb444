#include <algorithm>
#include <cmath>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lipfm/error.hpp"
#include "lipfm/experiments.hpp"
#include "lipfm/random_features.hpp"
#include "lipfm/rng.hpp"

namespace lipfm {

FeatureSpec rff_features(const ShiftInvariantKernel& kernel) {
  return {Activation::scaled_cosine(kernel.kappa0()), kernel.spectral(),
          BiasDistribution::uniform_phase()};
}

std::optional<ShiftInvariantKernel> closed_form_kernel(const FeatureSpec& spec) {
  if (spec.activation != Activation::scaled_cosine(1.0)) return std::nullopt;
  const BiasDistribution& b = spec.bias;
  if (b.family() != BiasFamily::kUniform || b.lower() != 0.0 ||
      std::abs(b.upper() - 2.0 * std::numbers::pi) > 1e-12) {
    return std::nullopt;
  }
  struct {
    std::optional<ShiftInvariantKernel> operator()(const IsotropicGaussian& g) const {
      return ShiftInvariantKernel::gaussian_isotropic(g.gamma, g.dim);
    }
    std::optional<ShiftInvariantKernel> operator()(const GaussianCov& g) const {
      return ShiftInvariantKernel::gaussian(g.sigma);
    }
    std::optional<ShiftInvariantKernel> operator()(const StudentT& t) const {
      const Eigen::MatrixXd sigma = t.scale.inverse();
      return ShiftInvariantKernel::matern(t.nu, 0.5 * (sigma + sigma.transpose()));
    }
    std::optional<ShiftInvariantKernel> operator()(const Cauchy& c) const {
      return ShiftInvariantKernel::laplace(c.dim);
    }
    std::optional<ShiftInvariantKernel> operator()(const DiscreteSpectrum&) const {
      return std::nullopt;
    }
  } visitor;
  return std::visit(visitor, spec.weights.family());
}

std::size_t quantile_index(double delta, std::size_t count) {
  const double target = delta * static_cast<double>(count);
  const double nearest = std::round(target);
  std::size_t q = std::abs(target - nearest) <= 1e-9 ? static_cast<std::size_t>(nearest)
                                                     : static_cast<std::size_t>(std::ceil(target));
  return std::clamp<std::size_t>(q, 1, count);
}

std::uint64_t realization_stream(const QuantileSweepConfig& cfg, std::size_t n, std::size_t i) {
  return cfg.nested ? derive_stream(cfg.seed, {i}) : derive_stream(cfg.seed, {n, i});
}

SweepRow summarize(std::size_t n, std::vector<double> lip_hats, double delta,
                   double lip_reference) {
  SweepRow row;
  row.n = n;
  const std::size_t count = lip_hats.size();
  double sum = 0.0;
  for (double v : lip_hats) sum += v;
  row.lip_hat_mean = sum / static_cast<double>(count);
  if (count > 1) {
    double ss = 0.0;
    for (double v : lip_hats) ss += (v - row.lip_hat_mean) * (v - row.lip_hat_mean);
    row.lip_hat_sd = std::sqrt(ss / static_cast<double>(count - 1));
  }
  row.quantile_index = quantile_index(delta, count);
  std::sort(lip_hats.begin(), lip_hats.end());
  row.t_hat = lip_hats[row.quantile_index - 1] - lip_reference;
  return row;
}

namespace {

void validate(const QuantileSweepConfig& cfg) {
  if (!std::isfinite(cfg.lip_reference)) {
    fail(ErrorKind::kInvalidConfiguration,
         "the reference Lipschitz constant is infinite; there is nothing to converge to");
  }
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    fail(ErrorKind::kInvalidConfiguration, "delta must lie in (0, 1)");
  }
  if (cfg.realizations < 1) fail(ErrorKind::kInvalidConfiguration, "need at least one realization");
  if (cfg.n_list.empty()) fail(ErrorKind::kInvalidConfiguration, "N list is empty");
  for (std::size_t k = 0; k < cfg.n_list.size(); ++k) {
    if (cfg.n_list[k] < 1 || (k > 0 && cfg.n_list[k] <= cfg.n_list[k - 1])) {
      fail(ErrorKind::kInvalidConfiguration, "N list must be positive and strictly increasing");
    }
  }
  if (cfg.grid.empty()) fail(ErrorKind::kInvalidConfiguration, "grid is empty");
  for (const auto& p : cfg.grid) {
    if (p.size() != cfg.features.weights.dim()) {
      fail(ErrorKind::kInvalidConfiguration, "grid dimension does not match the weight law");
    }
  }
  if (!cfg.features.weights.samplable()) {
    fail(ErrorKind::kUnsupportedDistribution, cfg.features.weights.name() + " cannot be sampled");
  }
}

}  // namespace

std::vector<SweepRow> quantile_sweep(const QuantileSweepConfig& cfg, const RowCallback& on_row) {
  validate(cfg);
#ifdef _OPENMP
  const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#endif
  std::vector<SweepRow> rows;
  std::vector<double> lip_hats(cfg.realizations);
  const auto count = static_cast<std::ptrdiff_t>(cfg.realizations);
  for (std::size_t n : cfg.n_list) {
    // Each realization writes only its own slot; the table is reduced serially.
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const auto u = static_cast<std::size_t>(i);
      const RandomFeatureMap fm =
          build_feature_map(cfg.features.weights, cfg.features.bias, cfg.features.activation, n,
                            realization_stream(cfg, n, u));
      lip_hats[u] = empirical_lipschitz(fm, cfg.grid).value;
    }
    rows.push_back(summarize(n, lip_hats, cfg.delta, cfg.lip_reference));
    if (on_row) on_row(rows.back());
  }
  return rows;
}

std::vector<SweepRow> quantile_sweep_reference(const QuantileSweepConfig& cfg) {
  validate(cfg);
  std::vector<SweepRow> rows;
  for (std::size_t n : cfg.n_list) {
    std::vector<double> lip_hats;
    lip_hats.reserve(cfg.realizations);
    for (std::size_t i = 0; i < cfg.realizations; ++i) {
      const RandomFeatureMap fm =
          build_feature_map(cfg.features.weights, cfg.features.bias, cfg.features.activation, n,
                            realization_stream(cfg, n, i));
      lip_hats.push_back(empirical_lipschitz_reference(fm, cfg.grid).value);
    }
    rows.push_back(summarize(n, std::move(lip_hats), cfg.delta, cfg.lip_reference));
  }
  return rows;
}

bool concentration_warning(const SweepRow& row, double lip_reference) {
  return row.lip_hat_mean > lip_reference + 5.0 * row.lip_hat_sd;
}

std::vector<ConvergenceRow> kernel_convergence_sweep(const FeatureSpec& spec,
                                                     const std::vector<std::size_t>& n_list,
                                                     const std::vector<Eigen::VectorXd>& points,
                                                     std::uint64_t seed) {
  const auto kernel = closed_form_kernel(spec);
  if (!kernel) {
    fail(ErrorKind::kUnsupportedDistribution,
         "no closed-form kernel for " + spec.activation.name() + " features with " +
             spec.weights.name() + " weights and " + spec.bias.to_string() + " bias");
  }
  if (n_list.empty() || points.empty()) {
    fail(ErrorKind::kInvalidConfiguration, "need a non-empty N list and point set");
  }
  for (std::size_t k = 1; k < n_list.size(); ++k) {
    if (n_list[k] <= n_list[k - 1]) {
      fail(ErrorKind::kInvalidConfiguration, "N list must be strictly increasing");
    }
  }
  const std::size_t n_max = n_list.back();
  const WeightSample draw =
      sample_weights(spec.weights, spec.bias, n_max, derive_stream(seed, {0x6b636f6eull}));

  const std::size_t p = points.size();
  Eigen::MatrixXd exact(p, p);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b) exact(a, b) = (*kernel)(points[a], points[b]);

  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd phi(p);
  std::vector<ConvergenceRow> rows;
  std::size_t next = 0;
  for (std::size_t i = 0; i < n_max; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t a = 0; a < p; ++a) {
      phi(a) = spec.activation.value(draw.weights.row(r).dot(points[a]) + draw.biases(r));
    }
    sums.noalias() += phi * phi.transpose();
    if (i + 1 == n_list[next]) {
      const double n = static_cast<double>(i + 1);
      rows.push_back({i + 1, (sums / n - exact).cwiseAbs().maxCoeff()});
      ++next;
    }
  }
  return rows;
}

double loglog_slope(const std::vector<ConvergenceRow>& rows) {
  if (rows.size() < 2) fail(ErrorKind::kInvalidArgument, "slope needs at least two rows");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& r : rows) {
    const double x = std::log(static_cast<double>(r.n));
    const double y = std::log(r.sup_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(rows.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace lipfm
