#include <cmath>

#include "lipfm/error.hpp"
#include "lipfm/numerics.hpp"
#include "lipfm/random_features.hpp"

namespace lipfm {

RandomFeatureMap::RandomFeatureMap(RowMatrix weights, Eigen::VectorXd biases, Activation act,
                                   FeatureSource source)
    : weights_(std::move(weights)), biases_(std::move(biases)), act_(act),
      source_(std::move(source)) {
  if (weights_.rows() < 1 || weights_.cols() < 1) {
    fail(ErrorKind::kInvalidArgument, "feature map needs N >= 1 and d >= 1");
  }
  if (biases_.size() != weights_.rows()) {
    fail(ErrorKind::kInvalidArgument, "bias count does not match the number of features");
  }
}

void RandomFeatureMap::check_dim(const Eigen::VectorXd& x) const {
  if (x.size() != weights_.cols()) {
    fail(ErrorKind::kInvalidArgument,
         "input of dimension " + std::to_string(x.size()) + " for a map on R^" +
             std::to_string(weights_.cols()));
  }
}

Eigen::VectorXd RandomFeatureMap::evaluate(const Eigen::VectorXd& x) const {
  check_dim(x);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_features()));
  Eigen::VectorXd pre = weights_ * x + biases_;
  for (Eigen::Index i = 0; i < pre.size(); ++i) pre(i) = scale * act_.value(pre(i));
  return pre;
}

RowMatrix RandomFeatureMap::jacobian(const Eigen::VectorXd& x) const {
  check_dim(x);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_features()));
  const Eigen::VectorXd pre = weights_ * x + biases_;
  RowMatrix jac(weights_.rows(), weights_.cols());
  for (Eigen::Index i = 0; i < jac.rows(); ++i) {
    jac.row(i) = (scale * act_.derivative(pre(i))) * weights_.row(i);
  }
  return jac;
}

RandomFeatureMap RandomFeatureMap::prefix(std::size_t n) const {
  if (n < 1 || n > n_features()) fail(ErrorKind::kInvalidArgument, "prefix size out of range");
  const auto rows = static_cast<Eigen::Index>(n);
  return RandomFeatureMap(weights_.topRows(rows), biases_.head(rows), act_, source_);
}

RandomFeatureMap build_feature_map(const WeightDistribution& dist, const BiasDistribution& bias,
                                   const Activation& act, std::size_t n_features,
                                   std::uint64_t seed) {
  if (n_features < 1) fail(ErrorKind::kInvalidArgument, "feature map needs N >= 1");
  WeightSample s = sample_weights(dist, bias, n_features, seed);
  return RandomFeatureMap(std::move(s.weights), std::move(s.biases), act,
                          FeatureSource{dist, bias, seed});
}

double empirical_kernel(const RandomFeatureMap& fm, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& xp) {
  return fm.evaluate(x).dot(fm.evaluate(xp));
}

std::vector<Eigen::VectorXd> default_grid_1d() {
  return lattice_grid(-1.0, 1.0, 99, 1);
}

std::vector<Eigen::VectorXd> lattice_grid(double lo, double hi, int per_axis, int dim) {
  if (!(lo < hi) || per_axis < 1 || dim < 1) {
    fail(ErrorKind::kInvalidArgument, "lattice needs lo < hi, per_axis >= 1, dim >= 1");
  }
  double total = 1.0;
  for (int k = 0; k < dim; ++k) total *= per_axis;
  if (total > static_cast<double>(kMaxGridPoints)) {
    fail(ErrorKind::kInvalidArgument, "lattice exceeds 10^4 points");
  }
  // (lo (m - j) + hi j) / m keeps the midpoint exactly representable.
  const int m = per_axis + 1;
  auto coord = [&](int j) { return (lo * (m - j) + hi * j) / m; };
  std::vector<Eigen::VectorXd> grid;
  std::vector<int> idx(static_cast<std::size_t>(dim), 1);
  for (;;) {
    Eigen::VectorXd p(dim);
    for (int k = 0; k < dim; ++k) p(k) = coord(idx[static_cast<std::size_t>(k)]);
    grid.push_back(std::move(p));
    int k = dim - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == per_axis) {
      idx[static_cast<std::size_t>(k)] = 1;
      --k;
    }
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
  }
  return grid;
}

}  // namespace lipfm
