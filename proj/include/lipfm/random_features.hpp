#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lipfm/kernels.hpp"

namespace lipfm {

/// Where a feature map's draw came from.
struct FeatureSource {
  std::optional<WeightDistribution> weights;  // absent after deserialization
  std::optional<BiasDistribution> bias;
  std::uint64_t seed = 0;
};

/// theta_N(x) = N^{-1/2} [sigma(w_i . x + b_i)]_{i < N}. Immutable after construction.
class RandomFeatureMap {
 public:
  RandomFeatureMap(RowMatrix weights, Eigen::VectorXd biases, Activation act,
                   FeatureSource source = {});

  std::size_t n_features() const { return static_cast<std::size_t>(weights_.rows()); }
  int dim() const { return static_cast<int>(weights_.cols()); }
  const RowMatrix& weights() const { return weights_; }
  const Eigen::VectorXd& biases() const { return biases_; }
  const Activation& activation() const { return act_; }
  const FeatureSource& source() const { return source_; }

  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;

  /// Row i is N^{-1/2} sigma'(w_i . x + b_i) w_i^T.
  RowMatrix jacobian(const Eigen::VectorXd& x) const;

  /// The map restricted to its first n features (rescaled to n^{-1/2}).
  RandomFeatureMap prefix(std::size_t n) const;

  friend bool operator==(const RandomFeatureMap& a, const RandomFeatureMap& b) {
    return a.act_ == b.act_ && a.weights_ == b.weights_ && a.biases_ == b.biases_;
  }

 private:
  void check_dim(const Eigen::VectorXd& x) const;

  RowMatrix weights_;
  Eigen::VectorXd biases_;
  Activation act_;
  FeatureSource source_;
};

/// Deterministic in `seed`; feature i comes from counter row i of the seed stream.
RandomFeatureMap build_feature_map(const WeightDistribution& dist, const BiasDistribution& bias,
                                   const Activation& act, std::size_t n_features,
                                   std::uint64_t seed);

/// k_N(x, x') = theta_N(x) . theta_N(x').
double empirical_kernel(const RandomFeatureMap& fm, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& xp);

struct EmpiricalLipschitz {
  double value = 0.0;
  std::size_t argmax_index = 0;
  Eigen::VectorXd argmax;
};

/// Serial reference: max_j spectral_norm(jacobian(x_j)). Ties go to the lowest index.
EmpiricalLipschitz empirical_lipschitz_reference(const RandomFeatureMap& fm,
                                                 const std::vector<Eigen::VectorXd>& grid);

/// Same quantity through the d x d Gram J^T J accumulated in one pass per point.
/// With `parallel`, grid points are split across OpenMP threads; the result is
/// identical for any thread count.
EmpiricalLipschitz empirical_lipschitz(const RandomFeatureMap& fm,
                                       const std::vector<Eigen::VectorXd>& grid,
                                       bool parallel = false);

/// x_j = -1 + 2j/100 for j = 1..99.
std::vector<Eigen::VectorXd> default_grid_1d();

/// Uniform lattice with `per_axis` points per coordinate on [lo, hi]^d
/// (interior points only, matching the 1-D default). At most 10^4 points.
std::vector<Eigen::VectorXd> lattice_grid(double lo, double hi, int per_axis, int dim);

inline constexpr std::size_t kMaxGridPoints = 10000;

// Binary layout (little-endian): "RFM1", u64 N, u64 d, u32 activation id,
// u64 seed, then N*d f64 weights row-major, then N f64 biases.
void write_feature_map(const RandomFeatureMap& fm, const std::string& path);
RandomFeatureMap read_feature_map(const std::string& path);

}  // namespace lipfm
