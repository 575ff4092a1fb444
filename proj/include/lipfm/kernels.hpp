#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace lipfm {

class CounterStream;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

enum class ActivationKind : std::uint32_t {
  kIdentity = 0,
  kRelu = 1,
  kTanh = 2,
  kScaledCosine = 3,  // u -> sqrt(2 kappa0) cos(u)
};

/// Scalar nonlinearity with its a.e. derivative. The derivative is 0 at kinks.
class Activation {
 public:
  static Activation identity() { return Activation(ActivationKind::kIdentity, 1.0); }
  static Activation relu() { return Activation(ActivationKind::kRelu, 1.0); }
  static Activation tanh() { return Activation(ActivationKind::kTanh, 1.0); }
  /// sqrt(2 kappa0) cos(u): the random Fourier feature of a kernel with kappa(0) = kappa0.
  static Activation scaled_cosine(double kappa0 = 1.0);
  static Activation from_name(const std::string& name);

  ActivationKind kind() const { return kind_; }
  std::string name() const;
  /// Amplitude; sqrt(2 kappa0) for the cosine, 1 otherwise.
  double scale() const { return scale_; }

  double value(double u) const {
    switch (kind_) {
      case ActivationKind::kIdentity: return u;
      case ActivationKind::kRelu: return u > 0.0 ? u : 0.0;
      case ActivationKind::kTanh: return std::tanh(u);
      case ActivationKind::kScaledCosine: return scale_ * std::cos(u);
    }
    return 0.0;
  }

  double derivative(double u) const {
    switch (kind_) {
      case ActivationKind::kIdentity: return 1.0;
      case ActivationKind::kRelu: return u > 0.0 ? 1.0 : 0.0;
      case ActivationKind::kTanh: {
        const double t = std::tanh(u);
        return 1.0 - t * t;
      }
      case ActivationKind::kScaledCosine: return -scale_ * std::sin(u);
    }
    return 0.0;
  }

  double lipschitz_bound() const { return scale_; }
  std::vector<double> kinks() const;
  bool differentiable_everywhere() const { return kind_ != ActivationKind::kRelu; }

  friend bool operator==(const Activation&, const Activation&) = default;

 private:
  Activation(ActivationKind kind, double scale) : kind_(kind), scale_(scale) {}
  ActivationKind kind_;
  double scale_;
};

// ---------------------------------------------------------------------------
// Bias laws
// ---------------------------------------------------------------------------

enum class BiasFamily { kUniform, kGaussian, kPointMass };

class BiasDistribution {
 public:
  static BiasDistribution uniform(double lo, double hi);
  /// Uniform on [0, 2 pi].
  static BiasDistribution uniform_phase();
  static BiasDistribution gaussian(double stddev);
  static BiasDistribution point_mass();
  /// "uniform:a:b", "gaussian:sd", "point:0".
  static BiasDistribution parse(const std::string& text);

  BiasFamily family() const { return family_; }
  double lower() const { return p0_; }
  double upper() const { return p1_; }
  double stddev() const;
  bool absolutely_continuous() const { return family_ != BiasFamily::kPointMass; }
  double sample(CounterStream& stream) const;
  std::string to_string() const;

  friend bool operator==(const BiasDistribution&, const BiasDistribution&) = default;

 private:
  BiasDistribution(BiasFamily f, double p0, double p1) : family_(f), p0_(p0), p1_(p1) {}
  BiasFamily family_;
  double p0_;  // uniform lower bound, or gaussian std
  double p1_;  // uniform upper bound
};

// ---------------------------------------------------------------------------
// Weight laws
// ---------------------------------------------------------------------------

struct IsotropicGaussian {
  double gamma;
  int dim;
};

struct GaussianCov {
  Eigen::MatrixXd sigma;
};

/// Multivariate Student t with 2 nu degrees of freedom and scale matrix `scale`.
struct StudentT {
  double nu;
  Eigen::MatrixXd scale;
};

struct Cauchy {
  int dim;
};

/// Mercer spectrum of the Wiener kernel on (0,1): lambda_n = ((n - 1/2) pi)^-2.
/// Diagnostics only; cannot be sampled.
struct DiscreteSpectrum {
  std::size_t terms;
  double lambda(std::size_t n) const;
};

class WeightDistribution {
 public:
  using Family = std::variant<IsotropicGaussian, GaussianCov, StudentT, Cauchy, DiscreteSpectrum>;

  static WeightDistribution isotropic_gaussian(double gamma, int dim);
  static WeightDistribution gaussian_cov(Eigen::MatrixXd sigma);
  /// t_{2 nu}(0, scale).
  static WeightDistribution student_t(double nu, Eigen::MatrixXd scale);
  static WeightDistribution cauchy(int dim);
  static WeightDistribution discrete_spectrum(std::size_t terms);

  const Family& family() const { return family_; }
  int dim() const;
  std::string name() const;
  bool samplable() const { return !std::holds_alternative<DiscreteSpectrum>(family_); }

  /// Draws one weight vector into `out` (size dim()).
  void sample(CounterStream& stream, std::span<double> out) const;

 private:
  explicit WeightDistribution(Family f);
  Family family_;
  Eigen::MatrixXd chol_;  // lower Cholesky factor of the Gaussian core covariance
};

struct MomentStatus {
  /// Cov(w) = E[w w^T] when finite.
  std::optional<Eigen::MatrixXd> covariance;
  bool finite() const { return covariance.has_value(); }
};

/// Analytic classification of E||w||^2.
MomentStatus second_moment_status(const WeightDistribution& dist);

struct WeightSample {
  RowMatrix weights;       // n x d, one row per feature
  Eigen::VectorXd biases;  // n
};

/// Row i is drawn from counter row i of `stream` (weights first, then bias),
/// so the first m rows of a larger draw equal a draw of size m.
WeightSample sample_weights(const WeightDistribution& dist, const BiasDistribution& bias,
                            std::size_t n, std::uint64_t stream);

// ---------------------------------------------------------------------------
// Shift-invariant kernels
// ---------------------------------------------------------------------------

struct GaussianKernel {
  Eigen::MatrixXd sigma;  // kappa(D) = exp(-D^T sigma D / 2)
};

struct MaternKernel {
  double nu;
  Eigen::MatrixXd sigma;  // spectral law t_{2 nu}(0, sigma^-1)
  Eigen::MatrixXd sigma_inv;
};

struct LaplaceKernel {
  int dim;  // kappa(D) = exp(-||D||)
};

class ShiftInvariantKernel {
 public:
  using Family = std::variant<GaussianKernel, MaternKernel, LaplaceKernel>;

  static ShiftInvariantKernel gaussian(Eigen::MatrixXd sigma);
  /// exp(-gamma^2 ||D||^2 / 2), the kernel of Gaussian random Fourier features.
  static ShiftInvariantKernel gaussian_isotropic(double gamma, int dim);
  static ShiftInvariantKernel matern(double nu, Eigen::MatrixXd sigma);
  static ShiftInvariantKernel laplace(int dim);

  const Family& family() const { return family_; }
  int dim() const;
  std::string name() const;
  double kappa0() const { return 1.0; }

  double kappa(const Eigen::VectorXd& delta) const;
  double operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    return kappa(x - y);
  }

  /// Normalized Fourier transform p_w of kappa.
  WeightDistribution spectral() const;

 private:
  explicit ShiftInvariantKernel(Family f) : family_(std::move(f)) {}
  Family family_;
};

/// 2^(1-nu)/Gamma(nu) z^nu K_nu(z), with the value 1 substituted for z < 1e-8.
double matern_profile(double nu, double z);

/// Parses the Sigma syntax "identity", "diag:a,b,...", "file:PATH".
Eigen::MatrixXd parse_matrix_spec(const std::string& text, int dim);

}  // namespace lipfm
