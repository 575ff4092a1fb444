#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "lipfm/error.hpp"
#include "lipfm/kernels.hpp"
#include "lipfm/rng.hpp"

namespace lipfm {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double parse_real(const std::string& text, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    fail(ErrorKind::kInvalidConfiguration, "malformed number '" + text + "' in " + context);
  }
}

Eigen::MatrixXd checked_cholesky(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    fail(ErrorKind::kInvalidArgument, std::string(what) + " must be a square matrix");
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    fail(ErrorKind::kInvalidArgument, std::string(what) + " must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::kInvalidArgument, std::string(what) + " must be positive definite");
  }
  return llt.matrixL();
}

}  // namespace

// --- BiasDistribution -------------------------------------------------------

BiasDistribution BiasDistribution::uniform(double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    fail(ErrorKind::kInvalidArgument, "uniform bias needs finite lo < hi");
  }
  return BiasDistribution(BiasFamily::kUniform, lo, hi);
}

BiasDistribution BiasDistribution::uniform_phase() {
  return uniform(0.0, 2.0 * std::numbers::pi);
}

BiasDistribution BiasDistribution::gaussian(double stddev) {
  if (!(stddev > 0.0 && std::isfinite(stddev))) {
    fail(ErrorKind::kInvalidArgument, "gaussian bias needs a positive finite stddev");
  }
  return BiasDistribution(BiasFamily::kGaussian, stddev, 0.0);
}

BiasDistribution BiasDistribution::point_mass() {
  return BiasDistribution(BiasFamily::kPointMass, 0.0, 0.0);
}

BiasDistribution BiasDistribution::parse(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.empty()) fail(ErrorKind::kInvalidConfiguration, "empty bias specification");
  const std::string& fam = parts[0];
  if (fam == "uniform" && parts.size() == 3) {
    return uniform(parse_real(parts[1], "bias"), parse_real(parts[2], "bias"));
  }
  if (fam == "gaussian" && parts.size() == 2) return gaussian(parse_real(parts[1], "bias"));
  if (fam == "point" && parts.size() <= 2) {
    if (parts.size() == 2 && parse_real(parts[1], "bias") != 0.0) {
      fail(ErrorKind::kUnsupportedDistribution, "only point:0 is supported");
    }
    return point_mass();
  }
  fail(ErrorKind::kInvalidConfiguration,
       "malformed bias '" + text + "' (expected uniform:a:b, gaussian:sd or point:0)");
}

double BiasDistribution::stddev() const {
  switch (family_) {
    case BiasFamily::kUniform: return (p1_ - p0_) / std::sqrt(12.0);
    case BiasFamily::kGaussian: return p0_;
    case BiasFamily::kPointMass: return 0.0;
  }
  return 0.0;
}

double BiasDistribution::sample(CounterStream& stream) const {
  switch (family_) {
    case BiasFamily::kUniform: return p0_ + (p1_ - p0_) * stream.uniform();
    case BiasFamily::kGaussian: return p0_ * stream.normal();
    case BiasFamily::kPointMass: return 0.0;
  }
  return 0.0;
}

std::string BiasDistribution::to_string() const {
  std::ostringstream out;
  out.precision(17);
  switch (family_) {
    case BiasFamily::kUniform: out << "uniform:" << p0_ << ':' << p1_; break;
    case BiasFamily::kGaussian: out << "gaussian:" << p0_; break;
    case BiasFamily::kPointMass: out << "point:0"; break;
  }
  return out.str();
}

// --- WeightDistribution -----------------------------------------------------

double DiscreteSpectrum::lambda(std::size_t n) const {
  const double t = (static_cast<double>(n) - 0.5) * std::numbers::pi;
  return 1.0 / (t * t);
}

WeightDistribution::WeightDistribution(Family f) : family_(std::move(f)) {
  if (const auto* g = std::get_if<GaussianCov>(&family_)) {
    chol_ = checked_cholesky(g->sigma, "gaussian covariance");
  } else if (const auto* t = std::get_if<StudentT>(&family_)) {
    chol_ = checked_cholesky(t->scale, "student-t scale");
  }
}

WeightDistribution WeightDistribution::isotropic_gaussian(double gamma, int dim) {
  if (!(gamma > 0.0) || dim < 1) {
    fail(ErrorKind::kInvalidArgument, "isotropic gaussian needs gamma > 0 and dim >= 1");
  }
  return WeightDistribution(IsotropicGaussian{gamma, dim});
}

WeightDistribution WeightDistribution::gaussian_cov(Eigen::MatrixXd sigma) {
  return WeightDistribution(GaussianCov{std::move(sigma)});
}

WeightDistribution WeightDistribution::student_t(double nu, Eigen::MatrixXd scale) {
  if (!(nu > 0.0)) fail(ErrorKind::kInvalidArgument, "student-t needs nu > 0");
  return WeightDistribution(StudentT{nu, std::move(scale)});
}

WeightDistribution WeightDistribution::cauchy(int dim) {
  if (dim < 1) fail(ErrorKind::kInvalidArgument, "cauchy needs dim >= 1");
  return WeightDistribution(Cauchy{dim});
}

WeightDistribution WeightDistribution::discrete_spectrum(std::size_t terms) {
  return WeightDistribution(DiscreteSpectrum{terms});
}

int WeightDistribution::dim() const {
  struct {
    int operator()(const IsotropicGaussian& g) const { return g.dim; }
    int operator()(const GaussianCov& g) const { return static_cast<int>(g.sigma.rows()); }
    int operator()(const StudentT& t) const { return static_cast<int>(t.scale.rows()); }
    int operator()(const Cauchy& c) const { return c.dim; }
    int operator()(const DiscreteSpectrum&) const { return 1; }
  } visitor;
  return std::visit(visitor, family_);
}

std::string WeightDistribution::name() const {
  struct {
    std::string operator()(const IsotropicGaussian&) const { return "isotropic-gaussian"; }
    std::string operator()(const GaussianCov&) const { return "gaussian-cov"; }
    std::string operator()(const StudentT&) const { return "student-t"; }
    std::string operator()(const Cauchy&) const { return "cauchy"; }
    std::string operator()(const DiscreteSpectrum&) const { return "discrete-spectrum"; }
  } visitor;
  return std::visit(visitor, family_);
}

void WeightDistribution::sample(CounterStream& stream, std::span<double> out) const {
  const int d = dim();
  if (static_cast<int>(out.size()) != d) {
    fail(ErrorKind::kInvalidArgument, "weight buffer has the wrong dimension");
  }
  if (const auto* g = std::get_if<IsotropicGaussian>(&family_)) {
    for (int k = 0; k < d; ++k) out[k] = g->gamma * stream.normal();
    return;
  }
  if (std::holds_alternative<DiscreteSpectrum>(family_)) {
    fail(ErrorKind::kUnsupportedDistribution, "discrete-spectrum laws cannot be sampled");
  }

  Eigen::VectorXd z(d);
  for (int k = 0; k < d; ++k) z(k) = stream.normal();
  if (std::holds_alternative<GaussianCov>(family_)) {
    const Eigen::VectorXd w = chol_.triangularView<Eigen::Lower>() * z;
    for (int k = 0; k < d; ++k) out[k] = w(k);
    return;
  }
  // Student-t: Gaussian core divided by sqrt(chi2_{2nu} / 2nu). Cauchy is nu = 1/2.
  const double nu = std::holds_alternative<StudentT>(family_) ? std::get<StudentT>(family_).nu : 0.5;
  const double dof = 2.0 * nu;
  const double mix = std::sqrt(stream.chi_square(dof) / dof);
  if (std::holds_alternative<StudentT>(family_)) {
    const Eigen::VectorXd w = chol_.triangularView<Eigen::Lower>() * z;
    for (int k = 0; k < d; ++k) out[k] = w(k) / mix;
  } else {
    for (int k = 0; k < d; ++k) out[k] = z(k) / mix;
  }
}

MomentStatus second_moment_status(const WeightDistribution& dist) {
  struct {
    MomentStatus operator()(const IsotropicGaussian& g) const {
      return {g.gamma * g.gamma * Eigen::MatrixXd::Identity(g.dim, g.dim)};
    }
    MomentStatus operator()(const GaussianCov& g) const { return {g.sigma}; }
    MomentStatus operator()(const StudentT& t) const {
      if (!(t.nu > 1.0)) return {};
      return {(2.0 * t.nu / (2.0 * t.nu - 2.0)) * t.scale};
    }
    MomentStatus operator()(const Cauchy&) const { return {}; }
    // lambda_n times the squared eigenfunction slope is 2 for every n.
    MomentStatus operator()(const DiscreteSpectrum&) const { return {}; }
  } visitor;
  return std::visit(visitor, dist.family());
}

WeightSample sample_weights(const WeightDistribution& dist, const BiasDistribution& bias,
                            std::size_t n, std::uint64_t stream) {
  if (n < 1) fail(ErrorKind::kInvalidArgument, "sample_weights needs n >= 1");
  if (!dist.samplable()) {
    fail(ErrorKind::kUnsupportedDistribution, dist.name() + " cannot be sampled");
  }
  const int d = dist.dim();
  WeightSample out{RowMatrix(static_cast<Eigen::Index>(n), d),
                   Eigen::VectorXd(static_cast<Eigen::Index>(n))};
  for (std::size_t i = 0; i < n; ++i) {
    CounterStream row(stream, i);
    const auto r = static_cast<Eigen::Index>(i);
    dist.sample(row, std::span<double>(out.weights.row(r).data(), static_cast<std::size_t>(d)));
    out.biases(r) = bias.sample(row);
  }
  return out;
}

Eigen::MatrixXd parse_matrix_spec(const std::string& text, int dim) {
  if (dim < 1) fail(ErrorKind::kInvalidConfiguration, "dimension must be >= 1");
  if (text == "identity") return Eigen::MatrixXd::Identity(dim, dim);
  if (text.rfind("diag:", 0) == 0) {
    const auto parts = split(text.substr(5), ',');
    if (static_cast<int>(parts.size()) != dim) {
      fail(ErrorKind::kInvalidConfiguration,
           "sigma '" + text + "' has " + std::to_string(parts.size()) +
               " entries, expected " + std::to_string(dim));
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) m(i, i) = parse_real(parts[static_cast<std::size_t>(i)], "sigma");
    return m;
  }
  if (text.rfind("file:", 0) == 0) {
    const std::string path = text.substr(5);
    std::ifstream in(path);
    if (!in) fail(ErrorKind::kIoError, "cannot read sigma file '" + path + "'");
    std::vector<double> values;
    std::string tok;
    while (in >> tok) values.push_back(parse_real(tok, "sigma file"));
    if (values.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim)) {
      fail(ErrorKind::kInvalidConfiguration,
           "sigma file holds " + std::to_string(values.size()) + " values, expected " +
               std::to_string(dim * dim));
    }
    Eigen::MatrixXd m(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m(i, j) = values[static_cast<std::size_t>(i * dim + j)];
    return m;
  }
  fail(ErrorKind::kInvalidConfiguration,
       "malformed sigma '" + text + "' (expected identity, diag:a,b,... or file:PATH)");
}

}  // namespace lipfm
