#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lipfm/kernels.hpp"

namespace lipfm {

/// A neuron law: phi(w, b; x) = sigma(w . x + b) with (w, b) ~ weights (x) bias.
struct FeatureSpec {
  Activation activation;
  WeightDistribution weights;
  BiasDistribution bias;
};

/// Random Fourier features of a shift-invariant kernel.
FeatureSpec rff_features(const ShiftInvariantKernel& kernel);

/// The closed-form kernel E[phi(x) phi(x')] when one is known (cosine features
/// with uniform phase over a catalogue spectral law).
std::optional<ShiftInvariantKernel> closed_form_kernel(const FeatureSpec& spec);

struct QuantileSweepConfig {
  FeatureSpec features;
  std::vector<std::size_t> n_list;
  std::size_t realizations = 300;
  double delta = 0.9;
  std::vector<Eigen::VectorXd> grid;
  std::uint64_t seed = 0;
  double lip_reference = 0.0;
  /// Realization i draws its features from one stream shared by every N, so
  /// the map at N is a prefix of the map at any larger N.
  bool nested = false;
  /// OpenMP worker cap; 0 keeps the runtime default. Never changes results.
  int threads = 0;
};

struct SweepRow {
  std::size_t n = 0;
  double t_hat = 0.0;
  std::size_t quantile_index = 0;  // 1-based order statistic
  double lip_hat_mean = 0.0;
  double lip_hat_sd = 0.0;
  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// ceil(delta * count), with delta * count within 1e-9 of an integer treated as it.
std::size_t quantile_index(double delta, std::size_t count);

/// Stream id of realization i at width n.
std::uint64_t realization_stream(const QuantileSweepConfig& cfg, std::size_t n, std::size_t i);

/// Summary row from the per-realization estimates at width n.
SweepRow summarize(std::size_t n, std::vector<double> lip_hats, double delta, double lip_reference);

using RowCallback = std::function<void(const SweepRow&)>;

/// OpenMP over realizations; rows are bit-identical for every thread count.
std::vector<SweepRow> quantile_sweep(const QuantileSweepConfig& cfg, const RowCallback& on_row = {});

/// Single-threaded, using the Jacobian/spectral-norm reference estimator.
std::vector<SweepRow> quantile_sweep_reference(const QuantileSweepConfig& cfg);

/// True when lip_hat_mean exceeds lip_reference by more than 5 standard deviations.
bool concentration_warning(const SweepRow& row, double lip_reference);

struct ConvergenceRow {
  std::size_t n = 0;
  double sup_error = 0.0;
};

/// sup over all pairs of `points` of |k_N(x, x') - k(x, x')|, one nested draw
/// shared across every N.
std::vector<ConvergenceRow> kernel_convergence_sweep(const FeatureSpec& spec,
                                                     const std::vector<std::size_t>& n_list,
                                                     const std::vector<Eigen::VectorXd>& points,
                                                     std::uint64_t seed);

/// Least-squares slope of log(sup_error) against log(N).
double loglog_slope(const std::vector<ConvergenceRow>& rows);

inline constexpr const char* kSweepCsvHeader = "N,t_hat,quantile_index,lip_hat_mean,lip_hat_sd";
inline constexpr const char* kConvergenceCsvHeader = "N,sup_error";

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);
std::vector<SweepRow> read_sweep_csv(const std::string& path);
void write_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::string& path);

/// 17 significant digits, "inf"/"-inf"/"nan" for non-finite values.
std::string format_real(double v);

struct ChartSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Standalone SVG line chart with a log10 x axis, one polyline per series.
std::string render_svg_chart(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<ChartSeries>& series);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace lipfm
