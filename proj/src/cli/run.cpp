#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "lipfm/analytic.hpp"
#include "lipfm/cli.hpp"
#include "lipfm/experiments.hpp"
#include "lipfm/random_features.hpp"
#include "lipfm/rng.hpp"

namespace lipfm::cli {

namespace {

constexpr double kCrosscheckRelTol = 1e-2;
constexpr int kCrosscheckDraws = 20;

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Activation activation_of(const RunConfig& c) {
  return Activation::from_name(c.activation.empty() ? "relu" : c.activation);
}

BiasDistribution bias_of(const RunConfig& c) {
  return BiasDistribution::parse(c.bias.empty() ? "gaussian:1" : c.bias);
}

std::optional<ShiftInvariantKernel> kernel_of(const RunConfig& c) {
  if (c.kernel.empty()) return std::nullopt;
  if (c.kernel == "laplace") return ShiftInvariantKernel::laplace(c.dim);
  const Eigen::MatrixXd sigma = parse_matrix_spec(c.sigma, c.dim);
  if (c.kernel == "gaussian") return ShiftInvariantKernel::gaussian(sigma);
  return ShiftInvariantKernel::matern(c.nu, sigma);
}

FeatureSpec features_of(const RunConfig& c) {
  if (const auto k = kernel_of(c)) return rff_features(*k);
  return {activation_of(c), WeightDistribution::isotropic_gaussian(c.gamma, c.dim), bias_of(c)};
}

RadialOptions radial_options(const RunConfig& c) {
  RadialOptions o;
  o.tol = c.tol;
  o.orders = {c.orders, c.orders};
  if (c.r_max > c.r_min) o.r_domain = Interval{c.r_min, c.r_max};
  return o;
}

LipschitzReport reference_lipschitz(const RunConfig& c) {
  if (const auto k = kernel_of(c)) return shift_invariant_lipschitz(*k);
  return rnn_lipschitz(activation_of(c), c.gamma, bias_of(c), radial_options(c));
}

std::vector<Eigen::VectorXd> grid_of(const RunConfig& c) {
  if (c.grid == "default") {
    if (c.dim == 1) return default_grid_1d();
    int per_axis = static_cast<int>(std::floor(std::pow(double(kMaxGridPoints), 1.0 / c.dim) + 1e-9));
    while (std::pow(double(per_axis), c.dim) > double(kMaxGridPoints)) --per_axis;
    return lattice_grid(-1.0, 1.0, std::max(per_axis, 1), c.dim);
  }
  double lo = 0, hi = 0;
  int k = 0;
  std::sscanf(c.grid.c_str(), "lattice:%lf:%lf:%d", &lo, &hi, &k);
  return lattice_grid(lo, hi, k, c.dim);
}

void write_report_csv(const RunConfig& c, const std::vector<LipschitzReport>& reports) {
  if (c.out.empty()) return;
  std::string text = std::string(kReportCsvHeader) + "\n";
  for (const auto& r : reports) text += to_csv_row(r) + "\n";
  write_text_file(c.out, text);
}

void print_report(std::ostream& out, const LipschitzReport& r) {
  if (!r.finite()) {
    out << "Lip = +inf (divergent: infinite second moment)\n";
    return;
  }
  out << "Lip = " << num(r.value) << '\n' << "method = " << to_string(r.method) << '\n';
  if (r.argmax_r) out << "argmax_r = " << num(*r.argmax_r) << '\n';
  out << "error_estimate = " << num(r.error_estimate) << '\n';
}

int cmd_analytic(const RunConfig& c, std::ostream& out) {
  if (const auto k = kernel_of(c)) {
    const LipschitzReport r = shift_invariant_lipschitz(*k);
    print_report(out, r);
    write_report_csv(c, {r});
    return 0;
  }
  const Activation act = activation_of(c);
  const LipschitzReport r = rnn_lipschitz(act, c.gamma, bias_of(c), radial_options(c));
  const LipschitzReport ub =
      moment_upper_bound(act, WeightDistribution::isotropic_gaussian(c.gamma, c.dim));
  print_report(out, r);
  out << "upper_bound = " << num(ub.value) << '\n';
  write_report_csv(c, {r, ub});
  return 0;
}

int cmd_shift_invariant(const RunConfig& c, std::ostream& out) {
  const auto k = kernel_of(c);
  if (!k) fail(ErrorKind::kInvalidConfiguration, "shift-invariant needs --kernel");
  const LipschitzReport r = shift_invariant_lipschitz(*k);
  out << "kernel = " << k->name() << '\n';
  print_report(out, r);
  write_report_csv(c, {r});
  return 0;
}

int cmd_empirical(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const bool loaded = !c.load_map.empty();
  std::optional<RandomFeatureMap> fm;
  if (loaded) {
    fm = read_feature_map(c.load_map);
  } else {
    const FeatureSpec spec = features_of(c);
    fm = build_feature_map(spec.weights, spec.bias, spec.activation, c.n, c.seed);
  }
  if (!c.save_map.empty()) write_feature_map(*fm, c.save_map);
  RunConfig gc = c;
  gc.dim = fm->dim();
  const EmpiricalLipschitz e = empirical_lipschitz(*fm, grid_of(gc), true);
  out << "N = " << fm->n_features() << '\n' << "Lip_hat = " << num(e.value) << '\n' << "argmax =";
  for (Eigen::Index k = 0; k < e.argmax.size(); ++k) out << ' ' << num(e.argmax(k));
  out << '\n';
  if (!loaded) {
    try {
      const LipschitzReport r = reference_lipschitz(c);
      out << "Lip = " << num(r.value) << '\n';
      if (r.finite()) out << "Lip_hat - Lip = " << num(e.value - r.value) << '\n';
    } catch (const Error& ex) {
      err << "note: no reference constant (" << ex.what() << ")\n";
    }
  }
  if (!c.out.empty()) {
    write_text_file(c.out, "N,lip_hat,argmax_index\n" + std::to_string(fm->n_features()) + ',' +
                               format_real(e.value) + ',' + std::to_string(e.argmax_index) + '\n');
  }
  return 0;
}

int cmd_quantile_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const LipschitzReport ref = reference_lipschitz(c);
  const QuantileSweepConfig q{.features = features_of(c),
                              .n_list = n_list_values(c),
                              .realizations = c.realizations,
                              .delta = c.delta,
                              .grid = grid_of(c),
                              .seed = c.seed,
                              .lip_reference = ref.value,
                              .nested = c.nested,
                              .threads = c.threads};

  std::ofstream log;
  if (!c.log.empty()) {
    log.open(c.log, std::ios::trunc);
    if (!log) fail(ErrorKind::kIoError, "cannot open log '" + c.log + "'");
  }
  out << "lip_reference = " << num(ref.value) << '\n';
  const auto rows = quantile_sweep(q, [&](const SweepRow& row) {
    out << "N = " << row.n << "  t_hat = " << num(row.t_hat)
        << "  lip_hat_mean = " << num(row.lip_hat_mean) << "  lip_hat_sd = " << num(row.lip_hat_sd)
        << '\n';
    if (concentration_warning(row, q.lip_reference)) {
      err << "warning: N = " << row.n << " mean estimate exceeds the reference by more than 5 sd\n";
    }
    if (log.is_open()) {
      const nlohmann::json j = {{"N", row.n},
                                {"t_hat", row.t_hat},
                                {"quantile_index", row.quantile_index},
                                {"lip_hat_mean", row.lip_hat_mean},
                                {"lip_hat_sd", row.lip_hat_sd},
                                {"lip_reference", q.lip_reference}};
      log << j.dump() << '\n' << std::flush;
    }
  });
  if (!c.out.empty()) write_sweep_csv(rows, c.out);
  if (!c.svg.empty()) {
    ChartSeries s{"t_hat", {}, {}};
    for (const auto& r : rows) {
      s.x.push_back(static_cast<double>(r.n));
      s.y.push_back(r.t_hat);
    }
    write_text_file(c.svg, render_svg_chart("Empirical quantile of Lip(theta_N) - Lip", "N",
                                            "t_hat", {s}));
  }
  return 0;
}

int cmd_kernel_convergence(const RunConfig& c, std::ostream& out) {
  const FeatureSpec spec = features_of(c);
  std::vector<Eigen::VectorXd> points;
  if (c.grid == "default") {
    double total = std::pow(double(c.pairs), c.dim);
    if (total > double(kMaxGridPoints)) {
      fail(ErrorKind::kInvalidConfiguration, "pair grid exceeds 10^4 points");
    }
    points = lattice_grid(-1.0, 1.0, c.pairs, c.dim);
  } else {
    points = grid_of(c);
  }
  const auto rows = kernel_convergence_sweep(spec, n_list_values(c), points, c.seed);
  for (const auto& r : rows) out << "N = " << r.n << "  sup_error = " << num(r.sup_error) << '\n';
  if (rows.size() >= 2) out << "loglog_slope = " << num(loglog_slope(rows)) << '\n';
  if (!c.out.empty()) write_convergence_csv(rows, c.out);
  if (!c.svg.empty()) {
    ChartSeries s{"sup_error", {}, {}};
    for (const auto& r : rows) {
      s.x.push_back(static_cast<double>(r.n));
      s.y.push_back(r.sup_error);
    }
    write_text_file(c.svg, render_svg_chart("Uniform kernel approximation error", "N",
                                            "sup |k_N - k|", {s}));
  }
  return 0;
}

Eigen::VectorXd normal_vector(CounterStream& s, int dim) {
  Eigen::VectorXd v(dim);
  for (int k = 0; k < dim; ++k) v(k) = s.normal();
  return v;
}

int cmd_crosscheck(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const std::uint64_t stream = derive_stream(c.seed, {0x78636865ull});
  if (const auto k = kernel_of(c)) {
    const LipschitzReport cov = shift_invariant_lipschitz(*k);
    if (!cov.finite()) {
      out << "spectral-covariance = +inf (divergent: infinite second moment)\n";
      return 0;
    }
    const LipschitzReport hess = hessian_lipschitz_oracle(*k, c.h);
    const ShiftInvariantKernel kernel = *k;
    const KernelFunction kf = [&kernel](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
      return kernel(x, y);
    };
    double diag = 0.0;
    for (int i = 0; i < kCrosscheckDraws; ++i) {
      CounterStream s(stream, static_cast<std::uint64_t>(i));
      const Eigen::VectorXd x = normal_vector(s, c.dim);
      const Eigen::VectorXd z = normal_vector(s, c.dim).normalized();
      diag = std::max(diag, diagonal_curvature_oracle(kf, x, z, c.h));
    }
    const double gap = std::max({std::abs(hess.value - cov.value), std::abs(diag - cov.value)}) /
                       cov.value;
    out << to_string(LipschitzMethod::kSpectralCovariance) << " = " << num(cov.value) << '\n'
        << to_string(LipschitzMethod::kHessianFd) << " = " << num(hess.value) << '\n'
        << "diagonal-curvature = " << num(diag) << '\n'
        << "max_relative_gap = " << num(gap) << '\n';
    if (gap > kCrosscheckRelTol) {
      err << "error: oracles disagree beyond " << kCrosscheckRelTol << " relative\n";
      return exit_status(ErrorKind::kNumericalFailure);
    }
    out << "agree = yes\n";
    return 0;
  }

  const Activation act = activation_of(c);
  const BiasDistribution bias = bias_of(c);
  const LipschitzReport rad = rnn_lipschitz(act, c.gamma, bias, radial_options(c));
  const LipschitzReport ub =
      moment_upper_bound(act, WeightDistribution::isotropic_gaussian(c.gamma, c.dim));
  out << to_string(rad.method) << " = " << num(rad.value) << '\n'
      << to_string(ub.method) << " = " << num(ub.value) << '\n';
  bool ok = ub.value >= rad.value - rad.error_estimate;
  double worst_z = 0.0;
  for (int i = 0; i < 5; ++i) {
    CounterStream s(stream, static_cast<std::uint64_t>(i));
    const Eigen::VectorXd x = normal_vector(s, c.dim);
    const Eigen::VectorXd z = normal_vector(s, c.dim);
    const VarianceCheck v = variance_decomposition_check(
        act, c.gamma, bias, x, z, c.mc_samples, derive_stream(c.seed, {static_cast<std::uint64_t>(i)}));
    const double zscore = std::abs(v.lhs - v.rhs) / std::max(v.lhs_standard_error, 1e-300);
    worst_z = std::max(worst_z, zscore);
    out << "variance pair " << i << ": lhs = " << num(v.lhs) << " +- " << num(v.lhs_standard_error)
        << "  rhs = " << num(v.rhs) << '\n';
  }
  out << "max_standard_errors = " << num(worst_z) << '\n';
  ok = ok && worst_z <= 3.0;
  if (!ok) {
    err << "error: crosscheck failed\n";
    return exit_status(ErrorKind::kNumericalFailure);
  }
  out << "agree = yes\n";
  return 0;
}

}  // namespace

int exit_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIoError: return 3;
    case ErrorKind::kNumericalFailure:
    case ErrorKind::kEvaluationFailure: return 4;
    case ErrorKind::kHypothesisViolation: return 5;
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kUnsupportedDistribution:
    case ErrorKind::kInvalidConfiguration:
    case ErrorKind::kUsage: return 2;
  }
  return 2;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.dump_config) {
      out << dump_config(cfg);
      return 0;
    }
    if (cfg.command == "analytic") return cmd_analytic(cfg, out);
    if (cfg.command == "shift-invariant") return cmd_shift_invariant(cfg, out);
    if (cfg.command == "empirical") return cmd_empirical(cfg, out, err);
    if (cfg.command == "quantile-sweep") return cmd_quantile_sweep(cfg, out, err);
    if (cfg.command == "kernel-convergence") return cmd_kernel_convergence(cfg, out);
    if (cfg.command == "crosscheck") return cmd_crosscheck(cfg, out, err);
    fail(ErrorKind::kUsage, "unknown command '" + cfg.command + "'");
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_status(e.kind());
  }
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << usage_text();
    return 2;
  }
  if (std::find(args.begin(), args.end(), "--help") != args.end() ||
      std::find(args.begin(), args.end(), "-h") != args.end()) {
    out << usage_text();
    return 0;
  }
  RunConfig cfg;
  try {
    cfg = parse_config(args);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_status(e.kind());
  }
  return run(cfg, out, err);
}

}  // namespace lipfm::cli
