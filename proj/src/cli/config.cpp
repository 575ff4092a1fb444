#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "lipfm/cli.hpp"
#include "lipfm/kernels.hpp"
#include "lipfm/numerics.hpp"

namespace lipfm::cli {

namespace {

const std::vector<std::string> kCommands = {"analytic",           "shift-invariant", "empirical",
                                            "quantile-sweep",     "kernel-convergence",
                                            "crosscheck"};

[[noreturn]] void usage_error(const std::string& key, const std::string& what) {
  fail(ErrorKind::kUsage, "--" + key + ": " + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string real_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void bind_options(CLI::App& app, RunConfig& c, std::string& config_path) {
  auto last = [](CLI::Option* o) { o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast); };
  app.add_option("command", c.command, "analytic | shift-invariant | empirical | quantile-sweep | "
                                       "kernel-convergence | crosscheck");
  last(app.add_option("--config", config_path, "key = value file; flags override it"));
  last(app.add_option("--activation", c.activation, "relu | tanh | identity | cos (default relu)"));
  last(app.add_option("--gamma", c.gamma, "weight scale of N(0, gamma^2 I)"));
  last(app.add_option("--bias", c.bias, "uniform:a:b | gaussian:sd | point:0 (default gaussian:1)"));
  last(app.add_option("--kernel", c.kernel, "gaussian | matern | laplace"));
  last(app.add_option("--nu", c.nu, "Matern smoothness"));
  last(app.add_option("--sigma", c.sigma, "identity | diag:a,b,... | file:PATH"));
  last(app.add_option("--dim", c.dim, "input dimension"));
  last(app.add_option("--orders", c.orders, "starting quadrature order (8..256)"));
  last(app.add_option("--tol", c.tol, "radial maximization tolerance"));
  last(app.add_option("--r-min", c.r_min, "radial search lower end"));
  last(app.add_option("--r-max", c.r_max, "radial search upper end (<= r-min: automatic)"));
  last(app.add_option("--h", c.h, "finite-difference step"));
  last(app.add_option("--seed", c.seed, "master seed"));
  last(app.add_option("--n", c.n, "number of random features"));
  last(app.add_option("--n-list", c.n_list, "comma-separated increasing feature counts"));
  last(app.add_option("--realizations", c.realizations, "independent maps per N"));
  last(app.add_option("--delta", c.delta, "quantile level in (0, 1)"));
  last(app.add_option("--grid", c.grid, "default | lattice:lo:hi:k"));
  last(app.add_option("--pairs", c.pairs, "points per axis of the kernel-convergence pair grid"));
  last(app.add_option("--mc-samples", c.mc_samples, "Monte-Carlo samples for crosscheck"));
  last(app.add_flag("--nested", c.nested, "share one feature stream across all N"));
  last(app.add_option("--threads", c.threads, "worker cap, 0 = runtime default"));
  last(app.add_option("--out", c.out, "CSV output path"));
  last(app.add_option("--log", c.log, "JSON-lines progress log"));
  last(app.add_option("--svg", c.svg, "SVG chart path"));
  last(app.add_option("--save-map", c.save_map, "write the sampled feature map"));
  last(app.add_option("--load-map", c.load_map, "read a feature map instead of sampling"));
  app.add_flag("--dump-config", c.dump_config, "print the resolved configuration and exit");
}

std::vector<std::string> file_tokens(const std::string& path, std::string& file_command) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIoError, "cannot open config file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::kUsage, path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "command") {
      file_command = value;
    } else if (key == "nested") {
      tokens.push_back("--nested=" + value);
    } else if (key == "config" || key == "dump-config" || key.empty()) {
      fail(ErrorKind::kUsage, "unknown key '" + key + "' in config file " + path);
    } else {
      tokens.push_back("--" + key);
      tokens.push_back(value);
    }
  }
  return tokens;
}

std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (item.empty() || pos != item.size() || item[0] == '-' || v == 0) {
      usage_error("n-list", "'" + item + "' is not a positive integer");
    }
    if (!out.empty() && v <= out.back()) usage_error("n-list", "values must strictly increase");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) usage_error("n-list", "empty list");
  return out;
}

void validate(const RunConfig& c) {
  if (c.command.empty()) fail(ErrorKind::kUsage, "missing command");
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
    fail(ErrorKind::kUsage, "unknown command '" + c.command + "'");
  }
  if (!c.kernel.empty()) {
    if (c.kernel != "gaussian" && c.kernel != "matern" && c.kernel != "laplace") {
      usage_error("kernel", "unknown kernel '" + c.kernel + "'");
    }
    if (!c.activation.empty() || !c.bias.empty()) {
      usage_error("kernel", "conflicting kernel specs: a kernel fixes its own activation and bias");
    }
  }
  if (!c.activation.empty()) {
    try {
      (void)Activation::from_name(c.activation);
    } catch (const Error& e) {
      usage_error("activation", e.what());
    }
  }
  if (!c.bias.empty()) {
    try {
      (void)BiasDistribution::parse(c.bias);
    } catch (const Error& e) {
      usage_error("bias", e.what());
    }
  }
  if (c.sigma.rfind("file:", 0) != 0) {
    try {
      (void)parse_matrix_spec(c.sigma, std::max(c.dim, 1));
    } catch (const Error& e) {
      usage_error("sigma", e.what());
    }
  }
  if (!(c.gamma > 0.0) || !std::isfinite(c.gamma)) usage_error("gamma", "must be positive");
  if (!(c.nu > 0.0) || !std::isfinite(c.nu)) usage_error("nu", "must be positive");
  if (c.dim < 1) usage_error("dim", "must be at least 1");
  if (c.orders < 8 || c.orders > kMaxQuadratureOrder) usage_error("orders", "must lie in 8..256");
  if (!(c.tol > 0.0)) usage_error("tol", "must be positive");
  if (!(c.h > 0.0)) usage_error("h", "must be positive");
  if (c.r_min < 0.0) usage_error("r-min", "must be non-negative");
  if (c.n < 1) usage_error("n", "must be at least 1");
  (void)parse_n_list(c.n_list);
  if (c.realizations < 1) usage_error("realizations", "must be at least 1");
  if (!(c.delta > 0.0 && c.delta < 1.0)) usage_error("delta", "must lie in (0, 1)");
  if (c.pairs < 2) usage_error("pairs", "must be at least 2");
  if (c.mc_samples < 2) usage_error("mc-samples", "must be at least 2");
  if (c.threads < 0) usage_error("threads", "must be non-negative");
  if (c.grid != "default") {
    double lo = 0, hi = 0;
    int k = 0;
    char tail = 0;
    if (std::sscanf(c.grid.c_str(), "lattice:%lf:%lf:%d%c", &lo, &hi, &k, &tail) != 3 ||
        !(lo < hi) || k < 1) {
      usage_error("grid", "expected 'default' or 'lattice:lo:hi:k' with lo < hi, k >= 1");
    }
  }
}

}  // namespace

std::vector<std::size_t> n_list_values(const RunConfig& cfg) { return parse_n_list(cfg.n_list); }

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  std::string config_path;

  // First pass finds --config so file values can sit underneath the flags.
  {
    CLI::App probe;
    probe.allow_extras();
    probe.set_help_flag();
    probe.add_option("--config", config_path)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
      probe.parse(rev);
    } catch (const CLI::ParseError& e) {
      fail(ErrorKind::kUsage, e.what());
    }
  }

  std::vector<std::string> tokens;
  std::string file_command;
  if (!config_path.empty()) tokens = file_tokens(config_path, file_command);
  tokens.insert(tokens.end(), args.begin(), args.end());

  CLI::App app("lipfm");
  app.set_help_flag();
  std::string ignored_path;
  bind_options(app, cfg, ignored_path);
  std::vector<std::string> rev(tokens.rbegin(), tokens.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    fail(ErrorKind::kUsage, e.what());
  }
  if (cfg.command.empty()) cfg.command = file_command;
  validate(cfg);
  return cfg;
}

std::string dump_config(const RunConfig& c) {
  std::ostringstream o;
  o << "command = " << c.command << '\n'
    << "activation = " << c.activation << '\n'
    << "gamma = " << real_text(c.gamma) << '\n'
    << "bias = " << c.bias << '\n'
    << "kernel = " << c.kernel << '\n'
    << "nu = " << real_text(c.nu) << '\n'
    << "sigma = " << c.sigma << '\n'
    << "dim = " << c.dim << '\n'
    << "orders = " << c.orders << '\n'
    << "tol = " << real_text(c.tol) << '\n'
    << "r-min = " << real_text(c.r_min) << '\n'
    << "r-max = " << real_text(c.r_max) << '\n'
    << "h = " << real_text(c.h) << '\n'
    << "seed = " << c.seed << '\n'
    << "n = " << c.n << '\n'
    << "n-list = " << c.n_list << '\n'
    << "realizations = " << c.realizations << '\n'
    << "delta = " << real_text(c.delta) << '\n'
    << "grid = " << c.grid << '\n'
    << "pairs = " << c.pairs << '\n'
    << "mc-samples = " << c.mc_samples << '\n'
    << "nested = " << (c.nested ? "true" : "false") << '\n'
    << "threads = " << c.threads << '\n'
    << "out = " << c.out << '\n'
    << "log = " << c.log << '\n'
    << "svg = " << c.svg << '\n'
    << "save-map = " << c.save_map << '\n'
    << "load-map = " << c.load_map << '\n';
  return o.str();
}

std::string usage_text() {
  RunConfig c;
  std::string path;
  CLI::App app("Lipschitz constants of kernel feature maps", "lipfm");
  app.set_help_flag();
  bind_options(app, c, path);
  return app.help();
}

}  // namespace lipfm::cli
