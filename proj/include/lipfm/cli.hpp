#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lipfm/error.hpp"

namespace lipfm::cli {

/// Every knob of the `lipfm` command line. Values left at their defaults mean
/// "not given"; empty strings for activation/bias/kernel are resolved per command.
struct RunConfig {
  std::string command;

  // feature law
  std::string activation;  // relu | tanh | identity | cos; default relu
  double gamma = 1.0;
  std::string bias;        // uniform:a:b | gaussian:sd | point:0; default gaussian:1
  std::string kernel;      // gaussian | matern | laplace
  double nu = 2.0;
  std::string sigma = "identity";
  int dim = 1;

  // numerics
  int orders = 64;
  double tol = 1e-8;
  double r_min = 0.0;
  double r_max = -1.0;  // <= r_min selects 10 gamma (1 + sd(b))
  double h = 1e-4;

  // experiments
  std::uint64_t seed = 0;
  std::size_t n = 1024;
  std::string n_list = "16,32,64,128,256,512,1024,2048,4096";
  std::size_t realizations = 3000;
  double delta = 0.9;
  std::string grid = "default";  // default | lattice:lo:hi:k
  int pairs = 10;
  std::size_t mc_samples = 1000000;
  bool nested = false;
  int threads = 0;

  // outputs
  std::string out;
  std::string log;
  std::string svg;
  std::string save_map;
  std::string load_map;

  bool dump_config = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Flags override config-file values, which override defaults. The config file
/// (--config PATH) holds "key = value" lines with '#' comments; keys are flag
/// names without the leading dashes. Throws Error(kUsage) naming the bad key.
RunConfig parse_config(const std::vector<std::string>& args);

/// The parsed --n-list values.
std::vector<std::size_t> n_list_values(const RunConfig& cfg);

/// Config-file text that parses back to `cfg`.
std::string dump_config(const RunConfig& cfg);

std::string usage_text();

/// 0 ok, 2 configuration/usage, 3 io, 4 numerical failure, 5 hypothesis violation.
int exit_status(ErrorKind kind);

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Whole program: parse, then run. `args` excludes the program name.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lipfm::cli
