#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace lipfm {

/// Philox4x32-10 block function (Salmon et al., Random123). Pure; no state.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Hash a master seed and an index path into a 64-bit stream id.
/// Streams for different paths are statistically independent.
std::uint64_t derive_stream(std::uint64_t seed,
                            std::initializer_list<std::uint64_t> path);

/// Sequential reader over one row of a counter-based stream.
///
/// The counter is (row, block); each block yields 128 random bits. A row is
/// the unit of reproducibility: feature i of a map is always drawn from row i,
/// so maps of different widths share their prefix.
class CounterStream {
 public:
  CounterStream(std::uint64_t stream, std::uint64_t row);

  std::uint64_t next_u64();

  /// Uniform on (0, 1], 53-bit resolution.
  double uniform();

  /// Standard normal by Box-Muller; consumes exactly one 128-bit block.
  double normal();

  /// Gamma(shape, 1) by Marsaglia-Tsang; variable consumption.
  double gamma(double shape);

  /// Chi-square with `dof` degrees of freedom.
  double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t row_;
  std::uint32_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

}  // namespace lipfm
