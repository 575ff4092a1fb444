#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lipfm/rng.hpp"

namespace lipfm {

struct McEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Mean of `draw(stream)` over n samples, sample i taken from counter row i.
///
/// Samples are summed in fixed-size chunks whose partial sums are combined in
/// chunk order, so the result does not depend on the OpenMP thread count.
template <class Draw>
McEstimate monte_carlo_mean(std::size_t n, std::uint64_t stream, Draw&& draw) {
  constexpr std::size_t kChunk = 1 << 16;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> sums(chunks, 0.0), squares(chunks, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t end = std::min(n, begin + kChunk);
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      CounterStream row(stream, i);
      const double v = draw(row);
      s += v;
      s2 += v * v;
    }
    sums[static_cast<std::size_t>(c)] = s;
    squares[static_cast<std::size_t>(c)] = s2;
  }
  double s = 0.0, s2 = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    s += sums[c];
    s2 += squares[c];
  }
  McEstimate out;
  out.samples = n;
  out.mean = s / static_cast<double>(n);
  if (n > 1) {
    const double var = std::max(0.0, (s2 - s * out.mean) / static_cast<double>(n - 1));
    out.standard_error = std::sqrt(var / static_cast<double>(n));
  }
  return out;
}

}  // namespace lipfm
