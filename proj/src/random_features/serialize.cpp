#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "lipfm/error.hpp"
#include "lipfm/random_features.hpp"

namespace lipfm {

namespace {

static_assert(std::endian::native == std::endian::little,
              "feature-map files are written in native little-endian order");

constexpr std::array<char, 4> kMagic = {'R', 'F', 'M', '1'};

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    fail(ErrorKind::kIoError, "truncated feature-map file '" + path + "'");
  }
  return v;
}

}  // namespace

void write_feature_map(const RandomFeatureMap& fm, const std::string& path) {
  const Activation& act = fm.activation();
  if (act.kind() == ActivationKind::kScaledCosine && act != Activation::scaled_cosine(1.0)) {
    fail(ErrorKind::kInvalidArgument, "only the kappa0 = 1 cosine activation can be serialized");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIoError, "cannot open '" + path + "' for writing");
  out.write(kMagic.data(), kMagic.size());
  put<std::uint64_t>(out, fm.n_features());
  put<std::uint64_t>(out, static_cast<std::uint64_t>(fm.dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(act.kind()));
  put<std::uint64_t>(out, fm.source().seed);
  out.write(reinterpret_cast<const char*>(fm.weights().data()),
            static_cast<std::streamsize>(fm.weights().size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(fm.biases().data()),
            static_cast<std::streamsize>(fm.biases().size() * sizeof(double)));
  if (!out) fail(ErrorKind::kIoError, "write to '" + path + "' failed");
}

RandomFeatureMap read_feature_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIoError, "cannot open '" + path + "'");
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    fail(ErrorKind::kIoError, "'" + path + "' is not an RFM1 feature-map file");
  }
  const auto n = get<std::uint64_t>(in, path);
  const auto d = get<std::uint64_t>(in, path);
  const auto act_id = get<std::uint32_t>(in, path);
  const auto seed = get<std::uint64_t>(in, path);
  if (n == 0 || d == 0 || n > (1ull << 32) || d > (1ull << 20)) {
    fail(ErrorKind::kIoError, "implausible feature-map header in '" + path + "'");
  }
  Activation act = Activation::identity();
  switch (static_cast<ActivationKind>(act_id)) {
    case ActivationKind::kIdentity: act = Activation::identity(); break;
    case ActivationKind::kRelu: act = Activation::relu(); break;
    case ActivationKind::kTanh: act = Activation::tanh(); break;
    case ActivationKind::kScaledCosine: act = Activation::scaled_cosine(1.0); break;
    default: fail(ErrorKind::kIoError, "unknown activation id in '" + path + "'");
  }
  RowMatrix w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::VectorXd b(static_cast<Eigen::Index>(n));
  if (!in.read(reinterpret_cast<char*>(w.data()), static_cast<std::streamsize>(n * d * sizeof(double))) ||
      !in.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(n * sizeof(double)))) {
    fail(ErrorKind::kIoError, "truncated feature-map file '" + path + "'");
  }
  FeatureSource src;
  src.seed = seed;
  return RandomFeatureMap(std::move(w), std::move(b), act, std::move(src));
}

}  // namespace lipfm
