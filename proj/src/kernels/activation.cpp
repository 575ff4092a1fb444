#include <cmath>

#include "lipfm/error.hpp"
#include "lipfm/kernels.hpp"

namespace lipfm {

Activation Activation::scaled_cosine(double kappa0) {
  if (!(kappa0 > 0.0)) fail(ErrorKind::kInvalidArgument, "kappa0 must be positive");
  return Activation(ActivationKind::kScaledCosine, std::sqrt(2.0 * kappa0));
}

Activation Activation::from_name(const std::string& name) {
  if (name == "identity") return identity();
  if (name == "relu") return relu();
  if (name == "tanh") return tanh();
  if (name == "cos" || name == "cosine") return scaled_cosine(1.0);
  fail(ErrorKind::kInvalidConfiguration, "unknown activation '" + name + "'");
}

std::string Activation::name() const {
  switch (kind_) {
    case ActivationKind::kIdentity: return "identity";
    case ActivationKind::kRelu: return "relu";
    case ActivationKind::kTanh: return "tanh";
    case ActivationKind::kScaledCosine: return "cos";
  }
  return "?";
}

std::vector<double> Activation::kinks() const {
  if (kind_ == ActivationKind::kRelu) return {0.0};
  return {};
}

}  // namespace lipfm
