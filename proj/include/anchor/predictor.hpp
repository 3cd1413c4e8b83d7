#pragma once

#include <limits>
#include <optional>
#include <string>

#include "anchor/linalg.hpp"

namespace anchor {

enum class Method { kOls, kAnchor, kPar, kXpar, kTar, kPtar, kXtar };

const char* method_name(Method method);
Method method_from_name(const std::string& name);

// Affine map recorded when a fit ran on standardized columns, so predictions
// can be made from (and reported in) original units.
struct Standardization {
  Vector x_mean;
  Vector x_scale;
  double y_mean = 0.0;
  double y_scale = 1.0;
};

// y_hat = gamma^T x + alpha, plus the metadata needed to reproduce the fit.
struct LinearPredictor {
  Vector gamma;
  double alpha = 0.0;
  Method method = Method::kOls;

  // Penalty weight for anchor/par/xpar fits; NaN for ols and targeted fits.
  double lambda = std::numeric_limits<double>::quiet_NaN();

  // Intervention target for tar/ptar/xtar fits, as supplied to the fitter.
  Vector target_mean;
  Matrix target_cov;

  std::optional<Standardization> standardization;

  // Set when the normal equations were solved through a pseudo-inverse
  // because the system was ill-conditioned.
  bool pseudo_inverse = false;
};

}  // namespace anchor
