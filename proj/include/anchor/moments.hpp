#pragma once

#include <optional>

#include "anchor/dataset.hpp"
#include "anchor/linalg.hpp"

namespace anchor {

// Which auxiliary variable a moment block or penalty refers to.
enum class AuxKind { kAnchor, kProxyW, kProxyZ };

const char* aux_name(AuxKind kind);

// Second-moment blocks of one auxiliary variable V against (X, Y).
struct AuxBlock {
  Matrix sxv;  // E[X V^T]
  Vector syv;  // E[V Y]
  Matrix svv;  // E[V V^T]
  Vector mean; // sample mean of V; zero-sized when moments are uncentered
};

// Second moments of (X, Y) plus whatever auxiliaries the sample carries.
// Uncentered by default, matching the population formulas; when centered is
// set, every block is a covariance and the means are recorded so fitted
// predictors can carry an intercept.
struct MomentSet {
  Matrix sxx;
  Vector sxy;
  double syy = 0.0;
  std::optional<AuxBlock> a;
  std::optional<AuxBlock> w;
  std::optional<AuxBlock> z;
  Matrix szw;  // E[Z W^T]; zero-sized unless both proxies are present

  Vector mean_x;  // zero-sized when uncentered
  double mean_y = 0.0;
  std::size_t n = 0;
  bool centered = false;

  Eigen::Index d_x() const { return sxx.rows(); }
  bool has(AuxKind kind) const;
  const AuxBlock& aux(AuxKind kind) const;  // throws std::invalid_argument if absent
};

// Sample moments with divisor n. Centered mode subtracts sample means and
// records them.
MomentSet moments_from_data(const Dataset& data, bool centered = false);

}  // namespace anchor
