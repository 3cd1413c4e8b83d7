#include "anchor/moments.hpp"

#include <stdexcept>

namespace anchor {

const char* aux_name(AuxKind kind) {
  switch (kind) {
    case AuxKind::kAnchor: return "A";
    case AuxKind::kProxyW: return "W";
    case AuxKind::kProxyZ: return "Z";
  }
  return "?";
}

bool MomentSet::has(AuxKind kind) const {
  switch (kind) {
    case AuxKind::kAnchor: return a.has_value();
    case AuxKind::kProxyW: return w.has_value();
    case AuxKind::kProxyZ: return z.has_value();
  }
  return false;
}

const AuxBlock& MomentSet::aux(AuxKind kind) const {
  const std::optional<AuxBlock>* block = nullptr;
  switch (kind) {
    case AuxKind::kAnchor: block = &a; break;
    case AuxKind::kProxyW: block = &w; break;
    case AuxKind::kProxyZ: block = &z; break;
  }
  if (block == nullptr || !block->has_value()) {
    throw std::invalid_argument(std::string("moment set has no ") + aux_name(kind) + " block");
  }
  return **block;
}

MomentSet moments_from_data(const Dataset& data, bool centered) {
  const Eigen::Index n = data.n();
  if (n == 0) throw std::invalid_argument("moments_from_data: empty dataset");
  const double inv_n = 1.0 / static_cast<double>(n);

  MomentSet m;
  m.n = static_cast<std::size_t>(n);
  m.centered = centered;

  Matrix x = data.x;
  Vector y = data.y;
  if (centered) {
    m.mean_x = x.colwise().mean();
    m.mean_y = y.mean();
    x.rowwise() -= m.mean_x.transpose();
    y.array() -= m.mean_y;
  }
  m.sxx = x.transpose() * x * inv_n;
  m.sxy = x.transpose() * y * inv_n;
  m.syy = y.dot(y) * inv_n;

  auto make_block = [&](const Matrix& v_raw) {
    AuxBlock block;
    Matrix v = v_raw;
    if (centered) {
      block.mean = v.colwise().mean();
      v.rowwise() -= block.mean.transpose();
    }
    block.sxv = x.transpose() * v * inv_n;
    block.syv = v.transpose() * y * inv_n;
    block.svv = v.transpose() * v * inv_n;
    return block;
  };
  if (data.has_a()) m.a = make_block(data.a);
  if (data.has_w()) m.w = make_block(data.w);
  if (data.has_z()) m.z = make_block(data.z);
  if (data.has_w() && data.has_z()) {
    Matrix wc = data.w;
    Matrix zc = data.z;
    if (centered) {
      wc.rowwise() -= m.w->mean.transpose();
      zc.rowwise() -= m.z->mean.transpose();
    }
    m.szw = zc.transpose() * wc * inv_n;
  }
  return m;
}

}  // namespace anchor
