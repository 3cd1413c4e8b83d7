#include "anchor/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace anchor {

NoiseKind noise_kind_from_name(const std::string& name) {
  if (name == "gaussian") return NoiseKind::kGaussian;
  if (name == "uniform") return NoiseKind::kUniform;
  if (name == "rademacher") return NoiseKind::kRademacher;
  throw std::invalid_argument("unknown noise kind '" + name +
                              "' (expected gaussian, uniform, or rademacher)");
}

const char* noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kGaussian: return "gaussian";
    case NoiseKind::kUniform: return "uniform";
    case NoiseKind::kRademacher: return "rademacher";
  }
  return "?";
}

namespace {

// splitmix64 finalizer; decorrelates consecutive stream indices.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix64(base ^ mix64(stream));
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(base, a), b);
}

NoiseSampler::NoiseSampler(NoiseKind kind, std::uint64_t seed)
    : kind_(kind),
      gen_(seed),
      // half-width sqrt(3) gives unit variance
      uniform_(-std::sqrt(3.0), std::sqrt(3.0)) {}

double NoiseSampler::draw() {
  switch (kind_) {
    case NoiseKind::kGaussian: return normal_(gen_);
    case NoiseKind::kUniform: return uniform_(gen_);
    case NoiseKind::kRademacher: return (gen_() & 1) ? 1.0 : -1.0;
  }
  return 0.0;
}

Matrix NoiseSampler::draw_matrix(Eigen::Index rows, Eigen::Index cols) {
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = draw();
  }
  return out;
}

Vector NoiseSampler::draw_vector(Eigen::Index size) {
  Vector out(size);
  for (Eigen::Index i = 0; i < size; ++i) out(i) = draw();
  return out;
}

}  // namespace anchor
