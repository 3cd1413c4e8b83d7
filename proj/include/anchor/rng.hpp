#pragma once

#include <cstdint>
#include <random>

#include "anchor/linalg.hpp"

namespace anchor {

// Zero-mean, unit-variance noise families for simulation.
enum class NoiseKind { kGaussian, kUniform, kRademacher };

NoiseKind noise_kind_from_name(const std::string& name);
const char* noise_kind_name(NoiseKind kind);

// Mixes a base seed with a stream index so that replicate r of grid point g
// gets the same substream whether replicates run serially or in parallel.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

// Draws i.i.d. unit-variance entries from one engine, row-major fill order.
class NoiseSampler {
 public:
  NoiseSampler(NoiseKind kind, std::uint64_t seed);

  double draw();
  Matrix draw_matrix(Eigen::Index rows, Eigen::Index cols);
  Vector draw_vector(Eigen::Index size);

 private:
  NoiseKind kind_;
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_;
};

}  // namespace anchor
