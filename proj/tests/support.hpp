// support.hpp - Seeded random-state helpers shared across test files.
#pragma once

#include <complex>
#include <random>

#include "qres/density_matrix.hpp"

namespace qres::test {

inline Matrix4c random_ginibre(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix4c g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = complexd(n(rng), n(rng));
  return g;
}

// Full-rank mixed state, distributed via the Hilbert-Schmidt measure.
inline DensityMatrix4 random_density_matrix(std::mt19937_64& rng) {
  Matrix4c g = random_ginibre(rng);
  Matrix4c rho = g * g.adjoint();
  rho /= rho.trace();
  return DensityMatrix4{rho, false};
}

inline DensityMatrix4 random_pure_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector4c psi;
  for (int i = 0; i < 4; ++i) psi(i) = complexd(n(rng), n(rng));
  return DensityMatrix4::pure(psi);
}

}  // namespace qres::test
