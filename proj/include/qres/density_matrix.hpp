// density_matrix.hpp - Hermitian 4x4 states in the fixed energy basis, with validation helpers.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "qres/system.hpp"

namespace qres {

using complexd = std::complex<double>;
using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;

struct DensityMatrix4 {
  Matrix4c m{Matrix4c::Zero()};
  // True for states produced by the lowest-order propagator; such states may
  // dip below positivity by an amount quadratic in the largest coupling.
  bool approximate{false};

  complexd at(int i, int j) const {
    if (i < 1 || i > 4 || j < 1 || j > 4)
      throw std::out_of_range("DensityMatrix4: indices are 1-based in 1..4");
    return m(i - 1, j - 1);
  }

  double trace() const { return m.trace().real(); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix4c> es((m + m.adjoint()) / 2.0,
                                               Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  double hermiticity_defect() const { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

  void validate(double pos_tol = 1e-10) const {
    if (hermiticity_defect() > 1e-12)
      throw std::invalid_argument("DensityMatrix4: not Hermitian");
    if (std::abs(trace() - 1.0) > 1e-10)
      throw std::invalid_argument("DensityMatrix4: trace differs from 1 by " +
                                  std::to_string(std::abs(trace() - 1.0)));
    if (!approximate && min_eigenvalue() < -pos_tol)
      throw std::invalid_argument("DensityMatrix4: negative eigenvalue " +
                                  std::to_string(min_eigenvalue()));
  }

  // Symmetrizes the input, so Hermiticity holds exactly by construction.
  static DensityMatrix4 from_matrix(const Matrix4c& raw, bool approximate = false) {
    DensityMatrix4 rho{(raw + raw.adjoint()) / 2.0, approximate};
    if (std::abs(rho.trace() - 1.0) > 1e-10)
      throw std::invalid_argument("DensityMatrix4: input trace differs from 1 by " +
                                  std::to_string(std::abs(rho.trace() - 1.0)));
    return rho;
  }

  static DensityMatrix4 pure(const Vector4c& psi) {
    double n2 = psi.squaredNorm();
    if (n2 <= 0.0) throw std::invalid_argument("DensityMatrix4: zero state vector");
    return DensityMatrix4{(psi * psi.adjoint()) / n2, false};
  }

  static DensityMatrix4 basis_state(int k) {
    Vector4c psi = Vector4c::Zero();
    if (k < 1 || k > 4) throw std::out_of_range("DensityMatrix4: basis index in 1..4");
    psi(k - 1) = 1.0;
    return pure(psi);
  }

  static DensityMatrix4 maximally_mixed() {
    return DensityMatrix4{Matrix4c::Identity() / 4.0, false};
  }

  static DensityMatrix4 gibbs(const SystemParams& sys) {
    auto w = gibbs_weights(sys);
    Matrix4c g = Matrix4c::Zero();
    for (int i = 0; i < 4; ++i) g(i, i) = w[i];
    return DensityMatrix4{g, false};
  }
};

inline double max_entry_distance(const DensityMatrix4& a, const DensityMatrix4& b) {
  return (a.m - b.m).cwiseAbs().maxCoeff();
}

}  // namespace qres
