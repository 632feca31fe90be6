// entanglement.hpp - Concurrence, canonical initial states, and disentanglement-time bounds.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "qres/couplings.hpp"
#include "qres/density_matrix.hpp"
#include "qres/spectral.hpp"

namespace qres {

// Antidiagonal flip with entries (1,4)=(4,1)=-1 and (2,3)=(3,2)=+1; squares to
// the identity.  Conjugating the entrywise complex conjugate of a state by this
// matrix produces the spin-flipped partner used by the concurrence.
inline const Matrix4c& spin_flip_matrix() {
  static const Matrix4c F = [] {
    Matrix4c f = Matrix4c::Zero();
    f(0, 3) = -1.0;
    f(3, 0) = -1.0;
    f(1, 2) = 1.0;
    f(2, 1) = 1.0;
    return f;
  }();
  return F;
}

inline Matrix4c xi_matrix(const DensityMatrix4& rho) {
  const Matrix4c& F = spin_flip_matrix();
  return rho.m * F * rho.m.conjugate() * F;
}

// Eigenvalues of xi, sorted descending with negatives clamped to 0.  xi is a
// product of two positive-semidefinite factors, so its spectrum is real and
// nonnegative up to the accuracy of rho itself.  warn_floor declares how far
// from a state the input may legitimately sit; perturbing a repeated
// eigenvalue by that much can split it into a conjugate pair of size its
// square root, so imaginary parts beyond max(1e-8, sqrt(|warn_floor|)) mean
// the input is too far gone to trust.  Negative real parts below warn_floor
// print a warning but are still clamped.
inline std::array<double, 4> xi_eigenvalues(const DensityMatrix4& rho,
                                            double warn_floor = -1e-6) {
  const Matrix4c xi = xi_matrix(rho);
  Eigen::ComplexEigenSolver<Matrix4c> es(xi, false);
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "xi_eigenvalues: eigensolver failed to converge on\n" << xi;
    throw std::runtime_error(os.str());
  }
  // Eigenvalues that vanish in exact arithmetic come back as solver noise of
  // order eps * ||xi||; square roots would inflate that to 1e-8, so anything
  // below the floor is treated as an exact zero.
  const double zero_tol = 1e-13 * std::max(1.0, std::abs(xi.trace().real()));
  const double imag_tol = std::max(1e-8, std::sqrt(std::abs(warn_floor)));
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) {
    const complexd ev = es.eigenvalues()(i);
    if (std::abs(ev.imag()) > imag_tol) {
      throw std::runtime_error(
          "xi_eigenvalues: eigenvalue " + std::to_string(ev.real()) + " + " +
          std::to_string(ev.imag()) +
          "i has non-real part beyond tolerance; "
          "input is too far from a density matrix (approximation artifact)");
    }
    double re = ev.real();
    if (re < warn_floor) {
      std::cerr << "warning: xi eigenvalue " << re << " below clamp floor "
                << warn_floor << "; approximation artifact larger than expected\n";
    }
    out[i] = std::abs(re) <= zero_tol ? 0.0 : std::max(re, 0.0);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

inline double concurrence(const DensityMatrix4& rho, double warn_floor = -1e-6) {
  const auto nu = xi_eigenvalues(rho, warn_floor);
  const double c = std::sqrt(nu[0]) - std::sqrt(nu[1]) - std::sqrt(nu[2]) -
                   std::sqrt(nu[3]);
  return std::max(0.0, c);
}

// psi proportional to a1 |++> + a2 |-->.
struct SuperpositionFamily {
  complexd a1{1.0};
  complexd a2{1.0};
};

// Fixed product state: each qubit points along a different equatorial axis.
struct BraunProduct {};

struct Explicit {
  DensityMatrix4 rho;
};

using InitialState = std::variant<SuperpositionFamily, BraunProduct, Explicit>;

inline DensityMatrix4 initial_state(const InitialState& s) {
  if (const auto* fam = std::get_if<SuperpositionFamily>(&s)) {
    if (std::abs(fam->a1) == 0.0 && std::abs(fam->a2) == 0.0)
      throw std::invalid_argument("initial_state: a1 and a2 must not both vanish");
    Vector4c psi = Vector4c::Zero();
    psi(0) = fam->a1;
    psi(3) = fam->a2;
    return DensityMatrix4::pure(psi);
  }
  if (std::holds_alternative<BraunProduct>(s)) {
    Matrix4c m;
    m << 1, 1, -1, -1,
         1, 1, -1, -1,
        -1, -1, 1, 1,
        -1, -1, 1, 1;
    return DensityMatrix4{0.25 * m, false};
  }
  const auto& ex = std::get<Explicit>(s);
  ex.rho.validate();
  return ex.rho;
}

// Inputs for the sudden-death window: thermalization rates of the two exchange
// clusters, the full decay rate of the (1,4) coherence, and the extremal pair.
struct DisentanglementInputs {
  double p{0.5};
  double delta2{0.0};
  double delta3{0.0};
  double delta5{0.0};
  double delta_plus{0.0};
  double delta_minus{0.0};
  double kappa_max{0.0};
  double C_A{1.0};
  double C_B{1.0};

  void validate() const {
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("DisentanglementInputs: p must lie strictly in (0,1)");
    if (!(delta2 > 0.0) || !(delta3 > 0.0))
      throw std::invalid_argument("DisentanglementInputs: delta2 and delta3 must be > 0");
    if (!(kappa_max > 0.0))
      throw std::invalid_argument("DisentanglementInputs: kappa_max must be > 0");
    if (!(C_A > 0.0) || !(C_B > 0.0))
      throw std::invalid_argument("DisentanglementInputs: C_A and C_B must be > 0");
    if (std::abs(delta_plus - std::max(delta2, delta3)) > 1e-12 ||
        std::abs(delta_minus - std::min(delta2, delta3)) > 1e-12)
      throw std::invalid_argument(
          "DisentanglementInputs: delta_plus/delta_minus must be max/min of delta2, delta3");
    if (delta5 + 1e-12 < delta2 + delta3)
      throw std::invalid_argument("DisentanglementInputs: delta5 must be >= delta2 + delta3");
  }

  static DisentanglementInputs from_couplings(double p, const CouplingSet& c,
                                              const SpectralData& sd, double C_A = 1.0,
                                              double C_B = 1.0) {
    DisentanglementInputs d;
    d.p = p;
    d.delta2 = (c.lambda1 * c.lambda1 + c.mu1 * c.mu1) * sd.sigma_g_B1;
    d.delta3 = (c.lambda2 * c.lambda2 + c.mu2 * c.mu2) * sd.sigma_g_B2;
    const double conserving = (c.kappa1 + c.kappa2) * (c.kappa1 + c.kappa2) +
                              c.nu1 * c.nu1 + c.nu2 * c.nu2;
    d.delta5 = d.delta2 + d.delta3 + conserving * sd.sigma_f_0;
    d.delta_plus = std::max(d.delta2, d.delta3);
    d.delta_minus = std::min(d.delta2, d.delta3);
    d.kappa_max = c.kappa_max();
    d.C_A = C_A;
    d.C_B = C_B;
    return d;
  }
};

struct DisentanglementBounds {
  double t_A{0.0};
  double t_B{0.0};
};

// t_A: past this time the concurrence is guaranteed zero.  t_B: up to this time
// it is guaranteed positive (for an initially entangled member of the
// superposition family).  Both are formula evaluations with undetermined
// constants C_A, C_B, so they are qualitative scales rather than certified times.
inline DisentanglementBounds disentanglement_bounds(const DisentanglementInputs& d) {
  d.validate();
  const double pq = d.p * (1.0 - d.p);
  const double k2 = d.kappa_max * d.kappa_max;
  const double d23 = d.delta2 + d.delta3;
  const double tA = std::max({(1.0 / d.delta5) * std::log(d.C_A * std::sqrt(pq) / k2),
                              (1.0 / d23) * std::log(d.C_A * pq / k2),
                              d.C_A / d23});
  const double tB =
      std::min({(1.0 / d23) * std::log1p(d.C_B * pq),
                (1.0 / d.delta_plus) * std::log1p(d.C_B * k2),
                d.C_B / (d.delta5 - 0.5 * d.delta_minus)});
  return DisentanglementBounds{tA, tB};
}

}  // namespace qres
