// propagator.hpp - lowest-order reduced dynamics: per-cluster resonances and
// the block-diagonal time evolution they generate.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "qres/couplings.hpp"
#include "qres/density_matrix.hpp"
#include "qres/spectral.hpp"
#include "qres/system.hpp"

namespace qres {

// e^{sM} for 2x2 M via the split M = (tr M / 2) I + N with N traceless and
// N^2 = d I. Analytic in d, so a vanishing or defective d is handled exactly
// and the branch of sqrt(d) cancels.
inline Eigen::Matrix2cd expm_2x2(const Eigen::Matrix2cd& M, complexd s) {
  const complexd half_tr = 0.5 * (M(0, 0) + M(1, 1));
  Eigen::Matrix2cd N = M;
  N(0, 0) -= half_tr;
  N(1, 1) -= half_tr;
  const complexd d = N(0, 0) * N(0, 0) + N(0, 1) * N(1, 0);
  const complexd z = s * std::sqrt(d);
  complexd sinhc;
  if (std::abs(z) < 1e-4) {
    const complexd z2 = z * z;
    sinhc = 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
  } else {
    sinhc = std::sinh(z) / z;
  }
  return std::exp(s * half_tr) *
         (std::cosh(z) * Eigen::Matrix2cd::Identity() + s * sinhc * N);
}

// Single-qubit population relaxation over time t at rate delta with Gibbs
// factor e = exp(2 beta B), acting on (p_up, p_down). Columns sum to 1 up to
// roundoff; t = 0 gives the identity, t -> infinity the one-qubit Gibbs
// distribution (1, e) / (1 + e).
inline Eigen::Matrix2d thermal_relaxation(double t, double delta, double e) {
  const double x = std::exp(-t * delta);
  Eigen::Matrix2d T;
  T << (1.0 + x * e) / (1.0 + e), (1.0 - x) / (1.0 + e),
      e * (1.0 - x) / (1.0 + e), (e + x) / (1.0 + e);
  return T;
}

// Everything the lowest-order propagator needs, precomputed once per
// (couplings, spectral data, system) triple. Each resonance carries its
// oscillation frequency in the real part and its decay rate in the imaginary
// part; decay rates are nonnegative.
struct ResonanceData {
  // Split resonances of the two mixed coherence clusters; index 1 takes the
  // principal (+) square root branch of the eigenvalue discriminant.
  complexd eps_2B1_1, eps_2B1_2;
  complexd eps_2B2_1, eps_2B2_2;
  // Lone-pair resonances acting on slots (3,2) and (4,1).
  complexd eps_minus, eps_plus;
  // Eigenvector mixing coefficients of the two level-shift blocks, ordered to
  // match the split resonances. NaN when the block is degenerate.
  complexd y_plus, y_minus;
  complexd y_prime_plus, y_prime_minus;
  // Thermal relaxation rates; delta4 = delta2 + delta3 by construction.
  double delta2{0.0}, delta3{0.0}, delta4{0.0};
  // Gibbs factors exp(2 beta B_j) and the partition function.
  double e1{1.0}, e2{1.0}, Z{4.0};
  // Level-shift blocks with the free Bohr frequency excluded: the cluster at
  // 2*B1 acts on slots ((3,1), (4,2)), the one at 2*B2 on ((2,1), (4,3)).
  Eigen::Matrix2cd lambda_2B1{Eigen::Matrix2cd::Zero()};
  Eigen::Matrix2cd lambda_2B2{Eigen::Matrix2cd::Zero()};
  // Set when the off-diagonal coupling of the block vanishes; the two slots
  // then evolve independently and the y coefficients are undefined.
  bool degenerate_2B1{false}, degenerate_2B2{false};
  // False when a split pair coincides. Evolution stays well defined through
  // the analytic matrix exponential, so a violation is advisory only.
  bool distinct_resonances{true};
  SystemParams sys;
};

namespace detail {

// Fills one 2x2 coherence block: the matrix itself, its two resonances
// (Bohr frequency plus eigenvalue), and the mixing coefficients. A is the
// common diagonal shift, B the thermal cross coupling through the spectator
// qubit, C the collective phase pull, e_other the spectator Gibbs factor.
inline void fill_coherence_block(complexd A, complexd B, complexd C,
                                 double e_other, double bohr,
                                 Eigen::Matrix2cd& block, complexd& eps1,
                                 complexd& eps2, complexd& y1, complexd& y2,
                                 bool& degenerate) {
  block << A - C + B, -B / e_other, -B, A + C + B / e_other;
  const complexd half_tr = A + 0.5 * B * (1.0 + 1.0 / e_other);
  const complexd off = -C + 0.5 * B * (1.0 - 1.0 / e_other);
  const complexd root = std::sqrt(off * off + B * B / e_other);
  const complexd s1 = half_tr + root;
  const complexd s2 = half_tr - root;
  eps1 = bohr + s1;
  eps2 = bohr + s2;
  degenerate = std::abs(B) < 1e-14;
  if (degenerate) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    y1 = y2 = complexd(nan, nan);
  } else {
    y1 = 1.0 + (A - C - s1) / B;
    y2 = 1.0 + (A - C - s2) / B;
  }
}

}  // namespace detail

// Precomputes the per-cluster resonance data for one symmetric coupling set.
// Asymmetric couplings have no closed split form here and are rejected.
inline ResonanceData resonance_data(const CouplingSet& c, const SpectralData& sd,
                                    const SystemParams& sys) {
  sys.validate();
  c.validate();
  sd.validate();
  if (!c.symmetric())
    throw std::invalid_argument(
        "resonance_data: couplings must be pairwise symmetric");

  const complexd I(0.0, 1.0);
  const double L = c.lambda1 * c.lambda1 + c.mu1 * c.mu1;
  const double kk = c.kappa1 * c.kappa1;
  const double nn = c.nu1 * c.nu1;

  ResonanceData rd;
  rd.sys = sys;
  rd.e1 = std::exp(2.0 * sys.beta * sys.B1);
  rd.e2 = std::exp(2.0 * sys.beta * sys.B2);
  rd.Z = partition_function(sys);
  rd.delta2 = L * sd.sigma_g_B2;
  rd.delta3 = L * sd.sigma_g_B1;
  rd.delta4 = rd.delta2 + rd.delta3;

  const complexd C = -2.0 * kk * sd.r_f;
  // Cluster at 2*B1: qubit 1 flips, qubit 2 is the thermal spectator.
  const complexd A1 =
      I * (0.5 * L * sd.sigma_g_B1 + (kk + nn) * sd.sigma_f_0) - L * sd.r_g_B1;
  const complexd B1c = I * L * sd.sigma_g_minus_B2;
  detail::fill_coherence_block(A1, B1c, C, rd.e2, 2.0 * sys.B1, rd.lambda_2B1,
                               rd.eps_2B1_1, rd.eps_2B1_2, rd.y_plus,
                               rd.y_minus, rd.degenerate_2B1);
  // Mirror cluster at 2*B2 with the single-qubit labels interchanged.
  const complexd A2 =
      I * (0.5 * L * sd.sigma_g_B2 + (kk + nn) * sd.sigma_f_0) - L * sd.r_g_B2;
  const complexd B2c = I * L * sd.sigma_g_minus_B1;
  detail::fill_coherence_block(A2, B2c, C, rd.e1, 2.0 * sys.B2, rd.lambda_2B2,
                               rd.eps_2B2_1, rd.eps_2B2_2, rd.y_prime_plus,
                               rd.y_prime_minus, rd.degenerate_2B2);

  const double sg_sum = sd.sigma_g_B1 + sd.sigma_g_B2;
  rd.eps_minus = 2.0 * (sys.B1 - sys.B2) + L * (sd.r_g_B1 - sd.r_g_B2) +
                 I * (L * sg_sum + 2.0 * nn * sd.sigma_f_0);
  rd.eps_plus = 2.0 * (sys.B1 + sys.B2) - L * (sd.r_g_B1 + sd.r_g_B2) +
                I * (L * sg_sum + (4.0 * kk + 2.0 * nn) * sd.sigma_f_0);

  for (complexd eps : {rd.eps_2B1_1, rd.eps_2B1_2, rd.eps_2B2_1, rd.eps_2B2_2,
                       rd.eps_minus, rd.eps_plus}) {
    if (eps.imag() < -1e-10 * std::max(1.0, std::abs(eps)))
      throw std::runtime_error("resonance_data: negative decay rate, spectral data is inconsistent");
  }

  auto distinct = [](complexd a, complexd b) {
    return std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  rd.distinct_resonances = distinct(rd.eps_2B1_1, rd.eps_2B1_2) &&
                           distinct(rd.eps_2B2_1, rd.eps_2B2_2);
  if (!rd.distinct_resonances)
    std::cerr << "warning: coinciding split resonances; mixing coefficients "
                 "are ill conditioned\n";
  return rd;
}

// Applies the lowest-order propagator for time t >= 0. Populations relax as a
// product of independent single-qubit channels; coherences evolve inside
// their Bohr-frequency clusters; the upper triangle follows by conjugation.
// The result is exactly Hermitian with unit trace up to roundoff and carries
// the approximate flag: entries may overshoot positivity by an amount
// quadratic in the largest coupling.
inline DensityMatrix4 evolve(const DensityMatrix4& rho0, double t,
                             const ResonanceData& rd) {
  if (!(t >= 0.0)) throw std::invalid_argument("evolve: time must be >= 0");
  const complexd I(0.0, 1.0);
  const Eigen::Matrix2d T1 = thermal_relaxation(t, rd.delta3, rd.e1);
  const Eigen::Matrix2d T2 = thermal_relaxation(t, rd.delta2, rd.e2);

  Matrix4c out = Matrix4c::Zero();
  // Populations; basis index m - 1 = 2*s1 + s2 with s_j = 1 for qubit j down.
  for (int r = 0; r < 4; ++r) {
    double acc = 0.0;
    for (int k = 0; k < 4; ++k)
      acc += T1(r / 2, k / 2) * T2(r % 2, k % 2) * std::real(rho0.m(k, k));
    out(r, r) = acc;
  }

  const Eigen::Matrix2cd M1 = expm_2x2(
      2.0 * rd.sys.B1 * Eigen::Matrix2cd::Identity() + rd.lambda_2B1, I * t);
  out(2, 0) = M1(0, 0) * rho0.m(2, 0) + M1(0, 1) * rho0.m(3, 1);
  out(3, 1) = M1(1, 0) * rho0.m(2, 0) + M1(1, 1) * rho0.m(3, 1);

  const Eigen::Matrix2cd M2 = expm_2x2(
      2.0 * rd.sys.B2 * Eigen::Matrix2cd::Identity() + rd.lambda_2B2, I * t);
  out(1, 0) = M2(0, 0) * rho0.m(1, 0) + M2(0, 1) * rho0.m(3, 2);
  out(3, 2) = M2(1, 0) * rho0.m(1, 0) + M2(1, 1) * rho0.m(3, 2);

  out(2, 1) = std::exp(I * t * rd.eps_minus) * rho0.m(2, 1);
  out(3, 0) = std::exp(I * t * rd.eps_plus) * rho0.m(3, 0);

  for (int r = 0; r < 4; ++r)
    for (int c = r + 1; c < 4; ++c) out(r, c) = std::conj(out(c, r));
  return DensityMatrix4{out, true};
}

// Transition amplitude: the coefficient of the initial slot (k,l) in the
// evolved slot (m,n), 1-based. Vanishes unless both slots share a Bohr
// frequency. Above-diagonal amplitudes follow from Hermiticity of the
// evolution: A_t(m,n;k,l) = conj(A_t(n,m;l,k)).
inline complexd amplitude(double t, int m, int n, int k, int l,
                          const ResonanceData& rd) {
  if (!(t >= 0.0)) throw std::invalid_argument("amplitude: time must be >= 0");
  for (int i : {m, n, k, l})
    if (i < 1 || i > 4)
      throw std::out_of_range("amplitude: indices are 1-based in 1..4");
  if (m < n) return std::conj(amplitude(t, n, m, l, k, rd));
  const complexd I(0.0, 1.0);

  if (m == n) {
    if (k != l) return complexd(0.0);
    const Eigen::Matrix2d T1 = thermal_relaxation(t, rd.delta3, rd.e1);
    const Eigen::Matrix2d T2 = thermal_relaxation(t, rd.delta2, rd.e2);
    const int r = m - 1, c = k - 1;
    return complexd(T1(r / 2, c / 2) * T2(r % 2, c % 2));
  }

  auto slot_2B1 = [](int a, int b) {
    return (a == 3 && b == 1) ? 0 : (a == 4 && b == 2) ? 1 : -1;
  };
  auto slot_2B2 = [](int a, int b) {
    return (a == 2 && b == 1) ? 0 : (a == 4 && b == 3) ? 1 : -1;
  };
  if (int sm = slot_2B1(m, n); sm >= 0) {
    const int sk = slot_2B1(k, l);
    if (sk < 0) return complexd(0.0);
    return expm_2x2(2.0 * rd.sys.B1 * Eigen::Matrix2cd::Identity() +
                        rd.lambda_2B1,
                    I * t)(sm, sk);
  }
  if (int sm = slot_2B2(m, n); sm >= 0) {
    const int sk = slot_2B2(k, l);
    if (sk < 0) return complexd(0.0);
    return expm_2x2(2.0 * rd.sys.B2 * Eigen::Matrix2cd::Identity() +
                        rd.lambda_2B2,
                    I * t)(sm, sk);
  }
  if (m == 3 && n == 2)
    return (k == 3 && l == 2) ? std::exp(I * t * rd.eps_minus) : complexd(0.0);
  // Only (4,1) remains below the diagonal.
  return (k == 4 && l == 1) ? std::exp(I * t * rd.eps_plus) : complexd(0.0);
}

// Time-independent generator G with cluster amplitude matrix exp(t G),
// written on the below-diagonal representative slots in the stored pair
// order. Populations get the 4x4 sum of single-qubit relaxers, the mixed
// coherence clusters i * (Bohr + level-shift block), lone pairs the 1x1
// i * resonance.
inline Eigen::MatrixXcd cluster_generator(const Cluster& cluster,
                                          const ResonanceData& rd) {
  const complexd I(0.0, 1.0);
  const double B1 = rd.sys.B1, B2 = rd.sys.B2;
  const double tol = 1e-12 * std::max(1.0, 2.0 * (B1 + B2));
  auto matches = [&](double e) { return std::abs(cluster.e - e) <= tol; };

  if (matches(0.0)) {
    Eigen::Matrix2d G1, G2;
    G1 << -rd.e1, 1.0, rd.e1, -1.0;
    G1 *= rd.delta3 / (1.0 + rd.e1);
    G2 << -rd.e2, 1.0, rd.e2, -1.0;
    G2 *= rd.delta2 / (1.0 + rd.e2);
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(4, 4);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        double g = 0.0;
        if (r % 2 == c % 2) g += G1(r / 2, c / 2);
        if (r / 2 == c / 2) g += G2(r % 2, c % 2);
        G(r, c) = g;
      }
    return G;
  }
  if (matches(2.0 * B1))
    return I * (2.0 * B1 * Eigen::Matrix2cd::Identity() + rd.lambda_2B1);
  if (matches(2.0 * B2))
    return I * (2.0 * B2 * Eigen::Matrix2cd::Identity() + rd.lambda_2B2);
  if (matches(2.0 * (B1 - B2))) {
    Eigen::MatrixXcd G(1, 1);
    G(0, 0) = I * rd.eps_minus;
    return G;
  }
  if (matches(2.0 * (B1 + B2))) {
    Eigen::MatrixXcd G(1, 1);
    G(0, 0) = I * rd.eps_plus;
    return G;
  }
  throw std::invalid_argument("cluster_generator: unrecognized cluster energy " +
                              std::to_string(cluster.e));
}

}  // namespace qres
