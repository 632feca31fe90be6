// rates.hpp - Lowest-order thermalization and decoherence rates, plus the
// single-qubit spin-boson reduction used as an external cross-check.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qres/couplings.hpp"
#include "qres/quadrature.hpp"
#include "qres/spectral.hpp"
#include "qres/system.hpp"

namespace qres {

using complexd = std::complex<double>;

struct RateSet {
  double gamma_th{0.0};
  double gamma2_dec{0.0};
  double gamma3_dec{0.0};
  double gamma4_dec{0.0};
  double gamma5_dec{0.0};
  double Y2{0.0};
  double Y3{0.0};

  void validate() const {
    for (double v : {gamma_th, gamma2_dec, gamma3_dec, gamma4_dec, gamma5_dec, Y2, Y3})
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("RateSet: rates must be finite and >= 0");
  }
};

// Closed-form rate family, exact to second order in the couplings.  The Y
// terms mix exchange and conserving couplings through a principal-branch
// complex square root; they can overshoot the half-sum they are subtracted
// from (e.g. at vanishing kappa), so every rate is floored at zero to keep the
// RateSet invariant.  Flooring preserves the exact quadratic scaling.
inline RateSet lowest_order_rates(const CouplingSet& c, const SpectralData& sd,
                                  const SystemParams& sys) {
  c.validate();
  sd.validate();
  sys.validate();

  const double ee1 = c.lambda1 * c.lambda1 + c.mu1 * c.mu1;
  const double ee2 = c.lambda2 * c.lambda2 + c.mu2 * c.mu2;
  const double s1 = sd.sigma_g_B1, s2 = sd.sigma_g_B2;
  const double s0 = sd.sigma_f_0, r = sd.r_f;
  // r_j' collapses to sigma_g(B_j) tanh(beta B_j) / pi for a separable form factor.
  const double r1p = s1 * std::tanh(sys.beta * sys.B1) / kPi;
  const double r2p = s2 * std::tanh(sys.beta * sys.B2) / kPi;

  const auto Y = [&](double ee, double sg, double rp) {
    const complexd bracket(4.0 * c.kappa1 * c.kappa1 * c.kappa2 * c.kappa2 * r * r,
                           -(ee * ee * sg * sg + 4.0 * c.kappa1 * c.kappa2 * ee * r * rp));
    return std::abs(std::sqrt(bracket).imag());
  };

  RateSet out;
  out.Y2 = Y(ee2, s2, r2p);
  out.Y3 = Y(ee1, s1, r1p);
  out.gamma_th = std::min(ee1 * s1, ee2 * s2);
  const double half_sum = 0.5 * ee1 * s1 + 0.5 * ee2 * s2;
  out.gamma2_dec = std::max(
      0.0, half_sum - out.Y2 + (c.kappa1 * c.kappa1 + c.nu1 * c.nu1) * s0);
  out.gamma3_dec = std::max(
      0.0, half_sum - out.Y3 + (c.kappa2 * c.kappa2 + c.nu2 * c.nu2) * s0);
  const double full_sum = ee1 * s1 + ee2 * s2;
  const double dk = c.kappa1 - c.kappa2, sk = c.kappa1 + c.kappa2;
  const double local2 = c.nu1 * c.nu1 + c.nu2 * c.nu2;
  out.gamma4_dec = std::max(0.0, full_sum + (dk * dk + local2) * s0);
  out.gamma5_dec = std::max(0.0, full_sum + (sk * sk + local2) * s0);
  return out;
}

struct SpinBosonRates {
  double gamma_th{0.0};
  double gamma_dec{0.0};
};

// Single-qubit reduction (only lambda1 = kappa1 = lambda nonzero, one common
// form factor for both reservoirs).  sd_h must be built from that common form
// factor with the first level spacing set to B, so that sigma_g_B1 carries
// sigma_h(B) and sigma_f_0 carries sigma_h(0).  Carries its own explicit pi
// normalization, distinct from the cluster-rate family above.
inline SpinBosonRates spin_boson_rates(double lambda, double B, const SpectralData& sd_h,
                                       double beta) {
  if (B <= 0.0) throw std::invalid_argument("spin_boson_rates: B must be > 0");
  if (beta <= 0.0) throw std::invalid_argument("spin_boson_rates: beta must be > 0");
  SpinBosonRates out;
  out.gamma_th = 0.5 * kPi * lambda * lambda * sd_h.sigma_g_B1;
  out.gamma_dec = 0.5 * out.gamma_th + lambda * lambda * kPi * sd_h.sigma_f_0;
  return out;
}

// Slowest decay among a cluster's resonances.  For the diagonal cluster the
// equilibrium resonance sits exactly at zero and is excluded; every other
// resonance of that cluster drives the approach to equilibrium.
inline double cluster_rate(double e, const std::vector<complexd>& resonance_energies) {
  if (resonance_energies.empty())
    throw std::invalid_argument("cluster_rate: empty resonance list");
  double best = std::numeric_limits<double>::infinity();
  for (const complexd& eps : resonance_energies) {
    if (e == 0.0 && std::abs(eps) <= 1e-14) continue;
    best = std::min(best, eps.imag());
  }
  if (!std::isfinite(best))
    throw std::invalid_argument(
        "cluster_rate: only the equilibrium zero mode is present");
  // Physical resonances never decay backwards; strip roundoff noise.
  return std::max(0.0, best);
}

}  // namespace qres
