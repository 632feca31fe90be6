// solvable.hpp - Exact dynamics of the energy-conserving model and its Markovian limit.
//
// With both qubits coupled only through commuting (energy-conserving) reservoir
// terms, the reduced dynamics is a Hadamard-product channel: every matrix entry
// evolves independently through a phase and a damping factor built from two
// scalar memory integrals S(t) and Gamma(t).  Replacing those integrals by
// their linear-in-t asymptotes gives the Markovian semigroup used as a
// cross-check for the cluster propagator.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qres/density_matrix.hpp"
#include "qres/quadrature.hpp"
#include "qres/spectral.hpp"
#include "qres/system.hpp"

namespace qres {

struct MemoryPoint {
  double S{0.0};
  double Gamma{0.0};
};

namespace detail {

// Integer weights for entry (m,n), 1-based.  Phase weights are antisymmetric
// and decay weights symmetric, so the channel preserves Hermiticity entrywise.
// All three have zero diagonal: populations are frozen.
inline constexpr int kPhaseWeight[4][4] = {
    {0, -4, -4, 0},
    {4, 0, 0, 4},
    {4, 0, 0, 4},
    {0, -4, -4, 0},
};
inline constexpr int kCollectiveDecayWeight[4][4] = {
    {0, 4, 4, 16},
    {4, 0, 0, 4},
    {4, 0, 0, 4},
    {16, 4, 4, 0},
};
inline constexpr int kLocalDecayWeight[4][4] = {
    {0, 4, 4, 8},
    {4, 0, 8, 4},
    {4, 8, 0, 4},
    {8, 4, 4, 0},
};

inline double memory_S(const FormFactor& f, double t) {
  if (t == 0.0) return 0.0;
  const double R = f.support_radius();
  // (r t - sin r t)/r factored as t * r - sin(r t)/... kept as two integrals:
  // the linear part carries the large-t growth, the sine part stays bounded.
  const double lin = integrate(
      [&](double r) { return f.radial_sq(r) * r; }, 0.0, R);
  const double split = std::min(1.0 / t, R);
  auto osc = [&](double r) { return f.radial_sq(r) * std::sin(r * t); };
  double sine = integrate(osc, 0.0, split);
  if (split < R) sine += integrate_oscillatory(osc, split, R, t);
  return 0.5 * f.angular_weight * (t * lin - sine);
}

inline double memory_Gamma(const FormFactor& f, double beta, double t) {
  if (t == 0.0) return 0.0;
  const double R = f.support_radius();
  auto integrand = [&](double r) {
    double s = std::sin(0.5 * r * t);
    return f.radial_sq(r) * coth(0.5 * beta * r) * s * s;
  };
  const double split = std::min(1.0 / t, R);
  double value = integrate(integrand, 0.0, split);
  if (split < R) value += integrate_oscillatory(integrand, split, R, t);
  return f.angular_weight * value;
}

}  // namespace detail

// Computes both memory integrals at one time.  Throws with the offending t on
// quadrature failure.
inline MemoryPoint memory_functions(const FormFactor& f, double beta, double t) {
  if (t < 0.0) throw std::invalid_argument("memory_functions: t must be >= 0");
  if (beta <= 0.0) throw std::invalid_argument("memory_functions: beta must be > 0");
  try {
    return MemoryPoint{detail::memory_S(f, t), detail::memory_Gamma(f, beta, t)};
  } catch (const std::runtime_error& e) {
    throw std::runtime_error("memory function quadrature failed at t = " +
                             std::to_string(t) + ": " + e.what());
  }
}

// Memoizing evaluator for (S, Gamma).  The cache is filled lazily; fill it from
// a single thread, after which concurrent readers are safe.
class MemoryFunctions {
 public:
  MemoryFunctions(FormFactor f, double beta) : f_(f), beta_(beta) {
    f_.validate();
    if (beta <= 0.0) throw std::invalid_argument("MemoryFunctions: beta must be > 0");
  }

  MemoryPoint eval(double t) const {
    auto it = cache_.find(t);
    if (it != cache_.end()) return it->second;
    MemoryPoint p = memory_functions(f_, beta_, t);
    cache_.emplace(t, p);
    return p;
  }

  double S(double t) const { return eval(t).S; }
  double Gamma(double t) const { return eval(t).Gamma; }

  const FormFactor& form_factor() const { return f_; }
  double inverse_temperature() const { return beta_; }

 private:
  FormFactor f_;
  double beta_;
  mutable std::map<double, MemoryPoint> cache_;
};

namespace detail {

// Shared entrywise update: phase from the free energies plus kappa^2 * weight * S,
// damping from (kappa^2, nu^2) decay weights times Gamma.
inline DensityMatrix4 hadamard_evolve(const DensityMatrix4& rho0, double t,
                                      double kappa, double nu, double S, double Gamma,
                                      const SystemParams& sys, bool approximate) {
  const auto E = hamiltonian_eigenvalues(sys);
  const double k2 = kappa * kappa;
  const double n2 = nu * nu;
  Matrix4c out;
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) {
      const double phase = -t * (E[m] - E[n]) + k2 * kPhaseWeight[m][n] * S;
      const double decay = (k2 * kCollectiveDecayWeight[m][n] +
                            n2 * kLocalDecayWeight[m][n]) * Gamma;
      out(m, n) = rho0.m(m, n) * std::polar(std::exp(-decay), phase);
    }
  }
  return DensityMatrix4{out, approximate};
}

}  // namespace detail

// Exact reduced dynamics for couplings (lambda = mu = 0, equal kappa, equal nu).
inline DensityMatrix4 exact_evolve(const DensityMatrix4& rho0, double t, double kappa,
                                   double nu, const MemoryFunctions& mf,
                                   const SystemParams& sys) {
  if (t < 0.0) throw std::invalid_argument("exact_evolve: t must be >= 0");
  const MemoryPoint mp = mf.eval(t);
  return detail::hadamard_evolve(rho0, t, kappa, nu, mp.S, mp.Gamma, sys, false);
}

// Markovian limit of exact_evolve: S and Gamma replaced by their linear
// asymptotes r_f t / 2 and sigma_f(0) t / 4.
inline DensityMatrix4 resonance_evolve_ec(const DensityMatrix4& rho0, double t,
                                          double kappa, double nu,
                                          const SpectralData& sd,
                                          const SystemParams& sys) {
  if (t < 0.0) throw std::invalid_argument("resonance_evolve_ec: t must be >= 0");
  return detail::hadamard_evolve(rho0, t, kappa, nu, 0.5 * sd.r_f * t,
                                 0.25 * sd.sigma_f_0 * t, sys, true);
}

// Largest entrywise gap between the exact and Markovian evolutions over a grid.
inline double deviation(const DensityMatrix4& rho0, const std::vector<double>& t_grid,
                        double kappa, double nu, const MemoryFunctions& mf,
                        const SpectralData& sd, const SystemParams& sys) {
  double worst = 0.0;
  for (double t : t_grid) {
    const DensityMatrix4 ex = exact_evolve(rho0, t, kappa, nu, mf, sys);
    const DensityMatrix4 mk = resonance_evolve_ec(rho0, t, kappa, nu, sd, sys);
    worst = std::max(worst, max_entry_distance(ex, mk));
  }
  return worst;
}

}  // namespace qres
