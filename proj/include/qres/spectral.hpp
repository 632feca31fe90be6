// spectral.hpp - reservoir spectral functions, their principal-value partners, and the
// renormalized parameter reduction used by the rate and propagator formulas.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "qres/quadrature.hpp"
#include "qres/system.hpp"

namespace qres {

// Coupling profile r^p e^{-r^m} with angular weight = integral over the unit
// sphere of the squared angular part. p = -1/2 gives a finite zero-frequency
// spectral weight; larger admissible p give zero there.
struct FormFactor {
  double p{-0.5};
  int m{1};
  double angular_weight{1.0};

  void validate() const {
    const double n = p + 0.5;
    if (!(n > -1e-12) || std::abs(n - std::round(n)) > 1e-12)
      throw std::invalid_argument("FormFactor: p must be -1/2 plus a nonnegative integer");
    if (m != 1 && m != 2) throw std::invalid_argument("FormFactor: m must be 1 or 2");
    if (!(angular_weight > 0.0))
      throw std::invalid_argument("FormFactor: angular_weight must be > 0");
  }

  // |h(r)|^2 for r > 0.
  double radial_sq(double r) const {
    return std::pow(r, 2.0 * p) * std::exp(-2.0 * std::pow(r, static_cast<double>(m)));
  }

  // Radius beyond which |h(r)|^2 < 1.1e-20; truncation point for radial integrals.
  double support_radius() const { return std::pow(23.0, 1.0 / static_cast<double>(m)); }

  static FormFactor default_f() { return {-0.5, 1, 1.0}; }
  static FormFactor default_g() { return {+0.5, 1, 1.0}; }
};

inline double coth(double x) { return 1.0 / std::tanh(x); }

// sigma_h(x) = 4 pi x^2 coth(beta x) * angular_weight * |h(2x)|^2 for x > 0,
// continued to x = 0 by its analytic limit: 2 pi * angular_weight / beta at
// p = -1/2, zero for larger p.
inline double sigma(double x, double beta, const FormFactor& h) {
  h.validate();
  if (!(beta > 0.0)) throw std::invalid_argument("sigma: beta must be > 0");
  if (x < 0.0) throw std::domain_error("sigma: x must be >= 0");
  if (x == 0.0) return (h.p == -0.5) ? 2.0 * kPi * h.angular_weight / beta : 0.0;
  return 4.0 * kPi * x * x * coth(beta * x) * h.angular_weight * h.radial_sq(2.0 * x);
}

// Downward-jump weight sigma_g^-(x) = 2 pi x^2 e^{beta x}/sinh(beta x)
//   * angular_weight * |g(2x)|^2, written in the overflow-safe form
// 2/(1 - e^{-2 beta x}). Kept independent of sigma() so the detailed-balance
// ratio sigma^-/sigma = e^{2 beta x}/(e^{2 beta x} + 1) is a real identity
// between two separately coded expressions.
inline double sigma_minus(double x, double beta, const FormFactor& g) {
  g.validate();
  if (!(beta > 0.0)) throw std::invalid_argument("sigma_minus: beta must be > 0");
  if (!(x > 0.0)) throw std::domain_error("sigma_minus: x must be > 0");
  const double boson = 2.0 / (1.0 - std::exp(-2.0 * beta * x));
  return 2.0 * kPi * x * x * boson * g.angular_weight * g.radial_sq(2.0 * x);
}

// r_g(x) = (angular_weight/2) P.V. int_{-u_c}^{u_c}
//            u^2 |g(|u|)|^2 coth(beta |u|/2) / (u - 2x) du.
// The integrand is even in u, so x = 0 short-circuits to exactly 0. The window
// must satisfy u_c > 4x so the pole sits well inside it. The |u| factors put a
// kink at u = 0, passed to the quadrature as a split point.
inline double pv_r_g(double x, double beta, const FormFactor& g, double u_c = 100.0) {
  g.validate();
  if (!(beta > 0.0)) throw std::invalid_argument("pv_r_g: beta must be > 0");
  if (x < 0.0) throw std::domain_error("pv_r_g: x must be >= 0");
  if (!(u_c > 0.0)) throw std::invalid_argument("pv_r_g: u_c must be > 0");
  if (x == 0.0) return 0.0;
  if (!(u_c > 4.0 * x))
    throw std::invalid_argument("pv_r_g: cutoff u_c = " + std::to_string(u_c) +
                                " too small, need u_c > 4x = " + std::to_string(4.0 * x));
  const double a = 2.0 * x;
  auto F = [&](double u) {
    const double r = std::abs(u);
    return u * u * g.radial_sq(r) * coth(beta * r / 2.0);
  };
  return 0.5 * g.angular_weight * principal_value(F, a, -u_c, u_c, {0.0});
}

// Cross-check partner of pv_r_g built on the symmetric-window P.V. scheme.
inline double pv_r_g_symmetric(double x, double beta, const FormFactor& g,
                               double u_c = 100.0) {
  g.validate();
  if (x < 0.0) throw std::domain_error("pv_r_g_symmetric: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (!(u_c > 4.0 * x))
    throw std::invalid_argument("pv_r_g_symmetric: cutoff too small, need u_c > 4x");
  const double a = 2.0 * x;
  auto F = [&](double u) {
    const double r = std::abs(u);
    return u * u * g.radial_sq(r) * coth(beta * r / 2.0);
  };
  return 0.5 * g.angular_weight * principal_value_symmetric(F, a, -u_c, u_c);
}

// Radial reduction of the momentum-space integral of |f|^2/|k|: the integrand
// is positive, so the nominal principal value is an ordinary integral
// angular_weight * int_0^inf r^{2p+1} e^{-2 r^m} dr.
inline double pv_r_f(const FormFactor& f) {
  f.validate();
  auto integrand = [&](double r) {
    return std::pow(r, 2.0 * f.p + 1.0) * std::exp(-2.0 * std::pow(r, static_cast<double>(f.m)));
  };
  const double R = f.support_radius();
  const double head = integrate(integrand, 0.0, R);
  const double tail = integrate(integrand, R, 2.0 * R);
  if (std::abs(tail) > 1e-10)
    throw std::runtime_error("pv_r_f: radial integral fails the tail convergence check");
  return f.angular_weight * (head + tail);
}

// sigma_g(B2)/sigma_g(B1) in the renormalized units, for the ohmic profile
// whose |g(u)|^2 grows linearly in u.
inline double renormalized_sigma_ratio(const SystemParams& sys) {
  sys.validate();
  return std::pow(sys.B2 / sys.B1, 3.0) * coth(sys.beta * sys.B2) / coth(sys.beta * sys.B1);
}

// Frozen spectral inputs consumed by the rate and propagator formulas.
struct SpectralData {
  double sigma_g_B1{1.0};
  double sigma_g_B2{1.0};
  double sigma_g_minus_B1{0.0};
  double sigma_g_minus_B2{0.0};
  double r_g_B1{1.0};
  double r_g_B2{1.0};
  double sigma_f_0{1.0};
  double r_f{1.0};
  double u_c{100.0};  // window used for the principal-value entries

  void validate() const {
    if (!(sigma_g_B1 >= 0.0) || !(sigma_g_B2 >= 0.0) || !(sigma_f_0 >= 0.0))
      throw std::invalid_argument("SpectralData: sigma entries must be >= 0");
    if (!(u_c > 0.0)) throw std::invalid_argument("SpectralData: u_c must be > 0");
  }

  // Units with sigma_g(B1) = r_g(B1) = r_g(B2) = sigma_f(0) = r_f = 1;
  // sigma_g(B2) follows the ohmic ratio and sigma^- follows detailed balance.
  static SpectralData renormalized(const SystemParams& sys) {
    sys.validate();
    SpectralData sd;
    sd.sigma_g_B2 = renormalized_sigma_ratio(sys);
    sd.sigma_g_minus_B1 = sd.sigma_g_B1 / (1.0 + std::exp(-2.0 * sys.beta * sys.B1));
    sd.sigma_g_minus_B2 = sd.sigma_g_B2 / (1.0 + std::exp(-2.0 * sys.beta * sys.B2));
    return sd;
  }

  // Raw quadrature mode: every entry evaluated from the given form factors.
  static SpectralData from_form_factors(const FormFactor& g, const FormFactor& f,
                                        const SystemParams& sys, double u_c = 100.0) {
    sys.validate();
    SpectralData sd;
    sd.sigma_g_B1 = sigma(sys.B1, sys.beta, g);
    sd.sigma_g_B2 = sigma(sys.B2, sys.beta, g);
    sd.sigma_g_minus_B1 = sigma_minus(sys.B1, sys.beta, g);
    sd.sigma_g_minus_B2 = sigma_minus(sys.B2, sys.beta, g);
    sd.r_g_B1 = pv_r_g(sys.B1, sys.beta, g, u_c);
    sd.r_g_B2 = pv_r_g(sys.B2, sys.beta, g, u_c);
    sd.sigma_f_0 = sigma(0.0, sys.beta, f);
    sd.r_f = pv_r_f(f);
    sd.u_c = u_c;
    return sd;
  }
};

// Decay rates alpha and Lamb shifts beta of the renormalized second-order
// reduction, in units where sigma_g(B1) = r_g(B1) = sigma_f(0) = r_f = 1.
// Assumes equal local and collective exchange amplitudes.
struct ReducedParams {
  double alpha1{0.0}, alpha2{0.0}, alpha3{0.0}, alpha4{0.0};  // decay rates
  double beta1{0.0}, beta2{0.0}, beta3{0.0};                  // Lamb shifts
};

inline ReducedParams reduce_parameters(double lambda, double kappa, double nu,
                                       const SystemParams& sys) {
  sys.validate();
  ReducedParams rp;
  rp.alpha1 = 2.0 * lambda * lambda;
  rp.alpha2 = rp.alpha1 * renormalized_sigma_ratio(sys);
  rp.alpha3 = kappa * kappa;
  rp.alpha4 = nu * nu;
  rp.beta1 = 2.0 * lambda * lambda;
  rp.beta2 = rp.beta1;
  rp.beta3 = -kappa * kappa;
  return rp;
}

}  // namespace qres
