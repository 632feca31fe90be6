// couplings.hpp - The eight reservoir coupling constants and derived magnitudes.
#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <stdexcept>

namespace qres {

// lambda/mu: local and collective energy-exchange couplings per qubit.
// kappa/nu: collective and local energy-conserving couplings per qubit.
struct CouplingSet {
  double lambda1{0.0};
  double lambda2{0.0};
  double kappa1{0.0};
  double kappa2{0.0};
  double mu1{0.0};
  double mu2{0.0};
  double nu1{0.0};
  double nu2{0.0};

  // Largest coupling magnitude; recomputed on demand so it can never go stale.
  double kappa_max() const {
    double m = 0.0;
    for (double v : {lambda1, lambda2, kappa1, kappa2, mu1, mu2, nu1, nu2})
      m = std::max(m, std::abs(v));
    return m;
  }

  bool symmetric() const {
    return lambda1 == lambda2 && mu1 == mu2 && kappa1 == kappa2 && nu1 == nu2;
  }

  void validate() const {
    for (double v : {lambda1, lambda2, kappa1, kappa2, mu1, mu2, nu1, nu2})
      if (!std::isfinite(v))
        throw std::invalid_argument("CouplingSet: non-finite coupling constant");
  }

  static CouplingSet symmetric_set(double lambda, double kappa, double mu, double nu) {
    return CouplingSet{lambda, lambda, kappa, kappa, mu, mu, nu, nu};
  }
};

}  // namespace qres
