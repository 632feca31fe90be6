#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qres/rates.hpp"
#include "qres/solvable.hpp"

using namespace qres;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

CouplingSet random_couplings(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return CouplingSet{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_CASE("all rates vanish without coupling", "[rates]") {
  SystemParams sys;
  auto sd = SpectralData::renormalized(sys);
  auto rs = lowest_order_rates(CouplingSet{}, sd, sys);
  CHECK(rs.gamma_th == 0.0);
  CHECK(rs.gamma2_dec == 0.0);
  CHECK(rs.gamma3_dec == 0.0);
  CHECK(rs.gamma4_dec == 0.0);
  CHECK(rs.gamma5_dec == 0.0);
  CHECK(rs.Y2 == 0.0);
  CHECK(rs.Y3 == 0.0);
}

TEST_CASE("pure exchange rates are symmetric in local and collective parts", "[rates]") {
  SystemParams sys;
  auto sd = SpectralData::renormalized(sys);
  CouplingSet c{0.02, 0.03, 0.0, 0.0, 0.015, 0.01, 0.0, 0.0};
  auto rs = lowest_order_rates(c, sd, sys);

  double ee1 = 0.02 * 0.02 + 0.015 * 0.015;
  double ee2 = 0.03 * 0.03 + 0.01 * 0.01;
  double full = ee1 * sd.sigma_g_B1 + ee2 * sd.sigma_g_B2;
  CHECK_THAT(rs.gamma4_dec, WithinRel(full, 1e-14));
  CHECK(rs.gamma4_dec == rs.gamma5_dec);
  CHECK_THAT(rs.gamma_th, WithinRel(std::min(ee1 * sd.sigma_g_B1, ee2 * sd.sigma_g_B2),
                                    1e-14));

  // Swapping lambda and mu leaves every rate unchanged.
  CouplingSet swapped{0.015, 0.01, 0.0, 0.0, 0.02, 0.03, 0.0, 0.0};
  auto rs2 = lowest_order_rates(swapped, sd, sys);
  CHECK(rs.gamma_th == rs2.gamma_th);
  CHECK(rs.gamma2_dec == rs2.gamma2_dec);
  CHECK(rs.gamma3_dec == rs2.gamma3_dec);
  CHECK(rs.gamma4_dec == rs2.gamma4_dec);
  CHECK(rs.gamma5_dec == rs2.gamma5_dec);
}

TEST_CASE("pure conserving rates match the solvable-model exponents", "[rates]") {
  SystemParams sys;
  auto sd = SpectralData::from_form_factors(FormFactor::default_g(),
                                            FormFactor::default_f(), sys);
  const double kappa = 0.05, nu1 = 0.02, nu2 = 0.03;
  CouplingSet c{0.0, 0.0, kappa, kappa, 0.0, 0.0, nu1, nu2};
  auto rs = lowest_order_rates(c, sd, sys);

  CHECK_THAT(rs.gamma4_dec, WithinRel((nu1 * nu1 + nu2 * nu2) * sd.sigma_f_0, 1e-14));
  CHECK_THAT(rs.gamma5_dec,
             WithinRel((4.0 * kappa * kappa + nu1 * nu1 + nu2 * nu2) * sd.sigma_f_0,
                       1e-14));

  // The singleton rates must agree with the decay exponents of the
  // energy-conserving channel at equal local couplings.
  const double nu = 0.02;
  CouplingSet sym{0.0, 0.0, kappa, kappa, 0.0, 0.0, nu, nu};
  auto rsym = lowest_order_rates(sym, sd, sys);
  CHECK_THAT(rsym.gamma5_dec,
             WithinRel((4.0 * kappa * kappa + 2.0 * nu * nu) * sd.sigma_f_0, 1e-14));
  CHECK_THAT(rsym.gamma4_dec, WithinRel(2.0 * nu * nu * sd.sigma_f_0, 1e-14));

  std::mt19937_64 rng(55);
  Matrix4c g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      g(i, j) = complexd(std::cos(i + 5.0 * j), std::sin(3.0 * i - j));
  Matrix4c raw = g * g.adjoint();
  DensityMatrix4 rho0{raw / raw.trace().real(), false};
  const double t = 2.5;
  auto rho_t = resonance_evolve_ec(rho0, t, kappa, nu, sd, sys);
  CHECK_THAT(std::abs(rho_t.at(1, 4)),
             WithinRel(std::abs(rho0.at(1, 4)) * std::exp(-rsym.gamma5_dec * t), 1e-12));
  CHECK_THAT(std::abs(rho_t.at(2, 3)),
             WithinRel(std::abs(rho0.at(2, 3)) * std::exp(-rsym.gamma4_dec * t), 1e-12));
}

TEST_CASE("rates are nonnegative and exactly quadratic in the couplings", "[rates]") {
  SystemParams sys;
  auto sd = SpectralData::renormalized(sys);
  std::mt19937_64 rng(56);
  for (int i = 0; i < 1000; ++i) {
    auto c = random_couplings(rng, 0.5);
    auto rs = lowest_order_rates(c, sd, sys);
    rs.validate();

    // Doubling every coupling must scale each rate by exactly 4 (powers of two
    // commute with the arithmetic bit-for-bit).
    CouplingSet d{2 * c.lambda1, 2 * c.lambda2, 2 * c.kappa1, 2 * c.kappa2,
                  2 * c.mu1,     2 * c.mu2,     2 * c.nu1,    2 * c.nu2};
    auto rd = lowest_order_rates(d, sd, sys);
    CHECK(rd.gamma_th == 4.0 * rs.gamma_th);
    CHECK(rd.gamma2_dec == 4.0 * rs.gamma2_dec);
    CHECK(rd.gamma3_dec == 4.0 * rs.gamma3_dec);
    CHECK(rd.gamma4_dec == 4.0 * rs.gamma4_dec);
    CHECK(rd.gamma5_dec == 4.0 * rs.gamma5_dec);
    CHECK(rd.Y2 == 4.0 * rs.Y2);
    CHECK(rd.Y3 == 4.0 * rs.Y3);
  }
}

TEST_CASE("Y terms vanish when their exchange factor does", "[rates]") {
  SystemParams sys;
  auto sd = SpectralData::renormalized(sys);
  // lambda2 = mu2 = 0 leaves a real nonnegative radicand for Y2.
  CouplingSet c{0.1, 0.0, 0.07, 0.04, 0.05, 0.0, 0.01, 0.02};
  auto rs = lowest_order_rates(c, sd, sys);
  CHECK(rs.Y2 == 0.0);
  CHECK(rs.Y3 > 0.0);
}

TEST_CASE("formula overshoot is floored at zero", "[rates]") {
  SystemParams sys;
  auto sd = SpectralData::renormalized(sys);
  // No conserving couplings and no exchange on qubit 1: the closed-form
  // half-sum is exceeded by Y2 (= ee2 sigma2 / sqrt(2)), so the floor engages.
  CouplingSet c{0.0, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  auto rs = lowest_order_rates(c, sd, sys);
  double ee2 = 0.01;
  CHECK_THAT(rs.Y2, WithinRel(ee2 * sd.sigma_g_B2 / std::sqrt(2.0), 1e-14));
  CHECK(rs.gamma2_dec == 0.0);
  rs.validate();
}

TEST_CASE("spin-boson reduction satisfies its closed-form identity", "[rates]") {
  SystemParams sys;  // B1 = 1 carries the qubit level spacing
  FormFactor h = FormFactor::default_g();
  auto sd_h = SpectralData::from_form_factors(h, h, sys);

  auto zero = spin_boson_rates(0.0, 1.0, sd_h, 1.0);
  CHECK(zero.gamma_th == 0.0);
  CHECK(zero.gamma_dec == 0.0);

  const double lambda = 0.01;
  auto sb = spin_boson_rates(lambda, 1.0, sd_h, 1.0);
  CHECK_THAT(sb.gamma_dec - 0.5 * sb.gamma_th,
             WithinAbs(lambda * lambda * kPi * sd_h.sigma_f_0, 1e-12));

  // The cluster-rate family carries no explicit pi: its j=1 exchange term over
  // the spin-boson thermalization rate is exactly 2/pi.
  CouplingSet c{lambda, 0.0, lambda, 0.0, 0.0, 0.0, 0.0, 0.0};
  double j1_term = lambda * lambda * sd_h.sigma_g_B1;
  CHECK_THAT(j1_term / sb.gamma_th, WithinRel(2.0 / kPi, 1e-12));
}

TEST_CASE("cluster rate picks the slowest nonzero resonance", "[rates]") {
  using namespace std::complex_literals;
  std::vector<complexd> diag{0.0 + 0.0i, 0.0 + 0.01i, 0.0 + 0.02i};
  CHECK_THAT(cluster_rate(0.0, diag), WithinAbs(0.01, 1e-15));

  std::vector<complexd> off{1.0 + 0.005i, 1.0 + 0.003i};
  CHECK_THAT(cluster_rate(1.0, off), WithinAbs(0.003, 1e-15));

  CHECK_THROWS_AS(cluster_rate(0.0, {}), std::invalid_argument);
  std::vector<complexd> only_zero{0.0 + 0.0i};
  CHECK_THROWS_AS(cluster_rate(0.0, only_zero), std::invalid_argument);
}
