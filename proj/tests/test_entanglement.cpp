#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "qres/entanglement.hpp"
#include "qres/solvable.hpp"
#include "support.hpp"

using namespace qres;
using Catch::Matchers::WithinAbs;

namespace {

Matrix4c psd_sqrt(const Matrix4c& h) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(h);
  Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
         es.eigenvectors().adjoint();
}

// Independent route to the same spectrum: eigenvalues of the Hermitian
// sqrt(rho) * flipped(rho) * sqrt(rho), which is similar to xi for full-rank rho.
std::array<double, 4> hermitian_oracle(const DensityMatrix4& rho) {
  const Matrix4c& F = spin_flip_matrix();
  Matrix4c sr = psd_sqrt(rho.m);
  Matrix4c tilde = F * rho.m.conjugate() * F;
  Matrix4c M = sr * tilde * sr;
  Eigen::SelfAdjointEigenSolver<Matrix4c> es((M + M.adjoint()) / 2.0,
                                             Eigen::EigenvaluesOnly);
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) out[i] = std::max(es.eigenvalues()(i), 0.0);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace

TEST_CASE("spin flip matrix squares to the identity", "[entanglement]") {
  const Matrix4c& F = spin_flip_matrix();
  CHECK((F * F - Matrix4c::Identity()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(F(0, 3) == complexd(-1.0));
  CHECK(F(1, 2) == complexd(1.0));
}

TEST_CASE("concurrence of the reference states", "[entanglement]") {
  auto bell = initial_state(SuperpositionFamily{1.0, 1.0});
  CHECK_THAT(concurrence(bell), WithinAbs(1.0, 1e-12));

  CHECK_THAT(concurrence(DensityMatrix4::basis_state(1)), WithinAbs(0.0, 1e-12));
  CHECK_THAT(concurrence(initial_state(BraunProduct{})), WithinAbs(0.0, 1e-10));
  CHECK_THAT(concurrence(DensityMatrix4::maximally_mixed()), WithinAbs(0.0, 1e-12));
}

TEST_CASE("superposition family hits 2 sqrt(p(1-p))", "[entanglement]") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  for (int k = 1; k <= 20; ++k) {
    double p = k / 21.0;
    // Random phases must not matter: concurrence sees only the moduli here.
    complexd a1 = std::polar(std::sqrt(p), angle(rng));
    complexd a2 = std::polar(std::sqrt(1.0 - p), angle(rng));
    auto rho = initial_state(SuperpositionFamily{a1, a2});
    INFO("p = " << p);
    CHECK_THAT(std::abs(rho.at(1, 1) - p), WithinAbs(0.0, 1e-14));
    CHECK_THAT(concurrence(rho), WithinAbs(2.0 * std::sqrt(p * (1.0 - p)), 1e-10));
  }
  auto rho_01 = initial_state(SuperpositionFamily{std::sqrt(0.1), std::sqrt(0.9)});
  CHECK_THAT(concurrence(rho_01), WithinAbs(0.6, 1e-12));
}

TEST_CASE("superposition family is pure and rejects the zero pair", "[entanglement]") {
  auto rho = initial_state(SuperpositionFamily{complexd(0.3, 0.4), 0.7});
  CHECK((rho.m * rho.m - rho.m).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(initial_state(SuperpositionFamily{0.0, 0.0}), std::invalid_argument);

  auto one = initial_state(SuperpositionFamily{1.0, 0.0});
  CHECK(max_entry_distance(one, DensityMatrix4::basis_state(1)) < 1e-15);
}

TEST_CASE("braun product state matches the sign pattern", "[entanglement]") {
  auto rho = initial_state(BraunProduct{});
  rho.validate();
  for (int m = 1; m <= 4; ++m)
    for (int n = 1; n <= 4; ++n) {
      double sign = ((m <= 2) == (n <= 2)) ? 1.0 : -1.0;
      CHECK(rho.at(m, n) == complexd(0.25 * sign));
    }
  // Rank-one product state: it is pure with zero concurrence.
  CHECK((rho.m * rho.m - rho.m).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("xi spectrum of simple states", "[entanglement]") {
  auto mixed = xi_eigenvalues(DensityMatrix4::maximally_mixed());
  for (double v : mixed) CHECK_THAT(v, WithinAbs(1.0 / 16.0, 1e-13));

  auto bell = xi_eigenvalues(initial_state(SuperpositionFamily{1.0, 1.0}));
  CHECK_THAT(bell[0], WithinAbs(1.0, 1e-12));
  for (int i = 1; i < 4; ++i) CHECK_THAT(bell[i], WithinAbs(0.0, 1e-12));
}

TEST_CASE("xi spectrum agrees with the Hermitian oracle", "[entanglement]") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 50; ++i) {
    auto rho = test::random_density_matrix(rng);
    auto direct = xi_eigenvalues(rho);
    auto oracle = hermitian_oracle(rho);
    for (int k = 0; k < 4; ++k) {
      INFO("draw " << i << ", eigenvalue " << k);
      CHECK_THAT(direct[k], WithinAbs(oracle[k], 1e-8));
    }
    double c_direct = concurrence(rho);
    double c_oracle = std::max(0.0, std::sqrt(oracle[0]) - std::sqrt(oracle[1]) -
                                        std::sqrt(oracle[2]) - std::sqrt(oracle[3]));
    CHECK_THAT(c_direct, WithinAbs(c_oracle, 1e-8));
    CHECK(c_direct >= 0.0);
    CHECK(c_direct <= 1.0);
  }
}

TEST_CASE("xi eigenvalue sum equals the trace", "[entanglement]") {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 20; ++i) {
    auto rho = test::random_density_matrix(rng);
    auto ev = xi_eigenvalues(rho);
    double sum = ev[0] + ev[1] + ev[2] + ev[3];
    CHECK_THAT(sum, WithinAbs(xi_matrix(rho).trace().real(), 1e-9));
  }
}

TEST_CASE("concurrence is invariant under local phase rotations", "[entanglement]") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  for (int i = 0; i < 20; ++i) {
    auto rho = test::random_density_matrix(rng);
    double t1 = angle(rng), t2 = angle(rng);
    Matrix4c U = Matrix4c::Zero();
    U(0, 0) = std::polar(1.0, 0.5 * (t1 + t2));
    U(1, 1) = std::polar(1.0, 0.5 * (t1 - t2));
    U(2, 2) = std::polar(1.0, 0.5 * (-t1 + t2));
    U(3, 3) = std::polar(1.0, 0.5 * (-t1 - t2));
    DensityMatrix4 rotated{U * rho.m * U.adjoint(), false};
    CHECK_THAT(concurrence(rotated), WithinAbs(concurrence(rho), 1e-10));
  }
}

TEST_CASE("concurrence varies slowly along an exact trajectory", "[entanglement]") {
  SystemParams sys;
  MemoryFunctions mf(FormFactor::default_f(), sys.beta);
  auto rho0 = initial_state(SuperpositionFamily{std::sqrt(0.3), std::sqrt(0.7)});
  const double dt = 0.05;
  double prev = concurrence(rho0);
  for (int i = 1; i <= 200; ++i) {
    auto rho_t = exact_evolve(rho0, i * dt, 0.1, 0.05, mf, sys);
    double c = concurrence(rho_t);
    CHECK(std::abs(c - prev) <= 2.0 * dt + 1e-12);
    prev = c;
  }
}

TEST_CASE("disentanglement bounds reproduce the arithmetic example", "[entanglement]") {
  DisentanglementInputs d;
  d.p = 0.5;
  d.delta2 = 0.01;
  d.delta3 = 0.01;
  d.delta5 = 0.02;
  d.delta_plus = 0.01;
  d.delta_minus = 0.01;
  d.kappa_max = 0.1;

  auto [tA, tB] = disentanglement_bounds(d);

  // Three upper-bound terms evaluated independently.
  double a1 = (1.0 / 0.02) * std::log(std::sqrt(0.25) / 0.01);
  double a2 = (1.0 / 0.02) * std::log(0.25 / 0.01);
  double a3 = 1.0 / 0.02;
  CHECK_THAT(a1, WithinAbs(50.0 * std::log(50.0), 1e-9));
  CHECK_THAT(a2, WithinAbs(50.0 * std::log(25.0), 1e-9));
  CHECK_THAT(a3, WithinAbs(50.0, 1e-12));
  CHECK_THAT(tA, WithinAbs(std::max({a1, a2, a3}), 1e-12));
  CHECK_THAT(tA, WithinAbs(50.0 * std::log(50.0), 1e-9));

  double b1 = (1.0 / 0.02) * std::log(1.25);
  double b2 = (1.0 / 0.01) * std::log(1.01);
  double b3 = 1.0 / (0.02 - 0.005);
  CHECK_THAT(tB, WithinAbs(std::min({b1, b2, b3}), 1e-12));
}

TEST_CASE("upper disentanglement bound grows as the coupling shrinks", "[entanglement]") {
  double prev = 0.0;
  for (double kap : {0.2, 0.1, 0.05}) {
    DisentanglementInputs d;
    d.p = 0.5;
    d.delta2 = 0.01;
    d.delta3 = 0.01;
    d.delta5 = 0.02;
    d.delta_plus = 0.01;
    d.delta_minus = 0.01;
    d.kappa_max = kap;
    auto [tA, tB] = disentanglement_bounds(d);
    CHECK(tA > prev);
    prev = tA;
  }
}

TEST_CASE("lower bound grows when rates scale with the coupling squared", "[entanglement]") {
  // The survival bound increases for weaker coupling only when the thermalization
  // rates follow their physical quadratic scaling; with rates pinned, its middle
  // term shrinks with the coupling.
  double prev = 0.0;
  for (double kap : {0.2, 0.1, 0.05}) {
    DisentanglementInputs d;
    d.p = 0.5;
    d.delta2 = kap * kap;
    d.delta3 = kap * kap;
    d.delta5 = 2.0 * kap * kap;
    d.delta_plus = kap * kap;
    d.delta_minus = kap * kap;
    d.kappa_max = kap;
    auto [tA, tB] = disentanglement_bounds(d);
    CHECK(tB >= prev);
    prev = tB;
  }
}

TEST_CASE("bounds are symmetric in p and 1-p", "[entanglement]") {
  for (double p : {0.1, 0.3, 0.45}) {
    DisentanglementInputs lo, hi;
    lo.p = p;
    hi.p = 1.0 - p;
    for (auto* d : {&lo, &hi}) {
      d->delta2 = 0.02;
      d->delta3 = 0.03;
      d->delta5 = 0.06;
      d->delta_plus = 0.03;
      d->delta_minus = 0.02;
      d->kappa_max = 0.1;
    }
    auto [tA1, tB1] = disentanglement_bounds(lo);
    auto [tA2, tB2] = disentanglement_bounds(hi);
    CHECK_THAT(tA1, WithinAbs(tA2, 1e-12));
    CHECK_THAT(tB1, WithinAbs(tB2, 1e-12));
  }
}

TEST_CASE("bound preconditions are enforced", "[entanglement]") {
  DisentanglementInputs d;
  d.p = 0.5;
  d.delta2 = 0.01;
  d.delta3 = 0.01;
  d.delta5 = 0.02;
  d.delta_plus = 0.01;
  d.delta_minus = 0.01;
  d.kappa_max = 0.1;

  auto bad = d;
  bad.p = 0.0;
  CHECK_THROWS_AS(disentanglement_bounds(bad), std::invalid_argument);
  bad.p = 1.0;
  CHECK_THROWS_AS(disentanglement_bounds(bad), std::invalid_argument);
  bad = d;
  bad.delta2 = 0.0;
  CHECK_THROWS_AS(disentanglement_bounds(bad), std::invalid_argument);
  bad = d;
  bad.delta_plus = 0.5;
  CHECK_THROWS_AS(disentanglement_bounds(bad), std::invalid_argument);
}

TEST_CASE("bound inputs derive from couplings and spectral data", "[entanglement]") {
  SystemParams sys;
  auto sd = SpectralData::renormalized(sys);
  CouplingSet c{0.1, 0.2, 0.05, 0.07, 0.03, 0.04, 0.02, 0.01};
  auto d = DisentanglementInputs::from_couplings(0.4, c, sd);

  CHECK_THAT(d.delta2, WithinAbs((0.01 + 0.0009) * sd.sigma_g_B1, 1e-15));
  CHECK_THAT(d.delta3, WithinAbs((0.04 + 0.0016) * sd.sigma_g_B2, 1e-15));
  double conserving = 0.12 * 0.12 + 0.02 * 0.02 + 0.01 * 0.01;
  CHECK_THAT(d.delta5, WithinAbs(d.delta2 + d.delta3 + conserving * sd.sigma_f_0, 1e-15));
  CHECK(d.delta_plus == std::max(d.delta2, d.delta3));
  CHECK(d.delta_minus == std::min(d.delta2, d.delta3));
  CHECK(d.kappa_max == 0.2);
  d.validate();
}
