// system.hpp - two-qubit Hamiltonian spectrum, Gibbs weights, and Bohr-frequency clusters.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qres {

// Energy basis ordering is fixed everywhere, including file output:
// index 1 = |++>, 2 = |+->, 3 = |-+>, 4 = |-->.
struct SystemParams {
  double B1{1.0};    // effective field on qubit 1
  double B2{1.25};   // effective field on qubit 2
  double beta{1.0};  // inverse temperature

  void validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("SystemParams: beta must be > 0");
    if (!(B1 > 0.0) || !(B2 > B1))
      throw std::invalid_argument("SystemParams: need 0 < B1 < B2");
    // B2 = 2*B1 collapses two Bohr frequencies into one; rejected, not handled.
    if (std::abs(B2 / B1 - 2.0) < 1e-12)
      throw std::invalid_argument("SystemParams: B2/B1 = 2 makes Bohr frequencies collide");
  }
};

inline std::array<double, 4> hamiltonian_eigenvalues(const SystemParams& sys) {
  sys.validate();
  return {sys.B1 + sys.B2, sys.B1 - sys.B2, -sys.B1 + sys.B2, -sys.B1 - sys.B2};
}

inline double partition_function(const SystemParams& sys) {
  auto E = hamiltonian_eigenvalues(sys);
  double Z = 0.0;
  for (double e : E) Z += std::exp(-sys.beta * e);
  return Z;
}

inline std::array<double, 4> gibbs_weights(const SystemParams& sys) {
  auto E = hamiltonian_eigenvalues(sys);
  double Z = partition_function(sys);
  std::array<double, 4> w{};
  for (int i = 0; i < 4; ++i) w[i] = std::exp(-sys.beta * E[i]) / Z;
  return w;
}

// Nonnegative Liouvillian eigenvalues with multiplicities, sorted ascending.
// The negative eigenvalues mirror the positive ones, so multiplicities over
// the full spectrum sum to 16.
inline std::vector<std::pair<double, int>> liouville_spectrum(const SystemParams& sys) {
  sys.validate();
  std::vector<std::pair<double, int>> s = {
      {0.0, 4},
      {2.0 * (sys.B2 - sys.B1), 1},
      {2.0 * sys.B1, 2},
      {2.0 * sys.B2, 2},
      {2.0 * (sys.B1 + sys.B2), 1},
  };
  std::sort(s.begin(), s.end());
  return s;
}

// One set of jointly evolving density-matrix slots: all index pairs (m, n),
// 1-based, sharing the Bohr frequency e = E_m - E_n.
struct Cluster {
  double e{0.0};
  std::vector<std::pair<int, int>> pairs;  // sorted lexicographically

  bool contains(int m, int n) const {
    return std::find(pairs.begin(), pairs.end(), std::make_pair(m, n)) != pairs.end();
  }
};

struct ClusterPartition {
  std::vector<Cluster> clusters;  // sorted by e ascending

  const Cluster* find(int m, int n) const {
    for (const auto& c : clusters)
      if (c.contains(m, n)) return &c;
    return nullptr;
  }

  const Cluster& at_energy(double e, double tol = 1e-12) const {
    for (const auto& c : clusters)
      if (std::abs(c.e - e) <= tol) return c;
    throw std::invalid_argument("ClusterPartition: no cluster at energy " + std::to_string(e));
  }
};

// Groups all N*N ordered index pairs (m, n) by the energy difference
// E_m - E_n. Equality of differences is decided with absolute tolerance;
// inputs are exact user parameters, so the tolerance only absorbs float noise.
inline ClusterPartition cluster_partition(const std::vector<double>& energies,
                                          double tol = 1e-12) {
  const int N = static_cast<int>(energies.size());
  if (N < 2) throw std::invalid_argument("cluster_partition: need at least 2 energies");
  ClusterPartition part;
  for (int m = 1; m <= N; ++m) {
    for (int n = 1; n <= N; ++n) {
      double e = energies[m - 1] - energies[n - 1];
      Cluster* home = nullptr;
      for (auto& c : part.clusters)
        if (std::abs(c.e - e) <= tol) { home = &c; break; }
      if (!home) {
        part.clusters.push_back(Cluster{e, {}});
        home = &part.clusters.back();
      }
      home->pairs.emplace_back(m, n);
    }
  }
  std::sort(part.clusters.begin(), part.clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.e < b.e; });
  for (auto& c : part.clusters) std::sort(c.pairs.begin(), c.pairs.end());
  return part;
}

inline ClusterPartition cluster_partition(const SystemParams& sys) {
  auto E = hamiltonian_eigenvalues(sys);
  return cluster_partition(std::vector<double>(E.begin(), E.end()));
}

// The five clusters holding the on/above-diagonal slots:
//   diagonal {(1,1),(2,2),(3,3),(4,4)} at e = 0,
//   {(1,3),(2,4)} at e = 2*B1, {(1,2),(3,4)} at e = 2*B2,
//   {(2,3)} at e = 2*(B1-B2), {(1,4)} at e = 2*(B1+B2).
// Below-diagonal slots live in the mirrored clusters at -e.
inline std::array<Cluster, 5> canonical_clusters(const SystemParams& sys) {
  auto part = cluster_partition(sys);
  return {part.at_energy(0.0),
          part.at_energy(2.0 * sys.B1),
          part.at_energy(2.0 * sys.B2),
          part.at_energy(2.0 * (sys.B1 - sys.B2)),
          part.at_energy(2.0 * (sys.B1 + sys.B2))};
}

}  // namespace qres
