#pragma once

// Cluster algebras of geometric type: seeds, matrix and cluster mutations,
// tau-coordinates, the Grassmannian initial cluster on the open cell, the
// hexagonal network N(k,m) realizing it through face weights, and the
// bracket-compatibility checker.

#include "pnet/faces.hpp"
#include "pnet/report.hpp"

namespace pnet {

using IntMat = std::vector<std::vector<int>>;

struct Seed {
  VarTablePtr vars;                        // ambient field variables
  std::vector<RationalFunction> cluster;   // x_1..x_n
  std::vector<RationalFunction> stable;    // x_{n+1}..x_{n+m}
  IntMat btilde;                           // n x (n+m), principal part skew-symmetric

  int n() const { return static_cast<int>(cluster.size()); }
  int m() const { return static_cast<int>(stable.size()); }
  const RationalFunction& var(int t) const {  // t in [0, n+m)
    return t < n() ? cluster[t] : stable[t - n()];
  }
};

// Matrix mutation in direction k (1-based).
IntMat mutate_matrix(const IntMat& b, int k);
// Seed mutation: exchange relation plus matrix mutation.
Seed mutate_cluster(const Seed& seed, int k);

struct TauCluster {
  std::vector<RationalFunction> tau;  // n+m entries
  std::vector<int> kappa;             // kappa_j, zero on cluster directions
};

// Smallest nonnegative stable exponents making x -> tau nondegenerate,
// found by incremental rank checks; requires rank btilde = n.
std::vector<int> select_kappa(const IntMat& btilde);
// tau_j = x_j^{kappa_j} prod_t x_t^{b_jt}, with the skew extension
// b_{jt} = -b_{tj} on stable rows.
TauCluster tau_coordinates(const Seed& seed, const std::vector<int>& kappa);

// ---------------------------------------------------------------------------
// The Grassmannian initial cluster

struct GrassmannSeed {
  int k = 0, m = 0;
  VarTablePtr vars;  // entries y_{ij} of a symbolic k x m matrix
  Seed seed;
  // f[i][j] for i in [0,k], j in [1,m+1], padded with 1 outside the grid.
  std::vector<std::vector<RationalFunction>> f;

  int l(int i, int j) const { return std::min(i - 1, m - j); }
  bool is_stable(int i, int j) const { return i == k || j == 1; }
  // Extended-cluster index of grid direction (i,j): cluster directions
  // (i in [1,k-1], j in [2,m]) first, then stable f_11..f_k1, f_k2..f_km.
  int dir_index(int i, int j) const;
};

GrassmannSeed grassmann_initial_seed(int k, int m);

// ---------------------------------------------------------------------------
// The hexagonal network N(k,m)

// Acyclic network with k sources, m sinks and km+1 faces whose bounded faces
// are the (k-1)(m-1) hexagons of a lattice parallelogram.
Network build_hex_network(int k, int m);

// N(k,m) with its faces, face weights, the (i,j) face labelling and the
// functions f_ij evaluated through boundary measurements.
struct HexModel {
  int k = 0, m = 0, n = 0;
  Network net;
  FaceSet fs;
  std::vector<RationalFunction> ys;
  std::map<std::pair<int, int>, int> face_label;  // (i,j), i in [1,k], j in [k+1,n]
  int infinity_face = -1;
  // f[i][j] as rational functions in the edge weights, padded like the seed.
  std::vector<std::vector<RationalFunction>> f;

  HexModel() : net(nullptr) {}
};

HexModel build_hex_model(int k, int m);

// f_ij as a signed monomial in the face weights (the closed product formula,
// sign fixed by the boundary-measurement minor).
FaceMonomial f_via_face_weights(const HexModel& hm, int i, int j);
// tau-coordinate of a stable direction, stripped of its own f factor.
FaceMonomial tau_star(const HexModel& hm, const GrassmannSeed& gs, int i, int j);

// ---------------------------------------------------------------------------
// Instance checks

// f_ij equals the closed face-weight product, for every (i,j).
Report check_face_products(int k, int m);
// Cluster-direction tau-coordinates are single face weights.
Report check_tau_cluster_faces(int k, int m);
// The five stable cases reduce to the stated face-weight products.
Report check_tau_stable_faces(int k, int m);
// The coefficient matrix of the face-weight bracket in the tau basis has its
// first n rows equal to (alpha - beta) * btilde; reports the factor.
Report check_compatibility(int k, int m);

struct CompatibilityData {
  Report report;
  VarTablePtr params;  // alpha, beta
  IntMat btilde;
  std::vector<std::vector<RationalFunction>> omega_rows;  // first n rows of Omega^tau
};
CompatibilityData compute_compatibility(int k, int m);

}  // namespace pnet
