#pragma once

// The bracket layer: a Poisson bracket engine over generator relations, the
// s_= / s_x / epsilon combinatorial functions, matrix brackets, the R-matrix
// with its Yang-Baxter checker, and the pushforward verifier that
// machine-checks the measurement-map Poisson property on instances.

#include "pnet/measurement.hpp"
#include "pnet/report.hpp"

namespace pnet {

// A Poisson structure given by its values on pairs of generators, extended to
// rational functions by the Leibniz rule:
//   {f, g} = sum_{a<b} {z_a, z_b} (d_a f d_b g - d_b f d_a g).
struct PoissonStructure {
  VarTablePtr vars;
  std::map<std::pair<int, int>, RationalFunction> pi;  // keyed a < b

  void set(int a, int b, RationalFunction value);
  RationalFunction bracket(const RationalFunction& f, const RationalFunction& g) const;
  RationalFunction jacobiator(const RationalFunction& f, const RationalFunction& g,
                              const RationalFunction& h) const;
};

PoissonStructure log_canonical(const BracketSpec& spec);
RationalFunction log_canonical_bracket(const BracketSpec& spec, const RationalFunction& f,
                                       const RationalFunction& g);

// ---------------------------------------------------------------------------
// The combinatorial coefficient functions on cyclically ordered labels 1..n
// (i, i' sources; j, j' sinks). Values in {0, +-1/2, +-1}.
Rat s_eq(int i, int j, int ip, int jp, int n);
Rat s_cross(int i, int j, int ip, int jp, int n);

// 0 when the pair straddles the threshold k, sign(i - ip) otherwise.
Rat epsilon_pair(int i, int ip, int k);

// ---------------------------------------------------------------------------
// Generic matrix-entry bracket {., .}_{I,J}

// Matrix entries M_pq as free generators with the two-parameter bracket
//   {M_pq, M_rs} = (alpha-beta) s_=(..) M_ps M_rq + (alpha+beta) s_x(..) M_pq M_rs.
struct MatrixBracketAlgebra {
  std::vector<int> I, J;  // ascending labels, I u J = [1,n]
  int n = 0;
  VarTablePtr vars;
  int alpha = -1, beta = -1;
  std::vector<std::vector<int>> entry;  // entry[p][q] = variable id of M_pq
  PoissonStructure structure;

  RationalFunction entry_rf(int p, int q) const {
    return RationalFunction::variable(entry[p][q]);
  }
};

MatrixBracketAlgebra make_matrix_bracket(const std::vector<int>& I, int n);

// Formal coefficients of {M_pq, M_rs}: first of M_ps M_rq, second of M_pq M_rs.
std::pair<RationalFunction, RationalFunction> matrix_bracket_coeffs(
    const MatrixBracketAlgebra& alg, int p, int q, int r, int s);

// The Sklyanin-type bracket on square transfer matrices A = M W0 with
// I = [1,k], J = [k+1,2k], expressed through the s-functions.
struct SklyaninAlgebra {
  int k = 0;
  VarTablePtr vars;
  int alpha = -1, beta = -1;
  std::vector<std::vector<int>> entry;  // A_ij variable ids

  RationalFunction entry_rf(int i, int j) const { return RationalFunction::variable(entry[i][j]); }
};

SklyaninAlgebra make_sklyanin(int k);
RationalFunction sklyanin_bracket(const SklyaninAlgebra& alg, int i, int j, int ip, int jp);

// ---------------------------------------------------------------------------
// Identity checks

// The three s-function identities, exhaustively over all I and sextuples.
Report check_s_identities(int n);
// Symbolic Jacobi identity of {., .}_{I,J} for every I subset [1,n].
Report check_jacobi_ij(int n);
// Both, as used by the jacobi CLI verb.
Report check_jacobi(int n_jacobi, int n_exhaustive);

// ---------------------------------------------------------------------------
// R-matrix and the modified classical Yang-Baxter equation

using RatMat = std::vector<std::vector<Rat>>;

RatMat r_apply(const RatMat& xi, const Rat& alpha, const Rat& beta);
RatMat mat_commutator(const RatMat& a, const RatMat& b);

// Verifies, on random integer matrix pairs, that R_{alpha,beta} is
// skew-symmetric for the trace form and satisfies the modified classical
// Yang-Baxter equation with right-hand side -c [xi, eta], c = ((alpha-beta)/2)^2.
// For alpha - beta = +-2 this is the textbook normalization verbatim.
Report mcybe_check(int k, const Rat& alpha, const Rat& beta, int trials, unsigned long seed);

// ---------------------------------------------------------------------------
// Pushforward verification (the measurement map is Poisson)

// Reduced chart, symbolic alpha/beta: checks
//   {M_pq, M_rs}_flags == (alpha-beta) s_= M_ps M_rq + (alpha+beta) s_x M_pq M_rs
// for every pair of measurement-matrix entries.
Report verify_pushforward(const Network& net, const std::string& instance);
// Same with alpha, beta specialized to rationals given as expression strings.
Report verify_pushforward_at(const Network& net, const std::string& instance,
                             const std::string& alpha, const std::string& beta);
// Same computed from the 6-parameter chart, with alpha = a23 + a13 - a12 and
// beta = b23 + b13 - b12 substituted on the right-hand side.
Report verify_pushforward_6param(const Network& net, const std::string& instance);
// Signed Grassmannian entries obey the same bracket with the signed products.
Report verify_pushforward_grassmannian(const Network& net, const std::string& instance);
// Measurements (hence their brackets) are unchanged under random gauges.
Report verify_gauge_invariance(const Network& net, const std::string& instance, unsigned long seed);

// Determines the unique flag-labelling convention for which the pushforward
// identity holds on the given network; returns (swap at white, swap at black).
std::pair<bool, bool> calibrate_flag_labels(const Network& net);

// ---------------------------------------------------------------------------
// Grassmannian bracket via Pluecker-ratio generators

// One term coeff * a_{first} a_{second} of a formal bracket of two ratios.
struct ATerm {
  Rat coeff;
  std::vector<int> first;   // sorted k-subsets
  std::vector<int> second;
};

// {a_I, a_I'} for the (alpha-beta)-part (variant 1) or (alpha+beta)-part
// (variant 2) of the cell bracket, with ordered-replacement sign handling.
std::vector<ATerm> grassmann_bracket_a(const std::vector<int>& I, const std::vector<int>& Ip,
                                       int variant, int k);

// Exhaustive check of the two epsilon identities against 2 s_= / 2 s_x.
Report check_epsilon_identities(int max_n);

// Verifies {m^I_pj, m^I_rs}^variant computed through the a-generators on a
// generic cell point equals 2 s_=/x times the matching entry products, for
// all quadruples of the given cell. With symbolic entries when symbolic is
// true, otherwise at a deterministic rational point (still exact).
Report check_cell_bracket(int n, int k, const std::vector<int>& I, bool symbolic);
Report check_cell_bracket_all(int max_n, int symbolic_max_n);

}  // namespace pnet
