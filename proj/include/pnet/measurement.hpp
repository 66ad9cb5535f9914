#pragma once

// Boundary measurements as exact rational functions via the vertex-splitting
// elimination algorithm, the truncated signed-path-sum oracle, measurement and
// extended matrices, Pluecker coordinates, network concatenation and the
// elementary GL_n action.

#include "pnet/network.hpp"

#include <map>
#include <memory>
#include <vector>

namespace pnet {

struct MeasurementMatrix {
  std::vector<int> sources;  // I, ascending boundary labels
  std::vector<int> sinks;    // J, ascending
  std::vector<std::vector<RationalFunction>> entries;  // k x m
};

// Computes all boundary measurements of one network with shared memoization
// across the derived split networks.
class Measurer {
public:
  explicit Measurer(const Network& net);
  ~Measurer();
  Measurer(const Measurer&) = delete;
  Measurer& operator=(const Measurer&) = delete;

  RationalFunction measure(int source_label, int sink_label);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

RationalFunction boundary_measurement(const Network& net, int source_label, int sink_label);
MeasurementMatrix measurement_matrix(const Network& net);

// Truncated oracle: substitute w_e -> value(w_e) * t, enumerate all paths of
// length <= order by depth-limited search and sum their signed weights.
PowerSeries path_sum_oracle(const Network& net, int source_label, int sink_label, int order,
                            const std::map<int, Rat>& point);

// Sign (-1)^{c(C_P)-1} of a source-to-sink path given by its vertex sequence.
int path_sign(const Network& net, const std::vector<int>& verts);

using RFMat = std::vector<std::vector<RationalFunction>>;

struct ExtendedMatrix {
  std::vector<int> sources;  // I
  int n = 0;
  RFMat entries;  // k x n, identity on the columns indexed by I
};

// Number of elements of I strictly between min(i_p, j) and max(i_p, j).
int interleaving_count(const std::vector<int>& I, int p, int j);

ExtendedMatrix extended_matrix(const Network& net);

struct PluckerVector {
  int n = 0, k = 0;
  std::map<std::vector<int>, RationalFunction> coords;  // sorted k-subsets
};

PluckerVector plucker(const ExtendedMatrix& x);

// A = M W0 for square networks (sources b_1..b_L on the left, sinks on the
// right); A is the top-numbered line transfer matrix.
RFMat a_matrix(const Network& net);

// Concatenation: every sink of n1 is glued to the source of n2 on the same
// line, glued edges merge with multiplied weights. Both operands must be
// square networks over the same variable table.
Network concatenate(const Network& n1, const Network& n2);

// Concatenation of n(n-1) rho factors with fresh symbolic weights d_j, c_j;
// represents a generic element of GL_n.
Network generic_network(int n, VarTablePtr vars);

struct GlElement {
  enum class Kind { Diag, Lower, Upper };
  Kind kind = Kind::Diag;
  std::vector<RationalFunction> diag;  // Diag entries d_1..d_n
  int index = 0;                       // i of E^-_i / E^+_i
  RationalFunction coeff;              // l or u

  static GlElement diagonal(std::vector<RationalFunction> d);
  static GlElement lower(int i, RationalFunction l);
  static GlElement upper(int i, RationalFunction u);
};

RFMat gl_matrix(const GlElement& a, int n);

// N composed with the network of an elementary group element: the element's
// one-column network is glued along the whole boundary circle, with the
// horizontal wires through the source labels reversed.
Network act_elementary(const Network& net, const GlElement& a);

// Small exact matrix helpers over the rational-function field.
RFMat rf_identity(int n);
RFMat rf_mul(const RFMat& a, const RFMat& b);
bool rf_equal_mat(const RFMat& a, const RFMat& b);
RationalFunction rf_det(RFMat a);
// Representative of the row span with the identity on the given columns.
RFMat normalize_on_columns(const RFMat& x, const std::vector<int>& cols);

}  // namespace pnet
