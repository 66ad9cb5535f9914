#pragma once

// Faces of the embedded network, face weights, the directed dual network,
// the induced face-weight bracket, and path weights as face-weight monomials
// via loop erasure.

#include "pnet/network.hpp"

#include <map>
#include <vector>

namespace pnet {

struct FaceSet {
  struct Face {
    bool bounded = true;
    // Boundary traversal with the face on the left: graph edges with +1 when
    // the edge direction matches the traversal, and the boundary arcs met.
    std::vector<std::pair<int, int>> boundary;  // (edge id, orientation)
    std::vector<int> arcs;                      // arc l runs b_{l+1} -> b_{l+2 mod n}
  };
  std::vector<Face> faces;
  std::map<int, std::pair<int, int>> side;  // edge id -> (face on left, face on right)
  std::map<int, int> arc_face;              // arc index -> face containing it
};

class FacesPreconditionError : public std::runtime_error {
public:
  FacesPreconditionError(std::string msg, std::vector<int> edges)
      : std::runtime_error(std::move(msg)), offending_edges(std::move(edges)) {}
  std::vector<int> offending_edges;
};

// Rotation-system face traversal; requires every edge to lie on some
// source-to-sink path and checks the Euler count |E| - |V_int| + 1.
FaceSet enumerate_faces(const Network& net);

// y_f = prod w_e^{gamma_e}; the product over all faces is 1.
std::vector<RationalFunction> face_weights(const Network& net, const FaceSet& fs);

struct DualEdge {
  int from = 0, to = 0;   // face indices
  int primal_edge = 0;
  RationalFunction weight;  // alpha - beta, alpha, or -beta
};

struct DualNetwork {
  VarTablePtr params;  // carries just alpha, beta
  int alpha = -1, beta = -1;
  int n_faces = 0;
  std::vector<DualEdge> edges;
};

// One dual edge per primal edge with differently colored endpoints
// (boundary vertices count as gray), oriented with the white endpoint on the
// left of the dual edge.
DualNetwork dual_network(const Network& net, const FaceSet& fs);

// Coefficient of {y_f, y_g} / (y_f y_g): dual weights f->g minus g->f.
RationalFunction face_bracket_coeff(const DualNetwork& dual, int f, int g);

// Signed Laurent monomial in face weights.
struct FaceMonomial {
  int sign = 1;
  std::map<int, int> exponents;  // face index -> exponent
};

// w_P as a face-weight monomial, via loop erasure and winding numbers.
FaceMonomial path_face_monomial(const Network& net, const FaceSet& fs, const Path& p);

// Evaluates sign * prod y_f^{e_f} using the given face weights.
RationalFunction face_monomial_value(const FaceMonomial& m,
                                     const std::vector<RationalFunction>& weights);

}  // namespace pnet
