#pragma once

// Perfect planar directed networks in a disk: boundary sources/sinks on a
// circle, 3-valent white/black interior, weighted edges, all geometry in
// exact rational arithmetic.

#include "pnet/expr.hpp"
#include "pnet/geometry.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pnet {

enum class Role { Source, Sink };
enum class VertexColor { White, Black };

struct Violation {
  std::string rule;
  std::string detail;
};

class Network {
public:
  struct EdgeRec {
    int id;
    int from;
    int to;
    RationalFunction weight;
  };

  explicit Network(VarTablePtr vars) : vars_(std::move(vars)) {}

  int add_boundary(Role role, Vec2 pos);
  int add_internal(VertexColor color, Vec2 pos);
  int add_edge(int from, int to, RationalFunction weight);

  const VarTablePtr& vars() const { return vars_; }
  int n_boundary() const { return static_cast<int>(boundary_.size()); }
  int n_internal() const { return static_cast<int>(internal_.size()); }
  int n_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<int>& boundary_ids() const { return boundary_; }  // ccw
  const std::vector<int>& internal_ids() const { return internal_; }
  const std::vector<EdgeRec>& edges() const { return edges_; }
  const EdgeRec& edge(int eid) const { return edges_.at(edge_index_.at(eid)); }
  void set_weight(int eid, RationalFunction w) { edges_[edge_index_.at(eid)].weight = std::move(w); }

  bool is_boundary(int v) const { return vert_.at(v).boundary; }
  Role role(int v) const { return vert_.at(v).role; }
  VertexColor color(int v) const { return vert_.at(v).color; }
  const Vec2& pos(int v) const { return vert_.at(v).pos; }

  std::vector<int> out_edges(int v) const;
  std::vector<int> in_edges(int v) const;
  std::vector<int> incident_edges(int v) const;

  // 1-based counterclockwise boundary labels b_1..b_n.
  int boundary_label(int v) const;
  int vertex_of_label(int label) const { return boundary_.at(label - 1); }
  std::vector<int> source_labels() const;
  std::vector<int> sink_labels() const;

private:
  struct VertRec {
    bool boundary = false;
    Role role = Role::Source;
    VertexColor color = VertexColor::White;
    Vec2 pos;
  };

  VarTablePtr vars_;
  std::vector<int> boundary_;
  std::vector<int> internal_;
  std::map<int, VertRec> vert_;
  std::vector<EdgeRec> edges_;
  std::map<int, size_t> edge_index_;
  int next_vertex_ = 1;
  int next_edge_ = 1;
};

// Structural and geometric validation; empty result means all invariants hold.
std::vector<Violation> validate(const Network& net);

// Incident edges of an internal vertex in counterclockwise angular order.
std::vector<int> rotation(const Network& net, int vertex);

// Concordance number (mod 2) of a closed polygonal curve. Throws
// std::domain_error if two consecutive segments point in exactly opposite
// directions (the spanned cone would be a line).
int concordance(const std::vector<Vec2>& curve);
// Same with an explicit probe direction; throws std::invalid_argument when
// the probe is collinear with one of the curve segments.
int concordance_with_probe(const std::vector<Vec2>& curve, const Vec2& probe);

struct Path {
  std::vector<int> edges;  // consecutive edge ids
};

// Vertex sequence v_1, ..., v_{r+1} of a path; validates consecutive incidence.
std::vector<int> path_vertices(const Network& net, const Path& p);

// Signed weight (-1)^{c(C_P)-1} * prod w_e of a source-to-sink path; the curve
// is closed with the counterclockwise convex-hull return arc.
RationalFunction path_weight(const Network& net, const Path& p);
// Same sign rule for a closed cycle.
RationalFunction cycle_weight(const Network& net, const Path& cycle);

// Splits a path with a repeated edge into (P', C^0) with w_P = -w_{P'} w_{C^0}.
std::pair<Path, Path> decompose_path(const Network& net, const Path& p);

// Per-vertex rescaling by Laurent monomials; t defaults to 1 off the map and
// must be 1 on boundary vertices. Path weights are unchanged.
Network gauge_transform(const Network& net, const std::map<int, RationalFunction>& t);

// Log-canonical bracket data: {z_a, z_b} = omega(a,b) z_a z_b.
struct BracketSpec {
  VarTablePtr vars;
  std::map<std::pair<int, int>, RationalFunction> omega;  // keyed a<b

  void set(int a, int b, RationalFunction coeff);
  RationalFunction coeff(int a, int b) const;  // antisymmetric lookup
};

struct FlagAssignment {
  Network net;        // same graph, weights rewritten in flag variables
  BracketSpec spec;
  std::vector<int> params;                      // parameter variable ids
  std::map<std::pair<int, int>, int> flag_var;  // (vertex, flag label) -> var, -1 if == 1
};

// Flag labelling convention, frozen by the bracket pushforward calibration
// (the unique choice for which the measurement map is Poisson): labels 2,3
// follow flag 1 clockwise at both vertex colors.
inline constexpr bool kSwapFlagsAtWhite = true;
inline constexpr bool kSwapFlagsAtBlack = true;

FlagAssignment assign_flag_variables(const Network& net, bool gauge_reduced);
FlagAssignment assign_flag_variables_with(const Network& net, bool gauge_reduced, bool swap_white,
                                          bool swap_black);

// --------------------------------------------------------------------------
// Generators

// The running example network (Fig. 1 topology) with its concrete weights
// w1 = x1^2/(x2+1), w2 = x2, ..., w9 = w10 = w11 = 1 over variables x1..x4.
Network fig1_network();
// Same topology with independent formal edge weights w1..w11.
Network fig1_formal();
// The G_2(4) example: sources b1, b3, sinks b2, b4, eight formal weights.
Network g24_network();

// Square networks (sources b_1..b_n on the left, sinks on the right).
Network diag_network(const std::vector<RationalFunction>& d, VarTablePtr vars);
Network elementary_lower(int n, int i, const RationalFunction& l, VarTablePtr vars);  // 1 + l e_{i,i-1}
Network elementary_upper(int n, int j, const RationalFunction& u, VarTablePtr vars);  // 1 + u e_{j-1,j}
// B_-/B_+ factor at lines (i, i+1) with weights d, d^{-1} and coupling c.
Network rho_factor(int n, int i, bool lower, const RationalFunction& d, const RationalFunction& c,
                   VarTablePtr vars);

// Random valid network with roughly the given number of internal vertices;
// fresh formal edge weights w1, w2, .... Deterministic in the seed.
Network random_network(unsigned long seed, int internal_vertices);

// --------------------------------------------------------------------------
// Serialization (canonical JSON schema; unknown fields rejected)

std::string write_network_json(const Network& net);
Network read_network_json(const std::string& text);

}  // namespace pnet
