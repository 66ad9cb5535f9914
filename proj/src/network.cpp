#include "pnet/network.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <functional>
#include <random>
#include <set>
#include <sstream>

namespace pnet {

int Network::add_boundary(Role role, Vec2 pos) {
  int id = next_vertex_++;
  VertRec r;
  r.boundary = true;
  r.role = role;
  r.pos = std::move(pos);
  vert_.emplace(id, std::move(r));
  boundary_.push_back(id);
  return id;
}

int Network::add_internal(VertexColor color, Vec2 pos) {
  int id = next_vertex_++;
  VertRec r;
  r.boundary = false;
  r.color = color;
  r.pos = std::move(pos);
  vert_.emplace(id, std::move(r));
  internal_.push_back(id);
  return id;
}

int Network::add_edge(int from, int to, RationalFunction weight) {
  if (!vert_.count(from) || !vert_.count(to)) throw std::invalid_argument("edge endpoint unknown");
  int id = next_edge_++;
  edge_index_[id] = edges_.size();
  edges_.push_back(EdgeRec{id, from, to, std::move(weight)});
  return id;
}

std::vector<int> Network::out_edges(int v) const {
  std::vector<int> out;
  for (const auto& e : edges_)
    if (e.from == v) out.push_back(e.id);
  return out;
}

std::vector<int> Network::in_edges(int v) const {
  std::vector<int> out;
  for (const auto& e : edges_)
    if (e.to == v) out.push_back(e.id);
  return out;
}

std::vector<int> Network::incident_edges(int v) const {
  std::vector<int> out;
  for (const auto& e : edges_)
    if (e.from == v || e.to == v) out.push_back(e.id);
  return out;
}

int Network::boundary_label(int v) const {
  for (size_t i = 0; i < boundary_.size(); ++i)
    if (boundary_[i] == v) return static_cast<int>(i) + 1;
  throw std::out_of_range("not a boundary vertex");
}

std::vector<int> Network::source_labels() const {
  std::vector<int> out;
  for (size_t i = 0; i < boundary_.size(); ++i)
    if (vert_.at(boundary_[i]).role == Role::Source) out.push_back(static_cast<int>(i) + 1);
  return out;
}

std::vector<int> Network::sink_labels() const {
  std::vector<int> out;
  for (size_t i = 0; i < boundary_.size(); ++i)
    if (vert_.at(boundary_[i]).role == Role::Sink) out.push_back(static_cast<int>(i) + 1);
  return out;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<Violation> validate(const Network& net) {
  std::vector<Violation> v;
  auto flag = [&](std::string rule, std::string detail) {
    v.push_back(Violation{std::move(rule), std::move(detail)});
  };

  // Degree and direction constraints at boundary vertices.
  for (int b : net.boundary_ids()) {
    auto in = net.in_edges(b), out = net.out_edges(b);
    if (net.role(b) == Role::Source) {
      if (!in.empty()) flag("source with incoming edge", "b" + std::to_string(net.boundary_label(b)));
      if (out.size() != 1)
        flag("source degree", "b" + std::to_string(net.boundary_label(b)) + " has " +
                                   std::to_string(out.size()) + " outgoing edges");
    } else {
      if (!out.empty()) flag("sink with outgoing edge", "b" + std::to_string(net.boundary_label(b)));
      if (in.size() != 1)
        flag("sink degree", "b" + std::to_string(net.boundary_label(b)) + " has " +
                                 std::to_string(in.size()) + " incoming edges");
    }
  }

  // 3-valent interior with the color rule: white has one incoming edge,
  // black one outgoing.
  for (int u : net.internal_ids()) {
    auto in = net.in_edges(u), out = net.out_edges(u);
    if (in.size() + out.size() != 3)
      flag("internal degree", "vertex " + std::to_string(u) + " has degree " +
                                  std::to_string(in.size() + out.size()));
    if (net.color(u) == VertexColor::White && in.size() != 1)
      flag("white vertex incoming count", "vertex " + std::to_string(u));
    if (net.color(u) == VertexColor::Black && out.size() != 1)
      flag("black vertex outgoing count", "vertex " + std::to_string(u));
  }

  // No loops, no parallel edges.
  std::set<std::pair<int, int>> seen;
  for (const auto& e : net.edges()) {
    if (e.from == e.to) flag("loop edge", "edge " + std::to_string(e.id));
    auto key = std::minmax(e.from, e.to);
    if (!seen.insert({key.first, key.second}).second)
      flag("parallel edges", "edge " + std::to_string(e.id));
    if (e.weight.is_zero()) flag("zero edge weight", "edge " + std::to_string(e.id));
  }

  // Boundary vertices counterclockwise on a common circle.
  const auto& bnd = net.boundary_ids();
  if (bnd.size() >= 2) {
    Rat norm = dot(net.pos(bnd[0]), net.pos(bnd[0]));
    for (int b : bnd) {
      if (dot(net.pos(b), net.pos(b)) != norm) {
        flag("boundary not on a circle", "b" + std::to_string(net.boundary_label(b)));
        break;
      }
    }
    int wrap = 0;
    for (size_t i = 0; i < bnd.size(); ++i) {
      const Vec2& a = net.pos(bnd[i]);
      const Vec2& b = net.pos(bnd[(i + 1) % bnd.size()]);
      if (a == b) {
        flag("coincident boundary vertices", "b" + std::to_string(i + 1));
        break;
      }
      if (!angle_less(a, b)) ++wrap;
    }
    if (bnd.size() >= 2 && wrap != 1)
      flag("boundary not counterclockwise", "angular order wraps " + std::to_string(wrap) + " times");
  }

  // Straight-line embedding: internal vertices strictly inside the hull of
  // the boundary polygon, distinct coordinates, no edge through a vertex,
  // no two edges conflicting except at shared endpoints.
  std::vector<Vec2> hull;
  for (int b : bnd) hull.push_back(net.pos(b));
  if (hull.size() >= 3) {
    for (int u : net.internal_ids()) {
      if (point_in_polygon(net.pos(u), hull) != 1)
        flag("internal vertex outside hull interior", "vertex " + std::to_string(u));
    }
  }
  std::vector<int> all_vertices = bnd;
  all_vertices.insert(all_vertices.end(), net.internal_ids().begin(), net.internal_ids().end());
  for (size_t i = 0; i < all_vertices.size(); ++i)
    for (size_t j = i + 1; j < all_vertices.size(); ++j)
      if (net.pos(all_vertices[i]) == net.pos(all_vertices[j]))
        flag("coincident vertices", std::to_string(all_vertices[i]) + "," + std::to_string(all_vertices[j]));

  const auto& es = net.edges();
  for (size_t i = 0; i < es.size(); ++i) {
    const Vec2& a = net.pos(es[i].from);
    const Vec2& b = net.pos(es[i].to);
    if (a == b) continue;  // loop already reported
    for (int w : all_vertices) {
      if (w == es[i].from || w == es[i].to) continue;
      if (on_segment(net.pos(w), a, b))
        flag("edge through vertex",
             "edge " + std::to_string(es[i].id) + " hits vertex " + std::to_string(w));
    }
    for (size_t j = i + 1; j < es.size(); ++j) {
      const Vec2& c = net.pos(es[j].from);
      const Vec2& d = net.pos(es[j].to);
      if (segments_conflict(a, b, c, d))
        flag("embedding crossing",
             "edges " + std::to_string(es[i].id) + " and " + std::to_string(es[j].id));
    }
  }

  return v;
}

std::vector<int> rotation(const Network& net, int vertex) {
  std::vector<int> inc = net.incident_edges(vertex);
  const Vec2& p = net.pos(vertex);
  auto dir = [&](int eid) {
    const auto& e = net.edge(eid);
    int other = e.from == vertex ? e.to : e.from;
    return net.pos(other) - p;
  };
  std::sort(inc.begin(), inc.end(), [&](int a, int b) { return angle_less(dir(a), dir(b)); });
  return inc;
}

// ---------------------------------------------------------------------------
// Concordance and path weights

namespace {

std::vector<Vec2> curve_directions(const std::vector<Vec2>& curve) {
  size_t r = curve.size();
  if (r < 2) throw std::invalid_argument("curve needs at least two vertices");
  std::vector<Vec2> dir(r);
  for (size_t i = 0; i < r; ++i) {
    dir[i] = curve[(i + 1) % r] - curve[i];
    if (dir[i].x == 0 && dir[i].y == 0) throw std::invalid_argument("zero-length curve segment");
  }
  for (size_t i = 0; i < r; ++i) {
    const Vec2& d1 = dir[(i + r - 1) % r];
    const Vec2& d2 = dir[i];
    if (cross(d1, d2) == 0 && dot(d1, d2) < 0)
      throw std::domain_error("degenerate cone: consecutive segments reverse direction");
  }
  return dir;
}

}  // namespace

int concordance_with_probe(const std::vector<Vec2>& curve, const Vec2& probe) {
  std::vector<Vec2> dir = curve_directions(curve);
  size_t r = dir.size();
  for (const Vec2& d : dir)
    if (cross(probe, d) == 0) throw std::invalid_argument("probe collinear with a curve segment");
  int c = 0;
  for (size_t i = 0; i < r; ++i) {
    const Vec2& d1 = dir[(i + r - 1) % r];
    const Vec2& d2 = dir[i];
    int cr = sign(cross(d1, d2));
    if (cr == 0) continue;  // same-direction collinear pair: empty cone interior
    if (sign(cross(d1, probe)) == cr && sign(cross(probe, d2)) == cr) ++c;
  }
  return c & 1;
}

int concordance(const std::vector<Vec2>& curve) {
  std::vector<Vec2> dir = curve_directions(curve);
  // Deterministic probe directions (1, k/(K+1)); skip any collinear with a
  // segment. At most K slopes are forbidden, so this terminates.
  long K = static_cast<long>(dir.size());
  for (long k = 0; k <= K; ++k) {
    Vec2 l(Rat(1), Rat(k, K + 1));
    bool ok = true;
    for (const Vec2& d : dir)
      if (cross(l, d) == 0) {
        ok = false;
        break;
      }
    if (!ok) continue;
    return concordance_with_probe(curve, l);
  }
  throw std::logic_error("no valid probe direction found");
}

std::vector<int> path_vertices(const Network& net, const Path& p) {
  if (p.edges.empty()) throw std::invalid_argument("empty path");
  std::vector<int> verts;
  verts.push_back(net.edge(p.edges.front()).from);
  for (int eid : p.edges) {
    const auto& e = net.edge(eid);
    if (e.from != verts.back()) throw std::invalid_argument("path edges are not consecutive");
    verts.push_back(e.to);
  }
  return verts;
}

namespace {

RationalFunction product_of_weights(const Network& net, const Path& p) {
  RationalFunction w = RationalFunction::constant(1);
  for (int eid : p.edges) w = w * net.edge(eid).weight;
  return w;
}

}  // namespace

RationalFunction path_weight(const Network& net, const Path& p) {
  std::vector<int> verts = path_vertices(net, p);
  int src = verts.front(), dst = verts.back();
  if (!net.is_boundary(src) || net.role(src) != Role::Source)
    throw std::invalid_argument("path must start at a source");
  if (!net.is_boundary(dst) || net.role(dst) != Role::Sink)
    throw std::invalid_argument("path must end at a sink");

  RationalFunction w = product_of_weights(net, p);
  // A single chord closes to a simple counterclockwise curve; its concordance
  // number is 1, so the sign is +. (For n = 2 the closed curve degenerates.)
  if (p.edges.size() == 1) return w;

  std::vector<Vec2> curve;
  for (size_t i = 0; i + 1 < verts.size(); ++i) curve.push_back(net.pos(verts[i]));
  curve.push_back(net.pos(dst));
  int n = net.n_boundary();
  int li = net.boundary_label(src), lj = net.boundary_label(dst);
  for (int l = lj % n + 1; l != li; l = l % n + 1) curve.push_back(net.pos(net.vertex_of_label(l)));
  int c = concordance(curve);
  return (c & 1) ? w : w.negated();
}

RationalFunction cycle_weight(const Network& net, const Path& cycle) {
  std::vector<int> verts = path_vertices(net, cycle);
  if (verts.front() != verts.back()) throw std::invalid_argument("cycle must be closed");
  std::vector<Vec2> curve;
  for (size_t i = 0; i + 1 < verts.size(); ++i) curve.push_back(net.pos(verts[i]));
  RationalFunction w = product_of_weights(net, cycle);
  int c = concordance(curve);
  return (c & 1) ? w : w.negated();
}

std::pair<Path, Path> decompose_path(const Network& net, const Path& p) {
  path_vertices(net, p);  // checks consecutiveness
  std::map<int, size_t> first_seen;
  size_t i = 0, j = 0;
  bool found = false;
  for (size_t k = 0; k < p.edges.size() && !found; ++k) {
    auto it = first_seen.find(p.edges[k]);
    if (it != first_seen.end()) {
      i = it->second;
      j = k;
      found = true;
    } else {
      first_seen.emplace(p.edges[k], k);
    }
  }
  if (!found) throw std::invalid_argument("path has no repeated edge");
  Path trimmed, cycle;
  for (size_t k = 0; k <= i; ++k) trimmed.edges.push_back(p.edges[k]);
  for (size_t k = j + 1; k < p.edges.size(); ++k) trimmed.edges.push_back(p.edges[k]);
  for (size_t k = i; k < j; ++k) cycle.edges.push_back(p.edges[k]);
  return {trimmed, cycle};
}

// ---------------------------------------------------------------------------
// Gauge transformations

namespace {

bool is_laurent_monomial(const RationalFunction& f) {
  return !f.is_zero() && f.num.terms.size() == 1 && f.den.terms.size() == 1;
}

}  // namespace

Network gauge_transform(const Network& net, const std::map<int, RationalFunction>& t) {
  auto factor = [&](int v) -> RationalFunction {
    auto it = t.find(v);
    if (it == t.end()) return RationalFunction::constant(1);
    if (net.is_boundary(v) && !it->second.is_one())
      throw std::invalid_argument("gauge must be trivial at boundary vertices");
    if (!is_laurent_monomial(it->second))
      throw std::invalid_argument("gauge factors must be nonzero Laurent monomials");
    return it->second;
  };
  Network out = net;
  for (const auto& e : net.edges()) {
    out.set_weight(e.id, factor(e.to) * e.weight / factor(e.from));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Flag variables and the universal bracket

void BracketSpec::set(int a, int b, RationalFunction coeff) {
  if (a == b) throw std::invalid_argument("bracket spec diagonal must be zero");
  if (a > b) {
    std::swap(a, b);
    coeff = coeff.negated();
  }
  omega[{a, b}] = std::move(coeff);
}

RationalFunction BracketSpec::coeff(int a, int b) const {
  if (a == b) return RationalFunction();
  bool swapped = a > b;
  if (swapped) std::swap(a, b);
  auto it = omega.find({a, b});
  if (it == omega.end()) return RationalFunction();
  return swapped ? it->second.negated() : it->second;
}

FlagAssignment assign_flag_variables_with(const Network& net, bool gauge_reduced, bool swap_white,
                                          bool swap_black) {
  auto vars = std::make_shared<VariableTable>();
  FlagAssignment out{Network(vars), BracketSpec{vars, {}}, {}, {}};

  int a12 = -1, a13 = -1, a23 = -1, b12 = -1, b13 = -1, b23 = -1, alpha = -1, beta = -1;
  if (gauge_reduced) {
    alpha = vars->add("alpha");
    beta = vars->add("beta");
    out.params = {alpha, beta};
  } else {
    a12 = vars->add("alpha12");
    a13 = vars->add("alpha13");
    a23 = vars->add("alpha23");
    b12 = vars->add("beta12");
    b13 = vars->add("beta13");
    b23 = vars->add("beta23");
    out.params = {a12, a13, a23, b12, b13, b23};
  }

  // Flag labels: label 1 marks the unique incoming (white) / outgoing (black)
  // edge; labels 2,3 follow in rotation order, direction set by the
  // calibration constants.
  std::map<std::pair<int, int>, int> label;  // (vertex, edge) -> 1..3
  for (int v : net.internal_ids()) {
    std::vector<int> rot = rotation(net, v);
    if (rot.size() != 3) throw std::invalid_argument("internal vertex is not 3-valent");
    bool white = net.color(v) == VertexColor::White;
    int special = -1;
    for (int eid : rot) {
      const auto& e = net.edge(eid);
      bool incoming = e.to == v;
      if (white == incoming) {
        if ((white && net.in_edges(v).size() == 1) || (!white && net.out_edges(v).size() == 1)) {
          special = eid;
        }
      }
    }
    if (special < 0) throw std::invalid_argument("vertex violates the color rule");
    size_t s = std::find(rot.begin(), rot.end(), special) - rot.begin();
    bool swap = white ? swap_white : swap_black;
    label[{v, special}] = 1;
    label[{v, rot[(s + 1) % 3]}] = swap ? 3 : 2;
    label[{v, rot[(s + 2) % 3]}] = swap ? 2 : 3;
  }

  // Flag variables. In the gauge-reduced chart flag 1 carries the constant 1.
  for (int v : net.internal_ids()) {
    for (int lab = gauge_reduced ? 2 : 1; lab <= 3; ++lab) {
      int id = vars->add("x" + std::to_string(lab) + "_" + std::to_string(v));
      out.flag_var[{v, lab}] = id;
    }
    if (gauge_reduced) out.flag_var[{v, 1}] = -1;
  }
  for (int b : net.boundary_ids()) {
    out.flag_var[{b, 1}] = vars->add("x1_" + std::to_string(b));
  }

  // Vertex brackets depend only on the color.
  for (int v : net.internal_ids()) {
    bool white = net.color(v) == VertexColor::White;
    if (gauge_reduced) {
      out.spec.set(out.flag_var[{v, 2}], out.flag_var[{v, 3}],
                   RationalFunction::variable(white ? alpha : beta));
    } else {
      int p12 = white ? a12 : b12, p13 = white ? a13 : b13, p23 = white ? a23 : b23;
      out.spec.set(out.flag_var[{v, 1}], out.flag_var[{v, 2}], RationalFunction::variable(p12));
      out.spec.set(out.flag_var[{v, 1}], out.flag_var[{v, 3}], RationalFunction::variable(p13));
      out.spec.set(out.flag_var[{v, 2}], out.flag_var[{v, 3}], RationalFunction::variable(p23));
    }
  }

  // Rebuild the network with w_e = product of the two flag variables.
  Network rebuilt(vars);
  std::map<int, int> vmap;
  for (int b : net.boundary_ids()) vmap[b] = rebuilt.add_boundary(net.role(b), net.pos(b));
  for (int v : net.internal_ids()) vmap[v] = rebuilt.add_internal(net.color(v), net.pos(v));
  auto flag_factor = [&](int v, int eid) -> RationalFunction {
    int lab = net.is_boundary(v) ? 1 : label.at({v, eid});
    int var = out.flag_var.at({v, lab});
    return var < 0 ? RationalFunction::constant(1) : RationalFunction::variable(var);
  };
  for (const auto& e : net.edges()) {
    rebuilt.add_edge(vmap[e.from], vmap[e.to], flag_factor(e.from, e.id) * flag_factor(e.to, e.id));
  }
  out.net = std::move(rebuilt);
  return out;
}

FlagAssignment assign_flag_variables(const Network& net, bool gauge_reduced) {
  return assign_flag_variables_with(net, gauge_reduced, kSwapFlagsAtWhite, kSwapFlagsAtBlack);
}

// ---------------------------------------------------------------------------
// Generators

namespace {

RationalFunction parse_with(const VariableTable& vars, const std::string& text) {
  return parse_expr(text, vars);
}

Network fig1_topology(VarTablePtr vars, const std::vector<RationalFunction>& w) {
  Network net(vars);
  int b1 = net.add_boundary(Role::Source, Vec2(Rat(-1), Rat(0)));
  int b2 = net.add_boundary(Role::Source, Vec2(Rat(0), Rat(-1)));
  int b3 = net.add_boundary(Role::Sink, Vec2(Rat(1), Rat(0)));
  int b4 = net.add_boundary(Role::Sink, Vec2(Rat(0), Rat(1)));
  int u = net.add_internal(VertexColor::White, Vec2(Rat(1, 16), Rat(-1, 2)));
  int s = net.add_internal(VertexColor::Black, Vec2(Rat(-1, 2), Rat(-1, 16)));
  int t = net.add_internal(VertexColor::Black, Vec2(Rat(-1, 8), Rat(1, 4)));
  int x = net.add_internal(VertexColor::Black, Vec2(Rat(1, 8), Rat(-1, 8)));
  int y = net.add_internal(VertexColor::White, Vec2(Rat(1, 2), Rat(1, 16)));
  int z = net.add_internal(VertexColor::White, Vec2(Rat(1, 4), Rat(1, 2)));
  net.add_edge(b2, u, w[1]);   // e1
  net.add_edge(u, x, w[2]);    // e2
  net.add_edge(x, y, w[3]);    // e3
  net.add_edge(y, b3, w[4]);   // e4
  net.add_edge(b1, s, w[5]);   // e5
  net.add_edge(s, t, w[6]);    // e6
  net.add_edge(z, t, w[7]);    // e7
  net.add_edge(z, b4, w[8]);   // e8
  net.add_edge(u, s, w[9]);    // e9
  net.add_edge(t, x, w[10]);   // e10
  net.add_edge(y, z, w[11]);   // e11
  return net;
}

}  // namespace

Network fig1_network() {
  auto vars = std::make_shared<VariableTable>();
  for (int i = 1; i <= 4; ++i) vars->add("x" + std::to_string(i));
  std::vector<RationalFunction> w(12);
  w[1] = parse_with(*vars, "x1^2/(x2+1)");
  w[2] = parse_with(*vars, "x2");
  w[3] = parse_with(*vars, "x2+1");
  w[4] = parse_with(*vars, "x1+x3");
  w[5] = parse_with(*vars, "x3");
  w[6] = parse_with(*vars, "x3");
  w[7] = parse_with(*vars, "x3");
  w[8] = parse_with(*vars, "x4");
  w[9] = RationalFunction::constant(1);
  w[10] = RationalFunction::constant(1);
  w[11] = RationalFunction::constant(1);
  return fig1_topology(vars, w);
}

Network fig1_formal() {
  auto vars = std::make_shared<VariableTable>();
  std::vector<RationalFunction> w(12);
  for (int i = 1; i <= 11; ++i) w[i] = RationalFunction::variable(vars->add("w" + std::to_string(i)));
  return fig1_topology(vars, w);
}

Network g24_network() {
  auto vars = std::make_shared<VariableTable>();
  std::vector<RationalFunction> w(9);
  for (int i = 1; i <= 8; ++i) w[i] = RationalFunction::variable(vars->add("w" + std::to_string(i)));
  Network net(vars);
  int b1 = net.add_boundary(Role::Source, Vec2(Rat(-1), Rat(0)));
  int b2 = net.add_boundary(Role::Sink, Vec2(Rat(0), Rat(-1)));
  int b3 = net.add_boundary(Role::Source, Vec2(Rat(1), Rat(0)));
  int b4 = net.add_boundary(Role::Sink, Vec2(Rat(0), Rat(1)));
  int va = net.add_internal(VertexColor::Black, Vec2(Rat(-1, 2), Rat(0)));
  int vb = net.add_internal(VertexColor::White, Vec2(Rat(0), Rat(-1, 2)));
  int vc = net.add_internal(VertexColor::Black, Vec2(Rat(1, 2), Rat(0)));
  int vd = net.add_internal(VertexColor::White, Vec2(Rat(0), Rat(1, 2)));
  net.add_edge(b1, va, w[1]);  // e1
  net.add_edge(vd, va, w[2]);  // e2
  net.add_edge(vd, b4, w[3]);  // e3
  net.add_edge(va, vb, w[4]);  // e4
  net.add_edge(vc, vd, w[5]);  // e5
  net.add_edge(vb, b2, w[6]);  // e6
  net.add_edge(vb, vc, w[7]);  // e7
  net.add_edge(b3, vc, w[8]);  // e8
  return net;
}

// Square-network geometry helpers. Lines are numbered 1..n from the top;
// internal vertices sit exactly on the line heights so concatenation can
// merge glued edges into straight horizontal segments.
namespace square {

Rat line_height(int i, int n) { return Rat(n + 1 - 2 * i, 2 * (n + 1)); }

Rat left_t(int i, int n) {
  Rat y = line_height(i, n);
  if (y == 0) return Rat(8 * (n + 1) * (n + 1));
  return 2 / y;
}

Rat right_t(int i, int n) { return line_height(i, n) / 2; }

// Interior vertices sit at a common fraction of the line height so they stay
// strictly inside the hull of the circle attachment points.
Rat interior_height(int i, int n) { return line_height(i, n) * 4 / 5; }

// Boundary skeleton: sources b_1..b_n down the left side, sinks b_{n+1}..b_{2n}
// up the right side, all on the unit circle.
std::vector<int> add_boundary(Network& net, int n) {
  std::vector<int> ids(2 * n + 1);
  for (int i = 1; i <= n; ++i) ids[i] = net.add_boundary(Role::Source, circle_point(left_t(i, n)));
  for (int q = 1; q <= n; ++q)
    ids[n + q] = net.add_boundary(Role::Sink, circle_point(right_t(n + 1 - q, n)));
  return ids;
}

int right_label(int line, int n) { return 2 * n + 1 - line; }

}  // namespace square

Network diag_network(const std::vector<RationalFunction>& d, VarTablePtr vars) {
  int n = static_cast<int>(d.size());
  Network net(vars);
  auto ids = square::add_boundary(net, n);
  for (int i = 1; i <= n; ++i) net.add_edge(ids[i], ids[square::right_label(i, n)], d[i - 1]);
  return net;
}

Network elementary_lower(int n, int i, const RationalFunction& l, VarTablePtr vars) {
  if (i < 2 || i > n) throw std::invalid_argument("elementary index out of range");
  Network net(vars);
  auto ids = square::add_boundary(net, n);
  RationalFunction one = RationalFunction::constant(1);
  // Slant carries weight l from line i up to line i-1.
  int v = net.add_internal(VertexColor::White, Vec2(Rat(-1, 50), square::interior_height(i, n)));
  int u = net.add_internal(VertexColor::Black, Vec2(Rat(1, 50), square::interior_height(i - 1, n)));
  for (int line = 1; line <= n; ++line) {
    if (line == i) {
      net.add_edge(ids[line], v, one);
      net.add_edge(v, ids[square::right_label(line, n)], one);
    } else if (line == i - 1) {
      net.add_edge(ids[line], u, one);
      net.add_edge(u, ids[square::right_label(line, n)], one);
    } else {
      net.add_edge(ids[line], ids[square::right_label(line, n)], one);
    }
  }
  net.add_edge(v, u, l);
  return net;
}

Network elementary_upper(int n, int j, const RationalFunction& u_weight, VarTablePtr vars) {
  if (j < 2 || j > n) throw std::invalid_argument("elementary index out of range");
  Network net(vars);
  auto ids = square::add_boundary(net, n);
  RationalFunction one = RationalFunction::constant(1);
  // Slant carries weight u from line j-1 down to line j.
  int v = net.add_internal(VertexColor::White, Vec2(Rat(-1, 50), square::interior_height(j - 1, n)));
  int w = net.add_internal(VertexColor::Black, Vec2(Rat(1, 50), square::interior_height(j, n)));
  for (int line = 1; line <= n; ++line) {
    if (line == j - 1) {
      net.add_edge(ids[line], v, one);
      net.add_edge(v, ids[square::right_label(line, n)], one);
    } else if (line == j) {
      net.add_edge(ids[line], w, one);
      net.add_edge(w, ids[square::right_label(line, n)], one);
    } else {
      net.add_edge(ids[line], ids[square::right_label(line, n)], one);
    }
  }
  net.add_edge(v, w, u_weight);
  return net;
}

Network rho_factor(int n, int i, bool lower, const RationalFunction& d, const RationalFunction& c,
                   VarTablePtr vars) {
  if (i < 1 || i >= n) throw std::invalid_argument("rho factor index out of range");
  Network net(vars);
  auto ids = square::add_boundary(net, n);
  RationalFunction one = RationalFunction::constant(1);
  int hi = i, lo = i + 1;  // lines of the 2x2 block
  if (lower) {
    // [[d, 0], [c, d^{-1}]]: slant from line i+1 up to line i.
    int u = net.add_internal(VertexColor::White, Vec2(Rat(-1, 50), square::interior_height(lo, n)));
    int v = net.add_internal(VertexColor::Black, Vec2(Rat(1, 50), square::interior_height(hi, n)));
    for (int line = 1; line <= n; ++line) {
      if (line == lo) {
        net.add_edge(ids[line], u, d.inverse());
        net.add_edge(u, ids[square::right_label(line, n)], one);
      } else if (line == hi) {
        net.add_edge(ids[line], v, d);
        net.add_edge(v, ids[square::right_label(line, n)], one);
      } else {
        net.add_edge(ids[line], ids[square::right_label(line, n)], one);
      }
    }
    net.add_edge(u, v, c * d);
  } else {
    // [[d, c], [0, d^{-1}]]: slant from line i down to line i+1.
    int p = net.add_internal(VertexColor::White, Vec2(Rat(-1, 50), square::interior_height(hi, n)));
    int q = net.add_internal(VertexColor::Black, Vec2(Rat(1, 50), square::interior_height(lo, n)));
    for (int line = 1; line <= n; ++line) {
      if (line == hi) {
        net.add_edge(ids[line], p, d);
        net.add_edge(p, ids[square::right_label(line, n)], one);
      } else if (line == lo) {
        net.add_edge(ids[line], q, d.inverse());
        net.add_edge(q, ids[square::right_label(line, n)], one);
      } else {
        net.add_edge(ids[line], ids[square::right_label(line, n)], one);
      }
    }
    net.add_edge(p, q, c / d);
  }
  return net;
}

// ---------------------------------------------------------------------------
// Random networks
//
// Grown by reversing the measurement splitting moves: start from a random
// non-crossing perfect matching of directed boundary chords, then repeatedly
// merge two adjacent boundary stubs into a fresh 3-valent interior vertex.
// Every intermediate network is validated; a merge that cannot be embedded
// cleanly is skipped.

namespace {

struct GrowVertex {
  bool boundary;
  Role role;
  VertexColor color;
  Vec2 pos;
};

struct GrowState {
  std::vector<int> boundary;  // ccw vertex keys
  std::map<int, GrowVertex> verts;
  std::vector<std::array<int, 2>> edges;  // from, to
  int next = 0;

  Network to_network() const {
    auto vars = std::make_shared<VariableTable>();
    Network net(vars);
    std::map<int, int> idmap;
    for (int b : boundary) idmap[b] = net.add_boundary(verts.at(b).role, verts.at(b).pos);
    for (const auto& [k, v] : verts)
      if (!v.boundary) idmap[k] = net.add_internal(v.color, v.pos);
    int w = 0;
    for (const auto& e : edges) {
      net.add_edge(idmap.at(e[0]), idmap.at(e[1]),
                   RationalFunction::variable(vars->add("w" + std::to_string(++w))));
    }
    return net;
  }
};

}  // namespace

Network random_network(unsigned long seed, int internal_vertices) {
  std::mt19937_64 rng(seed);
  int chords = std::max(2, (internal_vertices + 4) / 2 + 1);
  int n0 = 2 * chords;

  GrowState st;
  for (int j = 0; j < n0; ++j) {
    int key = st.next++;
    GrowVertex v;
    v.boundary = true;
    v.role = Role::Source;  // set below
    v.pos = circle_point(Rat(2 * j - n0 + 1, 2));
    st.verts[key] = v;
    st.boundary.push_back(key);
  }

  // Random non-crossing perfect matching with random chord directions.
  std::vector<std::pair<int, int>> match;
  std::function<void(int, int)> rec = [&](int lo, int hi) {
    if (lo > hi) return;
    std::vector<int> cands;
    for (int j = lo + 1; j <= hi; j += 2) cands.push_back(j);
    int j = cands[std::uniform_int_distribution<size_t>(0, cands.size() - 1)(rng)];
    match.emplace_back(lo, j);
    rec(lo + 1, j - 1);
    rec(j + 1, hi);
  };
  rec(0, n0 - 1);
  for (auto [a, b] : match) {
    if (std::uniform_int_distribution<int>(0, 1)(rng)) std::swap(a, b);
    st.verts[st.boundary[a]].role = Role::Source;
    st.verts[st.boundary[b]].role = Role::Sink;
    st.edges.push_back({st.boundary[a], st.boundary[b]});
  }

  auto counts = [&]() {
    int k = 0;
    for (int b : st.boundary)
      if (st.verts[b].role == Role::Source) ++k;
    return std::pair<int, int>(k, static_cast<int>(st.boundary.size()) - k);
  };

  int made = 0;
  int attempts = 0;
  while (made < internal_vertices && attempts < 40 * internal_vertices + 40) {
    ++attempts;
    int n = static_cast<int>(st.boundary.size());
    if (n <= 3) break;
    int p = std::uniform_int_distribution<int>(0, n - 1)(rng);
    int q = (p + 1) % n;
    int vp = st.boundary[p], vq = st.boundary[q];
    Role rp = st.verts[vp].role, rq = st.verts[vq].role;
    auto [k, m] = counts();
    if (rp == Role::Source && rq == Role::Source && k < 2) continue;
    if (rp == Role::Sink && rq == Role::Sink && m < 2) continue;
    if (rp == Role::Source && rq == Role::Sink && m < 2) continue;
    if (rp == Role::Sink && rq == Role::Source && k < 2) continue;

    // Edge stubs at the two merged vertices.
    auto stub_at = [&](int v) {
      for (size_t i = 0; i < st.edges.size(); ++i)
        if (st.edges[i][0] == v || st.edges[i][1] == v) return i;
      throw std::logic_error("boundary vertex with no edge");
    };
    size_t ep = stub_at(vp), eq = stub_at(vq);

    Vec2 mid = (st.verts[vp].pos + st.verts[vq].pos).scaled(Rat(1, 2));
    bool placed = false;
    for (const Rat& pull : {Rat(7, 8), Rat(3, 4), Rat(1, 2), Rat(1, 4)}) {
      GrowState cand = st;
      int iv = cand.next++;
      int nb = cand.next++;
      GrowVertex inner;
      inner.boundary = false;
      inner.pos = mid.scaled(pull);
      GrowVertex bnd;
      bnd.boundary = true;
      bnd.pos = cand.verts[vp].pos;

      if (rp == Role::Source && rq == Role::Source) {
        inner.color = VertexColor::White;  // 1 in, 2 out
        bnd.role = Role::Source;
        cand.edges[ep][0] = iv;
        cand.edges[eq][0] = iv;
        cand.edges.push_back({nb, iv});
      } else if (rp == Role::Sink && rq == Role::Sink) {
        inner.color = VertexColor::Black;
        bnd.role = Role::Sink;
        cand.edges[ep][1] = iv;
        cand.edges[eq][1] = iv;
        cand.edges.push_back({iv, nb});
      } else if (rp == Role::Source && rq == Role::Sink) {
        inner.color = VertexColor::Black;  // old sink flows into the old source route
        bnd.role = Role::Source;
        cand.edges[ep][0] = iv;
        cand.edges[eq][1] = iv;
        cand.edges.push_back({nb, iv});
      } else {
        inner.color = VertexColor::White;
        bnd.role = Role::Sink;
        cand.edges[ep][1] = iv;
        cand.edges[eq][0] = iv;
        cand.edges.push_back({iv, nb});
      }
      cand.verts[iv] = inner;
      cand.verts[nb] = bnd;
      cand.verts.erase(vp);
      cand.verts.erase(vq);
      std::vector<int> nb_cycle;
      for (int b : cand.boundary) {
        if (b == vp) {
          nb_cycle.push_back(nb);
        } else if (b != vq) {
          nb_cycle.push_back(b);
        }
      }
      cand.boundary = std::move(nb_cycle);
      if (validate(cand.to_network()).empty()) {
        st = std::move(cand);
        ++made;
        placed = true;
        break;
      }
    }
    (void)placed;
  }
  return st.to_network();
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string rat_str(const Rat& r) { return r.str(); }

Rat rat_parse(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rat(Int(s));
  Int den(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in coordinate");
  return Rat(Int(s.substr(0, slash))) / Rat(den);
}

}  // namespace

std::string write_network_json(const Network& net) {
  nlohmann::ordered_json j;
  j["n"] = net.n_boundary();
  j["boundary"] = nlohmann::ordered_json::array();
  for (int b : net.boundary_ids()) {
    nlohmann::ordered_json rec;
    rec["id"] = b;
    rec["role"] = net.role(b) == Role::Source ? "source" : "sink";
    rec["pos"] = {rat_str(net.pos(b).x), rat_str(net.pos(b).y)};
    j["boundary"].push_back(rec);
  }
  j["internal"] = nlohmann::ordered_json::array();
  for (int v : net.internal_ids()) {
    nlohmann::ordered_json rec;
    rec["id"] = v;
    rec["color"] = net.color(v) == VertexColor::White ? "white" : "black";
    rec["pos"] = {rat_str(net.pos(v).x), rat_str(net.pos(v).y)};
    j["internal"].push_back(rec);
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : net.edges()) {
    nlohmann::ordered_json rec;
    rec["id"] = e.id;
    rec["from"] = e.from;
    rec["to"] = e.to;
    rec["weight"] = to_string(e.weight, *net.vars());
    j["edges"].push_back(rec);
  }
  j["variables"] = nlohmann::ordered_json::array();
  for (int i = 0; i < net.vars()->size(); ++i) j["variables"].push_back(net.vars()->name(i));
  return j.dump(2) + "\n";
}

namespace {

class NetworkJsonError : public std::runtime_error {
public:
  explicit NetworkJsonError(const std::string& msg) : std::runtime_error("network file: " + msg) {}
};

void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) throw NetworkJsonError("unknown field '" + it.key() + "' in " + where);
  }
}

Vec2 pos_from_json(const nlohmann::json& arr) {
  if (!arr.is_array() || arr.size() != 2) throw NetworkJsonError("pos must be a pair");
  return Vec2(rat_parse(arr[0].get<std::string>()), rat_parse(arr[1].get<std::string>()));
}

}  // namespace

Network read_network_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  reject_unknown(j, {"n", "boundary", "internal", "edges", "variables"}, "document");
  auto vars = std::make_shared<VariableTable>();
  for (const auto& name : j.at("variables")) vars->add(name.get<std::string>());

  // The builder assigns ids sequentially, so insert records in id order and
  // remap afterwards. File ids are required to be positive and unique.
  Network net(vars);
  std::map<int, int> idmap;
  if (j.at("n").get<int>() != static_cast<int>(j.at("boundary").size()))
    throw NetworkJsonError("field n disagrees with the boundary list");
  for (const auto& rec : j.at("boundary")) {
    reject_unknown(rec, {"id", "role", "pos"}, "boundary vertex");
    std::string role = rec.at("role").get<std::string>();
    if (role != "source" && role != "sink") throw NetworkJsonError("bad role '" + role + "'");
    int id = net.add_boundary(role == "source" ? Role::Source : Role::Sink,
                              pos_from_json(rec.at("pos")));
    if (!idmap.emplace(rec.at("id").get<int>(), id).second)
      throw NetworkJsonError("duplicate vertex id");
  }
  for (const auto& rec : j.at("internal")) {
    reject_unknown(rec, {"id", "color", "pos"}, "internal vertex");
    std::string color = rec.at("color").get<std::string>();
    if (color != "white" && color != "black") throw NetworkJsonError("bad color '" + color + "'");
    int id = net.add_internal(color == "white" ? VertexColor::White : VertexColor::Black,
                              pos_from_json(rec.at("pos")));
    if (!idmap.emplace(rec.at("id").get<int>(), id).second)
      throw NetworkJsonError("duplicate vertex id");
  }
  for (const auto& rec : j.at("edges")) {
    reject_unknown(rec, {"id", "from", "to", "weight"}, "edge");
    auto from = idmap.find(rec.at("from").get<int>());
    auto to = idmap.find(rec.at("to").get<int>());
    if (from == idmap.end() || to == idmap.end()) throw NetworkJsonError("edge endpoint unknown");
    net.add_edge(from->second, to->second, parse_expr(rec.at("weight").get<std::string>(), *vars));
  }
  return net;
}

}  // namespace pnet
