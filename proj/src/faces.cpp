#include "pnet/faces.hpp"

#include "pnet/measurement.hpp"

#include <algorithm>
#include <optional>
#include <queue>
#include <set>

namespace pnet {

namespace {

// Darts: graph edge e as (e, true) = along the direction, (e, false) =
// against it; boundary arc l as arc dart +-(l+1) in a separate space.
struct Dart {
  bool is_arc = false;
  int edge = 0;  // edge id, or arc index
  bool forward = true;

  bool operator<(const Dart& o) const {
    return std::tie(is_arc, edge, forward) < std::tie(o.is_arc, o.edge, o.forward);
  }
  bool operator==(const Dart& o) const {
    return is_arc == o.is_arc && edge == o.edge && forward == o.forward;
  }
};

struct DartSystem {
  const Network& net;
  int n;
  // Outgoing darts at each vertex, counterclockwise by direction.
  std::map<int, std::vector<Dart>> rot;

  explicit DartSystem(const Network& network) : net(network), n(network.n_boundary()) {
    std::map<int, std::vector<std::pair<Vec2, Dart>>> out;
    for (const auto& e : net.edges()) {
      out[e.from].push_back({net.pos(e.to) - net.pos(e.from), Dart{false, e.id, true}});
      out[e.to].push_back({net.pos(e.from) - net.pos(e.to), Dart{false, e.id, false}});
    }
    for (int l = 0; l < n; ++l) {
      int a = net.boundary_ids()[l];
      int b = net.boundary_ids()[(l + 1) % n];
      // Initial directions along the circle: counterclockwise tangent at the
      // start, clockwise tangent at the end.
      const Vec2& pa = net.pos(a);
      const Vec2& pb = net.pos(b);
      out[a].push_back({Vec2(-pa.y, pa.x), Dart{true, l, true}});
      out[b].push_back({Vec2(pb.y, -pb.x), Dart{true, l, false}});
    }
    for (auto& [v, darts] : out) {
      std::sort(darts.begin(), darts.end(),
                [](const auto& x, const auto& y) { return angle_less(x.first, y.first); });
      auto& r = rot[v];
      for (auto& [dir, d] : darts) r.push_back(d);
    }
  }

  int head(const Dart& d) const {
    if (d.is_arc) {
      int l = d.edge;
      return d.forward ? net.boundary_ids()[(l + 1) % n] : net.boundary_ids()[l];
    }
    const auto& e = net.edge(d.edge);
    return d.forward ? e.to : e.from;
  }

  Dart reverse(const Dart& d) const { return Dart{d.is_arc, d.edge, !d.forward}; }

  // Next dart of the face on the left: the dart before reverse(d) in the
  // counterclockwise rotation at head(d).
  Dart next_left(const Dart& d) const {
    const auto& r = rot.at(head(d));
    Dart rev = reverse(d);
    auto it = std::find(r.begin(), r.end(), rev);
    if (it == r.end()) throw std::logic_error("dart missing from rotation");
    return it == r.begin() ? r.back() : *(it - 1);
  }
};

}  // namespace

FaceSet enumerate_faces(const Network& net) {
  // Every edge must lie on a source-to-sink walk.
  std::set<int> from_source, to_sink;
  std::queue<int> work;
  for (int b : net.boundary_ids())
    if (net.role(b) == Role::Source) {
      from_source.insert(b);
      work.push(b);
    }
  while (!work.empty()) {
    int v = work.front();
    work.pop();
    for (int eid : net.out_edges(v)) {
      int h = net.edge(eid).to;
      if (from_source.insert(h).second) work.push(h);
    }
  }
  for (int b : net.boundary_ids())
    if (net.role(b) == Role::Sink) {
      to_sink.insert(b);
      work.push(b);
    }
  while (!work.empty()) {
    int v = work.front();
    work.pop();
    for (int eid : net.in_edges(v)) {
      int t = net.edge(eid).from;
      if (to_sink.insert(t).second) work.push(t);
    }
  }
  std::vector<int> offenders;
  for (const auto& e : net.edges())
    if (!from_source.count(e.from) || !to_sink.count(e.to)) offenders.push_back(e.id);
  if (!offenders.empty()) {
    std::string msg = "edges not on any source-to-sink path:";
    for (int e : offenders) msg += " " + std::to_string(e);
    throw FacesPreconditionError(msg, offenders);
  }

  DartSystem ds(net);
  FaceSet fs;
  std::map<Dart, int> face_of;
  std::vector<Dart> todo;
  for (const auto& [v, darts] : ds.rot)
    for (const Dart& d : darts) todo.push_back(d);
  int outside = -1;
  for (const Dart& start : todo) {
    if (face_of.count(start)) continue;
    int id = static_cast<int>(fs.faces.size());
    fs.faces.emplace_back();
    FaceSet::Face& face = fs.faces.back();
    Dart d = start;
    bool all_cw_arcs = true;
    do {
      face_of[d] = id;
      if (d.is_arc) {
        if (d.forward) face.arcs.push_back(d.edge);
        all_cw_arcs = all_cw_arcs && !d.forward;
      } else {
        face.boundary.emplace_back(d.edge, d.forward ? 1 : -1);
        all_cw_arcs = false;
      }
      d = ds.next_left(d);
    } while (!(d == start));
    face.bounded = face.arcs.empty();
    if (all_cw_arcs) {
      if (outside >= 0) throw std::logic_error("two outside faces found");
      outside = id;
    }
  }
  if (outside < 0) throw std::logic_error("no outside face found");

  // Drop the outside face and compact indices.
  std::vector<int> remap(fs.faces.size());
  FaceSet out;
  for (size_t i = 0; i < fs.faces.size(); ++i) {
    if (static_cast<int>(i) == outside) {
      remap[i] = -1;
      continue;
    }
    remap[i] = static_cast<int>(out.faces.size());
    out.faces.push_back(std::move(fs.faces[i]));
  }
  for (const auto& e : net.edges()) {
    int left = remap[face_of.at(Dart{false, e.id, true})];
    int right = remap[face_of.at(Dart{false, e.id, false})];
    if (left < 0 || right < 0) throw std::logic_error("graph edge on the outside face");
    out.side[e.id] = {left, right};
  }
  for (int l = 0; l < net.n_boundary(); ++l) out.arc_face[l] = remap[face_of.at(Dart{true, l, true})];

  int expected = net.n_edges() - net.n_internal() + 1;
  if (static_cast<int>(out.faces.size()) != expected) {
    throw std::logic_error("face count " + std::to_string(out.faces.size()) +
                           " does not match |E| - |V_int| + 1 = " + std::to_string(expected));
  }
  return out;
}

std::vector<RationalFunction> face_weights(const Network& net, const FaceSet& fs) {
  std::vector<RationalFunction> out;
  out.reserve(fs.faces.size());
  for (const auto& face : fs.faces) {
    RationalFunction y = RationalFunction::constant(1);
    for (const auto& [eid, gamma] : face.boundary) {
      const RationalFunction& w = net.edge(eid).weight;
      y = gamma > 0 ? y * w : y / w;
    }
    out.push_back(y);
  }
  return out;
}

DualNetwork dual_network(const Network& net, const FaceSet& fs) {
  DualNetwork dual;
  dual.params = std::make_shared<VariableTable>();
  dual.alpha = dual.params->add("alpha");
  dual.beta = dual.params->add("beta");
  dual.n_faces = static_cast<int>(fs.faces.size());
  RationalFunction alpha = RationalFunction::variable(dual.alpha);
  RationalFunction beta = RationalFunction::variable(dual.beta);

  // Gray = boundary; white on the left of the dual edge, black on the right.
  enum Color { White, Black, Gray };
  auto color_of = [&](int v) {
    if (net.is_boundary(v)) return Gray;
    return net.color(v) == VertexColor::White ? White : Black;
  };
  for (const auto& e : net.edges()) {
    Color tail = color_of(e.from), head = color_of(e.to);
    if (tail == head) continue;
    auto [left, right] = fs.side.at(e.id);
    DualEdge de;
    de.primal_edge = e.id;
    // Orientation pinned by the flag-level bracket: a white tail contributes
    // -alpha to {y_right, y_left}, so the dual edge crosses left-to-right
    // exactly when the white endpoint is the tail or the black one the head.
    bool left_to_right = tail == White || head == Black;
    de.from = left_to_right ? left : right;
    de.to = left_to_right ? right : left;
    if ((tail == White && head == Black) || (tail == Black && head == White)) {
      de.weight = alpha - beta;
    } else if (tail == White || head == White) {
      de.weight = alpha;
    } else {
      de.weight = beta.negated();
    }
    dual.edges.push_back(de);
  }
  return dual;
}

RationalFunction face_bracket_coeff(const DualNetwork& dual, int f, int g) {
  RationalFunction sum;
  for (const auto& e : dual.edges) {
    if (e.from == f && e.to == g) sum = sum + e.weight;
    if (e.from == g && e.to == f) sum = sum - e.weight;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Path weights as face monomials

namespace {

// Winding numbers of a simple closed curve around each face. The curve is a
// set of forward-traversed graph edges plus (for boundary closures) a run of
// counterclockwise arcs; crossing an edge from its right face to its left
// face raises the winding by one.
std::vector<int> winding_numbers(const FaceSet& fs, const std::set<int>& curve_edges,
                                 const std::set<int>& curve_arcs) {
  size_t nf = fs.faces.size();
  std::vector<std::optional<int>> x(nf);
  // Any face containing an arc that is not part of the curve lies outside.
  int anchor = -1;
  for (const auto& [l, f] : fs.arc_face)
    if (!curve_arcs.count(l)) {
      anchor = f;
      break;
    }
  if (anchor < 0) throw std::logic_error("no anchor face outside the curve");
  x[anchor] = 0;
  std::queue<int> work;
  work.push(anchor);
  while (!work.empty()) {
    int f = work.front();
    work.pop();
    for (const auto& [eid, sides] : fs.side) {
      auto [left, right] = sides;
      if (left != f && right != f) continue;
      int jump = curve_edges.count(eid) ? 1 : 0;  // x_left - x_right = jump
      int other = left == f ? right : left;
      int value = left == f ? *x[f] - jump : *x[f] + jump;
      if (!x[other]) {
        x[other] = value;
        work.push(other);
      } else if (*x[other] != value) {
        throw std::logic_error("inconsistent winding numbers");
      }
    }
  }
  std::vector<int> out(nf, 0);
  for (size_t f = 0; f < nf; ++f) {
    if (!x[f]) throw std::logic_error("dual graph is disconnected");
    out[f] = *x[f];
    // Arc faces outside the curve must have winding zero.
  }
  for (const auto& [l, f] : fs.arc_face)
    if (!curve_arcs.count(l) && out[f] != 0) throw std::logic_error("outside face wound by curve");
  return out;
}

int cycle_sign(const Network& net, const std::vector<int>& cycle_edges) {
  std::vector<Vec2> poly;
  for (int eid : cycle_edges) poly.push_back(net.pos(net.edge(eid).from));
  int c = concordance(poly);
  return (c & 1) ? 1 : -1;
}

}  // namespace

FaceMonomial path_face_monomial(const Network& net, const FaceSet& fs, const Path& p) {
  std::vector<int> verts = path_vertices(net, p);
  int src = verts.front(), dst = verts.back();
  if (!net.is_boundary(src) || net.role(src) != Role::Source)
    throw std::invalid_argument("path must start at a source");
  if (!net.is_boundary(dst) || net.role(dst) != Role::Sink)
    throw std::invalid_argument("path must end at a sink");

  FaceMonomial result;
  auto accumulate = [&](const std::vector<int>& winding) {
    for (size_t f = 0; f < winding.size(); ++f) {
      if (winding[f] == 0) continue;
      result.exponents[static_cast<int>(f)] += winding[f];
      if (result.exponents[static_cast<int>(f)] == 0) result.exponents.erase(static_cast<int>(f));
    }
  };

  // Loop erasure: split off a simple cycle at the first edge repetition.
  std::vector<int> stack;
  for (int eid : p.edges) {
    auto it = std::find(stack.begin(), stack.end(), eid);
    if (it != stack.end()) {
      std::vector<int> cycle(it, stack.end());
      result.sign *= -cycle_sign(net, cycle);
      accumulate(winding_numbers(fs, std::set<int>(cycle.begin(), cycle.end()), {}));
      stack.erase(it, stack.end());
    }
    stack.push_back(eid);
  }

  // Remaining simple path, closed counterclockwise along the boundary.
  Path trimmed;
  trimmed.edges = stack;
  std::vector<int> tverts = path_vertices(net, trimmed);
  result.sign *= path_sign(net, tverts);
  int n = net.n_boundary();
  int li = net.boundary_label(src), lj = net.boundary_label(dst);
  std::set<int> arcs;
  for (int l = lj; l != li; l = l % n + 1) arcs.insert(l - 1);  // arc l-1 starts at b_l
  accumulate(winding_numbers(fs, std::set<int>(stack.begin(), stack.end()), arcs));
  return result;
}

RationalFunction face_monomial_value(const FaceMonomial& m,
                                     const std::vector<RationalFunction>& weights) {
  RationalFunction out = RationalFunction::constant(m.sign);
  for (const auto& [f, e] : m.exponents) out = out * weights.at(f).pow(e);
  return out;
}

}  // namespace pnet
