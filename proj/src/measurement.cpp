#include "pnet/measurement.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <tuple>

namespace pnet {

// ---------------------------------------------------------------------------
// Elimination algorithm.
//
// The recursion works on a combinatorial reduction of the network: the
// counterclockwise boundary cycle, the interior rotation system and the edge
// weights. Geometry is only consulted once, to read off the rotations.

namespace {

struct CVert {
  VertexColor color;
  std::vector<int> rot;  // incident edge ids, counterclockwise
};

struct CEdge {
  int from;
  int to;
  RationalFunction w;
};

struct CNet {
  std::vector<std::pair<int, Role>> boundary;  // ccw (vertex key, role)
  std::map<int, CVert> internal;
  std::map<int, CEdge> edges;
  int next_vertex = 0;

  int out_edge_of(int v) const {
    for (const auto& [id, e] : edges)
      if (e.from == v) return id;
    return -1;
  }
  int boundary_slot(int v) const {
    for (size_t i = 0; i < boundary.size(); ++i)
      if (boundary[i].first == v) return static_cast<int>(i);
    return -1;
  }
};

}  // namespace

struct Measurer::Impl {
  std::vector<CNet> arena;
  // (net, source vertex) -> (derived net, first new vertex, second new vertex)
  std::map<std::pair<int, int>, std::tuple<int, int, int>> split_memo;
  std::map<std::tuple<int, int, int>, RationalFunction> value_memo;

  RationalFunction measure(int net_idx, int src, int snk);
  std::tuple<int, int, int> split(int net_idx, int src);
};

namespace {

// Replace boundary slot `slot` by the two keys (early, late) in ccw order.
void replace_slot(CNet& net, int slot, std::pair<int, Role> early, std::pair<int, Role> late) {
  net.boundary[slot] = early;
  net.boundary.insert(net.boundary.begin() + slot + 1, late);
}

}  // namespace

std::tuple<int, int, int> Measurer::Impl::split(int net_idx, int src) {
  auto key = std::make_pair(net_idx, src);
  auto hit = split_memo.find(key);
  if (hit != split_memo.end()) return hit->second;

  CNet child = arena[net_idx];
  int e0 = child.out_edge_of(src);
  const CEdge edge0 = child.edges.at(e0);
  int v = edge0.to;
  const CVert vert = child.internal.at(v);
  int slot = child.boundary_slot(src);

  size_t s = std::find(vert.rot.begin(), vert.rot.end(), e0) - vert.rot.begin();
  int after = vert.rot[(s + 1) % 3];   // attaches to the ccw-later new slot
  int after2 = vert.rot[(s + 2) % 3];  // attaches to the ccw-earlier slot

  child.edges.erase(e0);
  child.internal.erase(v);

  int early = child.next_vertex++;
  int late = child.next_vertex++;

  auto reattach = [&](int eid, int fresh) {
    CEdge& e = child.edges.at(eid);
    if (e.from == v) {
      e.from = fresh;  // fresh vertex becomes a source carrying this edge
    } else {
      e.to = fresh;  // fresh sink receiving this edge
    }
    e.w = RationalFunction::constant(1);
  };

  if (vert.color == VertexColor::White) {
    // Both non-special edges leave v; the two fresh vertices are sources.
    reattach(after2, early);
    reattach(after, late);
    replace_slot(child, slot, {early, Role::Source}, {late, Role::Source});
  } else {
    // One fresh source carries e+, one fresh sink receives e-.
    auto fresh_role = [&](int eid) {
      return arena[net_idx].edges.at(eid).from == v ? Role::Source : Role::Sink;
    };
    Role later_role = fresh_role(after);
    reattach(after2, early);
    reattach(after, late);
    replace_slot(child, slot,
                 {early, later_role == Role::Source ? Role::Sink : Role::Source},
                 {late, later_role});
  }

  arena.push_back(std::move(child));
  auto result = std::make_tuple(static_cast<int>(arena.size()) - 1, early, late);
  split_memo.emplace(key, result);
  return result;
}

RationalFunction Measurer::Impl::measure(int net_idx, int src, int snk) {
  auto key = std::make_tuple(net_idx, src, snk);
  auto hit = value_memo.find(key);
  if (hit != value_memo.end()) return hit->second;

  // split() grows the arena and invalidates references into it, so copy
  // everything the formulas need up front.
  int e0 = arena[net_idx].out_edge_of(src);
  if (e0 < 0) throw std::logic_error("source without outgoing edge");
  const CEdge edge0 = arena[net_idx].edges.at(e0);
  RationalFunction result;

  if (!arena[net_idx].internal.count(edge0.to)) {
    // Base case: the neighbor is a boundary sink.
    result = edge0.to == snk ? edge0.w : RationalFunction();
  } else if (arena[net_idx].internal.at(edge0.to).color == VertexColor::White) {
    const CVert vert = arena[net_idx].internal.at(edge0.to);
    size_t s = std::find(vert.rot.begin(), vert.rot.end(), e0) - vert.rot.begin();
    const RationalFunction w_late = arena[net_idx].edges.at(vert.rot[(s + 1) % 3]).w;
    const RationalFunction w_early = arena[net_idx].edges.at(vert.rot[(s + 2) % 3]).w;
    auto [child, early, late] = split(net_idx, src);
    result = edge0.w * (w_early * measure(child, early, snk) + w_late * measure(child, late, snk));
  } else {
    const CVert vert = arena[net_idx].internal.at(edge0.to);
    size_t s = std::find(vert.rot.begin(), vert.rot.end(), e0) - vert.rot.begin();
    int after = vert.rot[(s + 1) % 3], after2 = vert.rot[(s + 2) % 3];
    const bool plus_is_later = arena[net_idx].edges.at(after).from == edge0.to;
    int eplus = plus_is_later ? after : after2;
    int eminus = plus_is_later ? after2 : after;
    const RationalFunction w_plus = arena[net_idx].edges.at(eplus).w;
    const RationalFunction w_minus = arena[net_idx].edges.at(eminus).w;
    auto [child, early, late] = split(net_idx, src);
    int i_u = plus_is_later ? late : early;
    int j_u = plus_is_later ? early : late;
    RationalFunction m_ij = measure(child, i_u, snk);
    RationalFunction m_loop = measure(child, i_u, j_u);
    result = (edge0.w * w_plus * m_ij) /
             (RationalFunction::constant(1) + w_minus * w_plus * m_loop);
  }

  value_memo.emplace(key, result);
  return result;
}

Measurer::Measurer(const Network& net) : impl_(std::make_unique<Impl>()) {
  CNet base;
  int max_key = 0;
  for (int b : net.boundary_ids()) {
    base.boundary.emplace_back(b, net.role(b));
    max_key = std::max(max_key, b);
  }
  for (int v : net.internal_ids()) {
    base.internal.emplace(v, CVert{net.color(v), rotation(net, v)});
    max_key = std::max(max_key, v);
  }
  for (const auto& e : net.edges()) base.edges.emplace(e.id, CEdge{e.from, e.to, e.weight});
  base.next_vertex = max_key + 1;
  impl_->arena.push_back(std::move(base));
}

Measurer::~Measurer() = default;

RationalFunction Measurer::measure(int source_label, int sink_label) {
  const CNet& base = impl_->arena[0];
  int src = base.boundary.at(source_label - 1).first;
  int snk = base.boundary.at(sink_label - 1).first;
  if (base.boundary[source_label - 1].second != Role::Source)
    throw std::invalid_argument("label " + std::to_string(source_label) + " is not a source");
  if (base.boundary[sink_label - 1].second != Role::Sink)
    throw std::invalid_argument("label " + std::to_string(sink_label) + " is not a sink");
  return impl_->measure(0, src, snk);
}

RationalFunction boundary_measurement(const Network& net, int source_label, int sink_label) {
  Measurer m(net);
  return m.measure(source_label, sink_label);
}

MeasurementMatrix measurement_matrix(const Network& net) {
  MeasurementMatrix out;
  out.sources = net.source_labels();
  out.sinks = net.sink_labels();
  Measurer m(net);
  out.entries.resize(out.sources.size());
  for (size_t p = 0; p < out.sources.size(); ++p) {
    out.entries[p].resize(out.sinks.size());
    for (size_t q = 0; q < out.sinks.size(); ++q) {
      out.entries[p][q] = m.measure(out.sources[p], out.sinks[q]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Signed path enumeration oracle

int path_sign(const Network& net, const std::vector<int>& verts) {
  if (verts.size() == 2) return 1;  // single chord: simple ccw closed curve
  std::vector<Vec2> curve;
  for (int v : verts) curve.push_back(net.pos(v));
  int n = net.n_boundary();
  int li = net.boundary_label(verts.front()), lj = net.boundary_label(verts.back());
  for (int l = lj % n + 1; l != li; l = l % n + 1) curve.push_back(net.pos(net.vertex_of_label(l)));
  return concordance(curve) & 1 ? 1 : -1;
}

PowerSeries path_sum_oracle(const Network& net, int source_label, int sink_label, int order,
                            const std::map<int, Rat>& point) {
  auto eval = [&](const RationalFunction& f) {
    std::map<int, RationalFunction> bind;
    std::set<int> vars;
    f.collect_vars(vars);
    for (int v : vars) {
      auto it = point.find(v);
      if (it == point.end())
        throw std::invalid_argument("oracle point misses variable " + net.vars()->name(v));
      if (it->second == 0) throw std::invalid_argument("oracle point must be nonzero");
      bind.emplace(v, RationalFunction::constant(it->second));
    }
    RationalFunction r = f.substitute(bind);
    return r.num.constant_value() / r.den.constant_value();
  };
  std::map<int, Rat> value;
  for (const auto& e : net.edges()) value[e.id] = eval(e.weight);

  PowerSeries s;
  s.var = -1;
  s.order = order;
  s.coeffs.assign(order + 1, Rat(0));

  int src = net.vertex_of_label(source_label);
  int dst = net.vertex_of_label(sink_label);
  if (net.role(src) != Role::Source) throw std::invalid_argument("not a source label");
  if (net.role(dst) != Role::Sink) throw std::invalid_argument("not a sink label");

  std::vector<int> verts{src};
  Rat prod(1);
  std::function<void(int, int)> dfs = [&](int at, int len) {
    if (at == dst) {
      s.coeffs[len] += Rat(path_sign(net, verts)) * prod;
      return;
    }
    if (len == order) return;
    for (int eid : net.out_edges(at)) {
      const auto& e = net.edge(eid);
      verts.push_back(e.to);
      Rat keep = prod;
      prod *= value[eid];
      dfs(e.to, len + 1);
      prod = keep;
      verts.pop_back();
    }
  };
  dfs(src, 0);
  return s;
}

// ---------------------------------------------------------------------------
// Extended matrix and Pluecker coordinates

int interleaving_count(const std::vector<int>& I, int p, int j) {
  int ip = I.at(p);
  int lo = std::min(ip, j), hi = std::max(ip, j);
  int c = 0;
  for (int i : I)
    if (lo < i && i < hi) ++c;
  return c;
}

ExtendedMatrix extended_matrix(const Network& net) {
  MeasurementMatrix m = measurement_matrix(net);
  ExtendedMatrix x;
  x.sources = m.sources;
  x.n = net.n_boundary();
  size_t k = m.sources.size();
  x.entries.assign(k, std::vector<RationalFunction>(x.n));
  for (size_t p = 0; p < k; ++p) {
    for (size_t a = 0; a < m.sources.size(); ++a)
      x.entries[p][m.sources[a] - 1] = RationalFunction::constant(a == p ? 1 : 0);
    for (size_t q = 0; q < m.sinks.size(); ++q) {
      int j = m.sinks[q];
      int s = interleaving_count(m.sources, static_cast<int>(p), j);
      x.entries[p][j - 1] = (s & 1) ? m.entries[p][q].negated() : m.entries[p][q];
    }
  }
  return x;
}

PluckerVector plucker(const ExtendedMatrix& x) {
  PluckerVector out;
  out.n = x.n;
  out.k = static_cast<int>(x.sources.size());
  std::vector<int> cols(out.k);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == out.k) {
      RFMat minor(out.k, std::vector<RationalFunction>(out.k));
      for (int r = 0; r < out.k; ++r)
        for (int c = 0; c < out.k; ++c) minor[r][c] = x.entries[r][cols[c] - 1];
      out.coords.emplace(cols, rf_det(std::move(minor)));
      return;
    }
    for (int c = start; c <= out.n; ++c) {
      cols[depth] = c;
      rec(c + 1, depth + 1);
    }
  };
  rec(1, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Square networks: transfer matrices and concatenation

namespace {

// Checks the square shape and returns the number of lines.
int square_lines(const Network& net) {
  int n = net.n_boundary();
  if (n % 2 != 0) throw std::invalid_argument("square network needs an even boundary");
  int L = n / 2;
  for (int label = 1; label <= n; ++label) {
    Role want = label <= L ? Role::Source : Role::Sink;
    if (net.role(net.vertex_of_label(label)) != want)
      throw std::invalid_argument("square network: sources must be b_1..b_k");
  }
  return L;
}

}  // namespace

RFMat a_matrix(const Network& net) {
  int L = square_lines(net);
  MeasurementMatrix m = measurement_matrix(net);
  RFMat a(L, std::vector<RationalFunction>(L));
  for (int p = 0; p < L; ++p)
    for (int q = 0; q < L; ++q) a[p][q] = m.entries[p][L - 1 - q];
  return a;
}

Network concatenate(const Network& n1, const Network& n2) {
  if (n1.vars() != n2.vars())
    throw std::invalid_argument("concatenation requires a shared variable table");
  int L = square_lines(n1);
  if (square_lines(n2) != L)
    throw std::invalid_argument("concatenation: mismatched segment lengths");

  Network out(n1.vars());
  std::vector<int> ids(2 * L + 1);
  for (int i = 1; i <= L; ++i)
    ids[i] = out.add_boundary(Role::Source, n1.pos(n1.vertex_of_label(i)));
  for (int q = 1; q <= L; ++q)
    ids[L + q] = out.add_boundary(Role::Sink, n2.pos(n2.vertex_of_label(L + q)));

  // Affine x-compression of each operand's interior into its own half.
  auto xmap = [&](const Network& net, const Rat& lo, const Rat& hi) {
    std::map<int, int> vmap;
    if (net.internal_ids().empty()) return vmap;
    Rat xmin = net.pos(net.internal_ids()[0]).x, xmax = xmin;
    for (int v : net.internal_ids()) {
      xmin = std::min(xmin, net.pos(v).x);
      xmax = std::max(xmax, net.pos(v).x);
    }
    for (int v : net.internal_ids()) {
      Rat x = xmax == xmin ? Rat((lo + hi) / 2)
                           : Rat(lo + (net.pos(v).x - xmin) * (hi - lo) / (xmax - xmin));
      vmap[v] = out.add_internal(net.color(v), Vec2(x, net.pos(v).y));
    }
    return vmap;
  };
  std::map<int, int> map1 = xmap(n1, Rat(-2, 5), Rat(-1, 25));
  std::map<int, int> map2 = xmap(n2, Rat(1, 25), Rat(2, 5));

  auto out_vertex = [&](const Network& net, const std::map<int, int>& vmap, int v,
                        bool from_n1) -> int {
    if (!net.is_boundary(v)) return vmap.at(v);
    int label = net.boundary_label(v);
    if (from_n1) {
      if (label > L) throw std::logic_error("unexpected glued vertex");
      return ids[label];
    }
    return ids[label];
  };

  // Unique edge at a boundary vertex.
  auto boundary_edge = [&](const Network& net, int v) {
    auto inc = net.incident_edges(v);
    if (inc.size() != 1) throw std::invalid_argument("glued boundary vertex must have degree 1");
    return inc[0];
  };

  std::set<int> consumed;  // n2 source edges merged into n1 sink edges
  for (const auto& e : n1.edges()) {
    bool glued = n1.is_boundary(e.to) && n1.boundary_label(e.to) > L;
    if (!glued) {
      out.add_edge(out_vertex(n1, map1, e.from, true), out_vertex(n1, map1, e.to, true), e.weight);
      continue;
    }
    int line = 2 * L + 1 - n1.boundary_label(e.to);
    int src2 = n2.vertex_of_label(line);
    int e2 = boundary_edge(n2, src2);
    consumed.insert(e2);
    const auto& rec2 = n2.edge(e2);
    out.add_edge(out_vertex(n1, map1, e.from, true), out_vertex(n2, map2, rec2.to, false),
                 e.weight * rec2.weight);
  }
  for (const auto& e : n2.edges()) {
    if (consumed.count(e.id)) continue;
    if (n2.is_boundary(e.from) && n2.boundary_label(e.from) <= L)
      throw std::invalid_argument("concatenation: direction clash on the glued segment");
    out.add_edge(out_vertex(n2, map2, e.from, false), out_vertex(n2, map2, e.to, false), e.weight);
  }
  return out;
}

Network generic_network(int n, VarTablePtr vars) {
  std::vector<std::pair<int, bool>> word;  // (block index, lower?)
  for (int i = 1; i < n; ++i)
    for (int j = i; j >= 1; --j) word.emplace_back(j, true);
  for (int i = 1; i < n; ++i)
    for (int j = i; j >= 1; --j) word.emplace_back(j, false);

  Network acc(vars);
  bool first = true;
  int idx = 0;
  for (auto [i, lower] : word) {
    ++idx;
    RationalFunction d = RationalFunction::variable(vars->add("d" + std::to_string(idx)));
    RationalFunction c = RationalFunction::variable(vars->add("c" + std::to_string(idx)));
    Network factor = rho_factor(n, i, lower, d, c, vars);
    acc = first ? std::move(factor) : concatenate(acc, factor);
    first = false;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Elementary GL_n action

GlElement GlElement::diagonal(std::vector<RationalFunction> d) {
  GlElement a;
  a.kind = Kind::Diag;
  a.diag = std::move(d);
  return a;
}

GlElement GlElement::lower(int i, RationalFunction l) {
  GlElement a;
  a.kind = Kind::Lower;
  a.index = i;
  a.coeff = std::move(l);
  return a;
}

GlElement GlElement::upper(int i, RationalFunction u) {
  GlElement a;
  a.kind = Kind::Upper;
  a.index = i;
  a.coeff = std::move(u);
  return a;
}

RFMat gl_matrix(const GlElement& a, int n) {
  RFMat m = rf_identity(n);
  switch (a.kind) {
    case GlElement::Kind::Diag:
      if (static_cast<int>(a.diag.size()) != n) throw std::invalid_argument("diag size mismatch");
      for (int i = 0; i < n; ++i) m[i][i] = a.diag[i];
      break;
    case GlElement::Kind::Lower:
      m[a.index - 1][a.index - 2] = a.coeff;  // 1 + l e_{i,i-1}
      break;
    case GlElement::Kind::Upper:
      m[a.index - 2][a.index - 1] = a.coeff;  // 1 + u e_{i-1,i}
      break;
  }
  return m;
}

Network act_elementary(const Network& net, const GlElement& a) {
  int n = net.n_boundary();
  if (a.kind == GlElement::Kind::Diag) {
    if (static_cast<int>(a.diag.size()) != n) throw std::invalid_argument("diag size mismatch");
    Network out = net;
    for (int label = 1; label <= n; ++label) {
      int b = net.vertex_of_label(label);
      int eid = net.incident_edges(b).at(0);
      const auto& e = net.edge(eid);
      if (net.role(b) == Role::Source) {
        out.set_weight(eid, a.diag[label - 1].inverse() * e.weight);
      } else {
        out.set_weight(eid, e.weight * a.diag[label - 1]);
      }
    }
    return out;
  }

  int i = a.index;
  if (i < 2 || i > n) throw std::invalid_argument("elementary index out of range");
  // E^-_i couples a slant from wire i to wire i-1; E^+_i from i-1 to i.
  int from_label = a.kind == GlElement::Kind::Lower ? i : i - 1;
  int to_label = a.kind == GlElement::Kind::Lower ? i - 1 : i;

  for (const Rat& eps : {Rat(1, 8), Rat(1, 16), Rat(1, 32), Rat(1, 64)}) {
    Network out(net.vars());
    std::map<int, int> vmap;
    for (int b : net.boundary_ids()) vmap[b] = out.add_boundary(net.role(b), net.pos(b));
    for (int v : net.internal_ids()) vmap[v] = out.add_internal(net.color(v), net.pos(v));
    int bf = net.vertex_of_label(from_label), bt = net.vertex_of_label(to_label);
    int v_new = out.add_internal(VertexColor::White, net.pos(bf).scaled(1 - eps));
    int u_new = out.add_internal(VertexColor::Black, net.pos(bt).scaled(1 - eps));
    for (const auto& e : net.edges()) {
      int from = vmap.at(e.from), to = vmap.at(e.to);
      if (e.from == bf) from = v_new;
      if (e.to == bf) to = v_new;
      if (e.from == bt) from = u_new;
      if (e.to == bt) to = u_new;
      out.add_edge(from, to, e.weight);
    }
    RationalFunction one = RationalFunction::constant(1);
    if (net.role(bf) == Role::Source) {
      out.add_edge(vmap[bf], v_new, one);
    } else {
      out.add_edge(v_new, vmap[bf], one);
    }
    if (net.role(bt) == Role::Source) {
      out.add_edge(vmap[bt], u_new, one);
    } else {
      out.add_edge(u_new, vmap[bt], one);
    }
    out.add_edge(v_new, u_new, a.coeff);
    if (validate(out).empty()) return out;
  }
  throw std::runtime_error("act_elementary: could not embed the gadget cleanly");
}

// ---------------------------------------------------------------------------
// Matrix helpers over the rational-function field

RFMat rf_identity(int n) {
  RFMat m(n, std::vector<RationalFunction>(n));
  for (int i = 0; i < n; ++i) m[i][i] = RationalFunction::constant(1);
  return m;
}

RFMat rf_mul(const RFMat& a, const RFMat& b) {
  size_t r = a.size(), mid = b.size(), c = b.empty() ? 0 : b[0].size();
  RFMat out(r, std::vector<RationalFunction>(c));
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < c; ++j) {
      RationalFunction s;
      for (size_t t = 0; t < mid; ++t) s = s + a[i][t] * b[t][j];
      out[i][j] = s;
    }
  return out;
}

bool rf_equal_mat(const RFMat& a, const RFMat& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    for (size_t j = 0; j < a[i].size(); ++j)
      if (!a[i][j].equals(b[i][j])) return false;
  }
  return true;
}

RationalFunction rf_det(RFMat a) {
  size_t n = a.size();
  RationalFunction det = RationalFunction::constant(1);
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    while (pivot < n && a[pivot][col].is_zero()) ++pivot;
    if (pivot == n) return RationalFunction();
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      det = det.negated();
    }
    det = det * a[col][col];
    RationalFunction inv = a[col][col].inverse();
    for (size_t r = col + 1; r < n; ++r) {
      if (a[r][col].is_zero()) continue;
      RationalFunction f = a[r][col] * inv;
      for (size_t c = col; c < n; ++c) a[r][c] = a[r][c] - f * a[col][c];
    }
  }
  return det;
}

RFMat normalize_on_columns(const RFMat& x, const std::vector<int>& cols) {
  size_t k = x.size();
  if (cols.size() != k) throw std::invalid_argument("need k pivot columns");
  RFMat m = x;
  for (size_t p = 0; p < k; ++p) {
    size_t c = static_cast<size_t>(cols[p] - 1);
    size_t pivot = p;
    while (pivot < k && m[pivot][c].is_zero()) ++pivot;
    if (pivot == k) throw std::invalid_argument("pivot block is singular");
    std::swap(m[pivot], m[p]);
    RationalFunction inv = m[p][c].inverse();
    for (auto& entry : m[p]) entry = entry * inv;
    for (size_t r = 0; r < k; ++r) {
      if (r == p || m[r][c].is_zero()) continue;
      RationalFunction f = m[r][c];
      for (size_t cc = 0; cc < m[r].size(); ++cc) m[r][cc] = m[r][cc] - f * m[p][cc];
    }
  }
  return m;
}

}  // namespace pnet
