#include "pnet/cluster.hpp"

#include "pnet/measurement.hpp"
#include "pnet/poisson.hpp"

#include <algorithm>
#include <sstream>

namespace pnet {

// ---------------------------------------------------------------------------
// Mutations and tau-coordinates

IntMat mutate_matrix(const IntMat& b, int k) {
  int n = static_cast<int>(b.size());
  int cols = n == 0 ? 0 : static_cast<int>(b[0].size());
  if (k < 1 || k > n) throw std::out_of_range("mutation direction out of range");
  int kk = k - 1;
  IntMat out = b;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < cols; ++j) {
      if (i == kk || j == kk) {
        out[i][j] = -b[i][j];
      } else {
        out[i][j] = b[i][j] + (std::abs(b[i][kk]) * b[kk][j] + b[i][kk] * std::abs(b[kk][j])) / 2;
      }
    }
  return out;
}

Seed mutate_cluster(const Seed& seed, int k) {
  int n = seed.n();
  if (k < 1 || k > n) throw std::out_of_range("mutation direction out of range");
  const RationalFunction& xk = seed.cluster[k - 1];
  if (xk.is_zero()) throw DivisionByZeroError();
  RationalFunction plus = RationalFunction::constant(1);
  RationalFunction minus = RationalFunction::constant(1);
  for (int t = 0; t < n + seed.m(); ++t) {
    int b = seed.btilde[k - 1][t];
    if (b > 0) plus = plus * seed.var(t).pow(b);
    if (b < 0) minus = minus * seed.var(t).pow(-b);
  }
  Seed out = seed;
  out.cluster[k - 1] = (plus + minus) / xk;
  out.btilde = mutate_matrix(seed.btilde, k);
  return out;
}

namespace {

int rat_rank(std::vector<std::vector<Rat>> m) {
  int rank = 0;
  size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  for (size_t c = 0; c < cols && rank < static_cast<int>(rows); ++c) {
    size_t pivot = rank;
    while (pivot < rows && m[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[rank]);
    for (size_t r = rank + 1; r < rows; ++r) {
      if (m[r][c] == 0) continue;
      Rat f = m[r][c] / m[rank][c];
      for (size_t cc = c; cc < cols; ++cc) m[r][cc] -= f * m[rank][cc];
    }
    ++rank;
  }
  return rank;
}

// Exponent matrix of the x -> tau map: full btilde rows on cluster
// directions, the skew extension plus kappa on stable ones.
std::vector<std::vector<Rat>> tau_exponent_rows(const IntMat& b, const std::vector<int>& kappa,
                                                int upto) {
  int n = static_cast<int>(b.size());
  int total = n == 0 ? 0 : static_cast<int>(b[0].size());
  std::vector<std::vector<Rat>> rows;
  for (int t = 0; t < upto; ++t) {
    std::vector<Rat> row(total, Rat(0));
    if (t < n) {
      for (int u = 0; u < total; ++u) row[u] = b[t][u];
    } else {
      for (int u = 0; u < n; ++u) row[u] = -b[u][t];
      row[t] = kappa[t - n];
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<int> select_kappa(const IntMat& btilde) {
  int n = static_cast<int>(btilde.size());
  int total = n == 0 ? 0 : static_cast<int>(btilde[0].size());
  int m = total - n;
  {
    std::vector<std::vector<Rat>> base;
    for (int t = 0; t < n; ++t) {
      std::vector<Rat> row(total);
      for (int u = 0; u < total; ++u) row[u] = btilde[t][u];
      base.push_back(std::move(row));
    }
    if (rat_rank(base) != n) throw std::invalid_argument("select_kappa requires rank btilde = n");
  }
  std::vector<int> kappa(m, 0);
  for (int s = 0; s < m; ++s) {
    bool found = false;
    for (int candidate = 0; candidate <= 3 && !found; ++candidate) {
      kappa[s] = candidate;
      if (rat_rank(tau_exponent_rows(btilde, kappa, n + s + 1)) == n + s + 1) found = true;
    }
    if (!found) throw std::runtime_error("no small kappa achieves full rank");
  }
  return kappa;
}

TauCluster tau_coordinates(const Seed& seed, const std::vector<int>& kappa) {
  int n = seed.n(), m = seed.m();
  if (static_cast<int>(kappa.size()) != m) throw std::invalid_argument("kappa size mismatch");
  TauCluster out;
  out.kappa.assign(n, 0);
  out.kappa.insert(out.kappa.end(), kappa.begin(), kappa.end());
  for (int t = 0; t < n + m; ++t) {
    RationalFunction tau = RationalFunction::constant(1);
    if (t < n) {
      for (int u = 0; u < n + m; ++u)
        if (seed.btilde[t][u] != 0) tau = tau * seed.var(u).pow(seed.btilde[t][u]);
    } else {
      tau = seed.var(t).pow(kappa[t - n]);
      for (int u = 0; u < n; ++u)
        if (seed.btilde[u][t] != 0) tau = tau * seed.var(u).pow(-seed.btilde[u][t]);
    }
    out.tau.push_back(tau);
  }
  return out;
}

// ---------------------------------------------------------------------------
// The Grassmannian initial cluster

int GrassmannSeed::dir_index(int i, int j) const {
  if (!is_stable(i, j)) return (i - 1) * (m - 1) + (j - 2);
  int n_cluster = (k - 1) * (m - 1);
  if (j == 1) return n_cluster + (i - 1);
  return n_cluster + k + (j - 2);  // i == k, j >= 2
}

GrassmannSeed grassmann_initial_seed(int k, int m) {
  if (k < 1 || m < 1) throw std::invalid_argument("grassmann seed needs k, m >= 1");
  GrassmannSeed gs;
  gs.k = k;
  gs.m = m;
  gs.vars = std::make_shared<VariableTable>();
  std::vector<std::vector<RationalFunction>> y(k + 1, std::vector<RationalFunction>(m + 1));
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= m; ++j)
      y[i][j] = RationalFunction::variable(
          gs.vars->add("y" + std::to_string(i) + "_" + std::to_string(j)));

  gs.f.assign(k + 1, std::vector<RationalFunction>(m + 2, RationalFunction::constant(1)));
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= m; ++j) {
      int l = gs.l(i, j);
      RFMat minor(l + 1, std::vector<RationalFunction>(l + 1));
      for (int r = 0; r <= l; ++r)
        for (int c = 0; c <= l; ++c) minor[r][c] = y[i - l + r][j + c];
      RationalFunction det = rf_det(std::move(minor));
      int sign = ((k - i) * (l - 1)) % 2 == 0 ? 1 : -1;
      gs.f[i][j] = RationalFunction::constant(sign) * det;
    }

  int n_cluster = (k - 1) * (m - 1);
  int n_stable = k + m - 1;
  Seed& seed = gs.seed;
  seed.vars = gs.vars;
  seed.cluster.resize(n_cluster);
  seed.stable.resize(n_stable);
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= m; ++j) {
      int idx = gs.dir_index(i, j);
      if (gs.is_stable(i, j)) {
        seed.stable[idx - n_cluster] = gs.f[i][j];
      } else {
        seed.cluster[idx] = gs.f[i][j];
      }
    }

  seed.btilde.assign(n_cluster, std::vector<int>(n_cluster + n_stable, 0));
  auto add_edge = [&](int iu, int ju, int iv, int jv) {
    if (iu < 1 || iu > k || ju < 1 || ju > m) return;
    if (iv < 1 || iv > k || jv < 1 || jv > m) return;
    int u = gs.dir_index(iu, ju), v = gs.dir_index(iv, jv);
    if (!gs.is_stable(iu, ju)) seed.btilde[u][v] += 1;
    if (!gs.is_stable(iv, jv)) seed.btilde[v][u] -= 1;
  };
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= m; ++j) {
      add_edge(i, j, i, j + 1);
      add_edge(i + 1, j, i, j);
      add_edge(i, j, i + 1, j - 1);
    }
  return gs;
}

// ---------------------------------------------------------------------------
// The hexagonal network N(k,m)

namespace {

// Boundary circle parameters: sources down the west side, sinks along the
// north side ordered east to west.
Rat source_t(int i, int k) {
  int s = 2 * i - (k + 1);
  if (s == 0) return Rat(16 * k * k);
  return Rat(-8 * k) / s;
}

Rat sink_t(int col, int m) { return 1 + Rat(m + 1 - 2 * col, 4 * m); }

}  // namespace

Network build_hex_network(int k, int m) {
  if (k < 2 || m < 2) throw std::invalid_argument("hex network needs k, m >= 2");
  auto vars = std::make_shared<VariableTable>();
  Network net(vars);
  int n = k + m;

  std::vector<int> src(k + 1), snk_of_col(m + 1);
  for (int i = 1; i <= k; ++i) src[i] = net.add_boundary(Role::Source, circle_point(source_t(i, k)));
  {
    // Sinks b_{k+1}..b_n sit at columns m, m-1, ..., 1.
    std::vector<int> ids(m);
    for (int q = 1; q <= m; ++q) {
      int col = m + 1 - q;
      ids[q - 1] = net.add_boundary(Role::Sink, circle_point(sink_t(col, m)));
      snk_of_col[col] = ids[q - 1];
    }
  }

  // Interior grid: black B(i,j) collect flow, white W(i,j) redistribute; the
  // bottom-row blacks and east-column whites are contracted away. The hull of
  // the boundary points is a thin band along the northwest, so the grid is a
  // bilinear patch anchored to the hull corners, pulled toward their centroid.
  Vec2 p1 = net.pos(src[1]);
  Vec2 pk = net.pos(src[k]);
  Vec2 pe = net.pos(snk_of_col[m]);  // b_{k+1}, east end of the sink chain
  Vec2 pw = net.pos(snk_of_col[1]);  // b_n, west end
  Vec2 g = (p1 + pk + pe + pw).scaled(Rat(1, 4));
  auto pull = [&](const Vec2& target) { return g + (target - g).scaled(Rat(3, 5)); };
  Vec2 c_nw = pull((p1 + pw).scaled(Rat(1, 2)));
  Vec2 c_ne = pull(pe);
  Vec2 c_sw = pull(pk);
  Vec2 c_se = pull((pk + pe).scaled(Rat(1, 2)));
  auto patch = [&](const Rat& raw_x, const Rat& raw_y) {
    Rat u = (raw_x - Rat(3, 4)) / (m - 1);                 // 0 west .. 1 east
    Rat v = (Rat(-3, 4) - raw_y) / (k - 1);                // 0 top .. 1 bottom
    Vec2 top = c_nw.scaled(1 - u) + c_ne.scaled(u);
    Vec2 bot = c_sw.scaled(1 - u) + c_se.scaled(u);
    return top.scaled(1 - v) + bot.scaled(v);
  };
  std::map<std::pair<int, int>, int> B, W;
  for (int i = 1; i <= k - 1; ++i)
    for (int j = 1; j <= m; ++j)
      B[{i, j}] = net.add_internal(VertexColor::Black,
                                   patch(Rat(4 * j - 1, 4), Rat(-4 * i - 1, 4)));
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= m - 1; ++j)
      W[{i, j}] = net.add_internal(VertexColor::White,
                                   patch(Rat(4 * j + 1, 4), Rat(-4 * i + 1, 4)));

  int wcount = 0;
  auto fresh = [&]() {
    return RationalFunction::variable(vars->add("w" + std::to_string(++wcount)));
  };

  for (int i = 1; i <= k; ++i) net.add_edge(src[i], i < k ? B[{i, 1}] : W[{k, 1}], fresh());
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= m - 1; ++j) {
      if (i < k) {
        net.add_edge(W[{i, j}], B[{i, j + 1}], fresh());
      } else if (j + 1 <= m - 1) {
        net.add_edge(W[{k, j}], W[{k, j + 1}], fresh());
      } else {
        net.add_edge(W[{k, m - 1}], B[{k - 1, m}], fresh());  // contracted corner
      }
    }
  for (int i = 1; i <= k - 1; ++i)
    for (int j = 1; j <= m - 1; ++j) net.add_edge(B[{i, j}], W[{i, j}], fresh());
  for (int i = 1; i <= k - 1; ++i)
    net.add_edge(B[{i, m}], i >= 2 ? B[{i - 1, m}] : snk_of_col[m], fresh());
  for (int i = 2; i <= k; ++i)
    for (int j = 1; j <= m - 1; ++j) net.add_edge(W[{i, j}], B[{i - 1, j}], fresh());
  for (int j = 1; j <= m - 1; ++j) net.add_edge(W[{1, j}], snk_of_col[j], fresh());

  (void)n;
  return net;
}

HexModel build_hex_model(int k, int m) {
  HexModel hm;
  hm.k = k;
  hm.m = m;
  hm.n = k + m;
  hm.net = build_hex_network(k, m);
  {
    auto violations = validate(hm.net);
    if (!violations.empty()) {
      throw std::logic_error("hex network invalid: " + violations.front().rule + " " +
                             violations.front().detail);
    }
  }
  hm.fs = enumerate_faces(hm.net);
  hm.ys = face_weights(hm.net, hm.fs);

  // f_ij as Pluecker ratios of the extended matrix (the source minor is 1).
  ExtendedMatrix x = extended_matrix(hm.net);
  auto f_of = [&](int i, int j) -> RationalFunction {
    if (i <= 0 || j >= m + 1) return RationalFunction::constant(1);
    if (i > k || j < 1) throw std::logic_error("f index out of range");
    int l = std::min(i - 1, m - j);
    std::vector<int> cols;
    for (int c = 1; c <= k; ++c)
      if (c < i - l || c > i) cols.push_back(c);
    for (int c = j + k; c <= j + l + k; ++c) cols.push_back(c);
    std::sort(cols.begin(), cols.end());
    RFMat minor(k, std::vector<RationalFunction>(k));
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) minor[r][c] = x.entries[r][cols[c] - 1];
    return rf_det(std::move(minor));
  };
  hm.f.assign(k + 1, std::vector<RationalFunction>(m + 2, RationalFunction::constant(1)));
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= m; ++j) hm.f[i][j] = f_of(i, j);

  // Reconstruct the face labelling from the second difference of the
  // rectangle ratios: y_(i, j+k) = +- f(i,j) f(i-2,j+1) f(i-1,j+2) /
  // (f(i-2,j+2) f(i-1,j) f(i,j+1)), padded with 1 outside the grid.
  auto padded = [&](int i, int j) -> RationalFunction {
    if (i <= 0 || j >= m + 1) return RationalFunction::constant(1);
    return hm.f[i][j];
  };
  std::set<int> used;
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= m; ++j) {
      RationalFunction cand = padded(i, j) * padded(i - 2, j + 1) * padded(i - 1, j + 2) /
                              (padded(i - 2, j + 2) * padded(i - 1, j) * padded(i, j + 1));
      int found = -1;
      for (size_t fi = 0; fi < hm.ys.size(); ++fi) {
        if (hm.ys[fi].equals(cand) || hm.ys[fi].equals(cand.negated())) {
          if (found >= 0) throw std::logic_error("ambiguous face label");
          found = static_cast<int>(fi);
        }
      }
      if (found < 0) throw std::logic_error("no face matches label candidate");
      if (!used.insert(found).second) throw std::logic_error("face labelled twice");
      hm.face_label[{i, j + k}] = found;
    }
  for (size_t fi = 0; fi < hm.ys.size(); ++fi)
    if (!used.count(static_cast<int>(fi))) hm.infinity_face = static_cast<int>(fi);
  if (hm.infinity_face < 0 || used.size() + 1 != hm.ys.size())
    throw std::logic_error("exactly one face must remain unlabelled");
  // The unlabelled face is the one at the arc between b_k and b_{k+1}.
  if (hm.fs.arc_face.at(k - 1) != hm.infinity_face)
    throw std::logic_error("unlabelled face is not the source/sink gap face");
  return hm;
}

FaceMonomial f_via_face_weights(const HexModel& hm, int i, int j) {
  FaceMonomial mono;
  for (int p = 1; p <= i; ++p)
    for (int q = j + hm.k; q <= hm.n; ++q) {
      int e = 1 + std::min(i - p, q - j - hm.k);
      mono.exponents[hm.face_label.at({p, q})] += e;
    }
  RationalFunction value = face_monomial_value(mono, hm.ys);
  if (value.equals(hm.f[i][j])) return mono;
  mono.sign = -1;
  if (!face_monomial_value(mono, hm.ys).equals(hm.f[i][j]))
    throw std::logic_error("face-weight product does not match f");
  return mono;
}

namespace {

FaceMonomial monomial_sum(std::initializer_list<std::pair<FaceMonomial, int>> parts) {
  FaceMonomial out;
  for (const auto& [mono, scale] : parts) {
    for (const auto& [f, e] : mono.exponents) {
      out.exponents[f] += scale * e;
      if (out.exponents[f] == 0) out.exponents.erase(f);
    }
  }
  return out;
}

}  // namespace

FaceMonomial tau_star(const HexModel& hm, const GrassmannSeed& gs, int i, int j) {
  if (!gs.is_stable(i, j)) throw std::invalid_argument("tau_star needs a stable direction");
  int dir = gs.dir_index(i, j);
  FaceMonomial out;
  int sign = 1;
  for (int p = 1; p <= gs.k; ++p)
    for (int q = 1; q <= gs.m; ++q) {
      if (gs.is_stable(p, q)) continue;
      int b = gs.seed.btilde[gs.dir_index(p, q)][dir];
      if (b == 0) continue;
      FaceMonomial fm = f_via_face_weights(hm, p, q);
      out = monomial_sum({{out, 1}, {fm, -b}});
      if (fm.sign < 0 && (b % 2) != 0) sign = -sign;
    }
  out.sign = sign;
  return out;
}

// ---------------------------------------------------------------------------
// Instance checks

Report check_face_products(int k, int m) {
  Report rep;
  HexModel hm = build_hex_model(k, m);
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= m; ++j) {
      // Equality with the closed product is also the uniqueness statement of
      // the nonintersecting path family: the minor is a single signed
      // monomial in the edge weights.
      bool ok = true;
      std::string detail;
      try {
        FaceMonomial mono = f_via_face_weights(hm, i, j);
        (void)mono;
      } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
      }
      rep.add("face-product",
              "N(" + std::to_string(k) + "," + std::to_string(m) + ") f(" + std::to_string(i) +
                  "," + std::to_string(j) + ") " + detail,
              ok);
    }
  return rep;
}

Report check_tau_cluster_faces(int k, int m) {
  Report rep;
  HexModel hm = build_hex_model(k, m);
  GrassmannSeed gs = grassmann_initial_seed(k, m);
  for (int i = 1; i <= k - 1; ++i)
    for (int j = 2; j <= m; ++j) {
      int row = gs.dir_index(i, j);
      FaceMonomial tau;
      for (int p = 1; p <= k; ++p)
        for (int q = 1; q <= m; ++q) {
          int b = gs.seed.btilde[row][gs.dir_index(p, q)];
          if (b == 0) continue;
          tau = monomial_sum({{tau, 1}, {f_via_face_weights(hm, p, q), b}});
        }
      int target = hm.face_label.at({i + 1, j + k - 1});
      bool ok = tau.exponents.size() == 1 && tau.exponents.count(target) &&
                tau.exponents.at(target) == 1;
      std::ostringstream inst;
      inst << "N(" << k << "," << m << ") tau(" << i << "," << j << ") vs y(" << i + 1 << ","
           << j + k - 1 << ")";
      rep.add("tau-cluster", inst.str(), ok);
    }
  return rep;
}

Report check_tau_stable_faces(int k, int m) {
  Report rep;
  HexModel hm = build_hex_model(k, m);
  GrassmannSeed gs = grassmann_initial_seed(k, m);

  auto fm = [&](int i, int j) {
    FaceMonomial empty;
    if (i <= 0 || j >= m + 1) return empty;
    return f_via_face_weights(hm, i, j);
  };
  auto expect_ratio = [&](int i, int j) -> FaceMonomial {
    // tau* through the f-ratio identities.
    if (i == k && j == 1) return monomial_sum({{fm(k - 1, 2), -1}});
    if (i == 1 && j == 1) return fm(1, 2);
    if (i == k && j == m) return fm(k - 1, m);
    if (i == k) return monomial_sum({{fm(k - 1, j), 1}, {fm(k - 1, j + 1), -1}});
    return monomial_sum({{fm(i, 2), 1}, {fm(i - 1, 2), -1}});  // i in [2,k-1], j = 1
  };
  auto expect_closed = [&](int i, int j) -> FaceMonomial {
    // The closed per-face exponent tables.
    FaceMonomial out;
    int n = hm.n;
    auto bump = [&](int p, int q, int e) {
      if (e == 0) return;
      out.exponents[hm.face_label.at({p, q})] += e;
      if (out.exponents[hm.face_label.at({p, q})] == 0) out.exponents.erase(hm.face_label.at({p, q}));
    };
    if (i == k && j == 1) {
      for (int p = 1; p <= k; ++p)
        for (int q = k + 1; q <= n; ++q) bump(p, q, -std::min(k - p, q - k - 1));
    } else if (i == 1 && j == 1) {
      for (int q = k + 2; q <= n; ++q) bump(1, q, 1);
    } else if (i == k && j == m) {
      for (int p = 1; p <= k - 1; ++p) bump(p, n, 1);
    } else if (i == k) {
      for (int p = 1; p <= k - 1; ++p)
        for (int q = j + k; q <= std::min(n, j + 2 * k - 1 - p); ++q) bump(p, q, 1);
    } else {
      for (int q = k + 2; q <= n; ++q)
        for (int p = std::max(1, i + k + 2 - q); p <= i; ++p) bump(p, q, 1);
    }
    return out;
  };

  std::vector<std::pair<int, int>> dirs;
  for (int i = 1; i <= k; ++i) dirs.emplace_back(i, 1);
  for (int j = 2; j <= m; ++j) dirs.emplace_back(k, j);
  for (auto [i, j] : dirs) {
    FaceMonomial got = tau_star(hm, gs, i, j);
    FaceMonomial want = expect_ratio(i, j);
    FaceMonomial closed = expect_closed(i, j);
    bool ok = got.exponents == want.exponents && got.exponents == closed.exponents;
    std::ostringstream inst;
    inst << "N(" << k << "," << m << ") tau*(" << i << "," << j << ")";
    rep.add("tau-stable", inst.str(), ok);
  }
  return rep;
}

Report check_compatibility(int k, int m) { return compute_compatibility(k, m).report; }

CompatibilityData compute_compatibility(int k, int m) {
  Report rep;
  HexModel hm = build_hex_model(k, m);
  GrassmannSeed gs = grassmann_initial_seed(k, m);
  int n_cluster = (k - 1) * (m - 1);
  int total = n_cluster + k + m - 1;

  // tau exponent vectors over the faces.
  std::vector<std::map<int, int>> tau_exp(total);
  std::vector<int> kappa = select_kappa(gs.seed.btilde);
  for (int i = 1; i <= k; ++i)
    for (int q = 1; q <= m; ++q) {
      int idx = gs.dir_index(i, q);
      FaceMonomial mono;
      if (!gs.is_stable(i, q)) {
        for (int p = 1; p <= k; ++p)
          for (int r = 1; r <= m; ++r) {
            int b = gs.seed.btilde[idx][gs.dir_index(p, r)];
            if (b != 0) mono = monomial_sum({{mono, 1}, {f_via_face_weights(hm, p, r), b}});
          }
      } else {
        mono = tau_star(hm, gs, i, q);
        int kap = kappa[idx - n_cluster];
        if (kap != 0) mono = monomial_sum({{mono, 1}, {f_via_face_weights(hm, i, q), kap}});
      }
      tau_exp[idx] = mono.exponents;
    }

  // Face bracket coefficients from the directed dual.
  DualNetwork dual = dual_network(hm.net, hm.fs);
  int nf = static_cast<int>(hm.ys.size());
  std::vector<std::vector<RationalFunction>> omega_y(nf, std::vector<RationalFunction>(nf));
  for (const auto& e : dual.edges) {
    omega_y[e.from][e.to] = omega_y[e.from][e.to] + e.weight;
    omega_y[e.to][e.from] = omega_y[e.to][e.from] - e.weight;
  }
  auto tau_bracket = [&](int a, int b) {
    RationalFunction sum;
    for (const auto& [f, ef] : tau_exp[a])
      for (const auto& [g, eg] : tau_exp[b]) {
        if (omega_y[f][g].is_zero()) continue;
        sum = sum + RationalFunction::constant(Rat(ef) * Rat(eg)) * omega_y[f][g];
      }
    return sum;
  };

  // The cluster rows must be an exact multiple of btilde by +-(alpha - beta);
  // the sign depends only on the quiver-arrow dictionary for btilde, which
  // the exchange relations leave free (see the tau display vs the dual
  // lattice). We verify both halves exactly and report the factor relative
  // to the quiver orientation for which it reads alpha - beta.
  RationalFunction factor = RationalFunction::variable(dual.alpha) -
                            RationalFunction::variable(dual.beta);
  bool ok_plus = true, ok_minus = true;
  std::string bad;
  for (int a = 0; a < n_cluster && (ok_plus || ok_minus); ++a)
    for (int b = 0; b < total; ++b) {
      RationalFunction lhs = tau_bracket(a, b);
      RationalFunction want = factor * RationalFunction::constant(gs.seed.btilde[a][b]);
      if (!lhs.equals(want)) ok_plus = false;
      if (!lhs.equals(want.negated())) ok_minus = false;
      if (!ok_plus && !ok_minus) {
        bad = " mismatch at (" + std::to_string(a) + "," + std::to_string(b) + ")";
        break;
      }
    }
  bool ok = ok_plus || ok_minus;
  std::ostringstream inst;
  inst << "N(" << k << "," << m << ") first " << n_cluster
       << " rows = (alpha - beta) * Btilde";
  if (ok && ok_minus) inst << " [quiver arrows oriented along the dual lattice]";
  inst << bad;
  rep.add("cluster-compat", inst.str(), ok);
  // alpha = beta kills every cluster row, as the factor predicts.
  if (ok) {
    bool degenerate_ok = true;
    std::map<int, RationalFunction> equal_params{
        {dual.alpha, RationalFunction::variable(dual.beta)}};
    for (int a = 0; a < n_cluster && degenerate_ok; ++a)
      for (int b = 0; b < total && degenerate_ok; ++b)
        degenerate_ok = tau_bracket(a, b).substitute(equal_params).is_zero();
    rep.add("cluster-compat-degenerate",
            "N(" + std::to_string(k) + "," + std::to_string(m) + ") alpha=beta",
            degenerate_ok);
  }

  // The stable factor f_{kj} commutes with every cluster tau.
  bool commutes = true;
  for (int j = 1; j <= m && commutes; ++j) {
    FaceMonomial fkj = f_via_face_weights(hm, k, j);
    for (int a = 0; a < n_cluster && commutes; ++a) {
      RationalFunction sum;
      for (const auto& [f, ef] : fkj.exponents)
        for (const auto& [g, eg] : tau_exp[a]) {
          if (omega_y[f][g].is_zero()) continue;
          sum = sum + RationalFunction::constant(Rat(ef) * Rat(eg)) * omega_y[f][g];
        }
      commutes = sum.is_zero();
    }
  }
  rep.add("stable-factor-commutes", "N(" + std::to_string(k) + "," + std::to_string(m) + ")",
          commutes);

  CompatibilityData data;
  data.report = std::move(rep);
  data.params = dual.params;
  data.btilde = gs.seed.btilde;
  data.omega_rows.assign(n_cluster, std::vector<RationalFunction>(total));
  for (int a = 0; a < n_cluster; ++a)
    for (int b = 0; b < total; ++b) data.omega_rows[a][b] = tau_bracket(a, b);
  return data;
}

}  // namespace pnet
