// Command-line surface for the planar-network engine: generators, boundary
// measurements, Grassmannian data, faces and duals, and the identity checkers.

#include <CLI11.hpp>

#include "pnet/cluster.hpp"
#include "pnet/measurement.hpp"
#include "pnet/poisson.hpp"

#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

using namespace pnet;

namespace {

std::string read_stream(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Network load_network(const std::string& path) {
  if (path.empty() || path == "-") return read_network_json(read_stream(std::cin));
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return read_network_json(read_stream(f));
}

Network generate(const std::string& name, int n, int i, int k, int m, unsigned long seed,
                 int internal) {
  if (name == "fig1") return fig1_network();
  if (name == "fig1-formal") return fig1_formal();
  if (name == "g24") return g24_network();
  if (name == "diag") {
    auto vars = std::make_shared<VariableTable>();
    std::vector<RationalFunction> d;
    for (int t = 1; t <= n; ++t)
      d.push_back(RationalFunction::variable(vars->add("d" + std::to_string(t))));
    return diag_network(d, vars);
  }
  if (name == "lower") {
    auto vars = std::make_shared<VariableTable>();
    return elementary_lower(n, i, RationalFunction::variable(vars->add("l")), vars);
  }
  if (name == "upper") {
    auto vars = std::make_shared<VariableTable>();
    return elementary_upper(n, i, RationalFunction::variable(vars->add("u")), vars);
  }
  if (name == "generic") return generic_network(n, std::make_shared<VariableTable>());
  if (name == "hex") return build_hex_network(k, m);
  if (name == "random") return random_network(seed, internal);
  throw CLI::ValidationError("unknown generator '" + name + "'");
}

void print_matrix(const RFMat& mat, const VariableTable& vars) {
  for (const auto& row : mat) {
    for (size_t c = 0; c < row.size(); ++c)
      std::cout << (c ? "\t" : "") << to_string(row[c], vars);
    std::cout << "\n";
  }
}

int emit_report(const Report& rep, bool json) {
  std::cout << (json ? rep.to_json() : rep.to_text());
  if (!json) {
    std::cout << (rep.all_passed() ? "PASS" : "FAIL") << " (" << rep.checks.size() - rep.failures()
              << "/" << rep.checks.size() << " checks)\n";
  }
  return rep.all_passed() ? 0 : 1;
}

// Runs independent report jobs, optionally in parallel, and emits them in a
// deterministic order (sorted by check id, then instance).
int emit_jobs(std::vector<std::function<Report()>> jobs, int threads, bool json) {
  Report merged;
  if (threads > 1) {
    std::vector<std::future<Report>> futures;
    for (auto& job : jobs) futures.push_back(std::async(std::launch::async, job));
    for (auto& f : futures) merged.merge(f.get());
  } else {
    for (auto& job : jobs) merged.merge(job());
  }
  std::stable_sort(merged.checks.begin(), merged.checks.end(),
                   [](const CheckResult& a, const CheckResult& b) {
                     return std::tie(a.check_id, a.instance) < std::tie(b.check_id, b.instance);
                   });
  return emit_report(merged, json);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact computations on perfect planar directed networks in a disk"};
  app.require_subcommand(1);

  std::string net_path, gen_name;
  int opt_n = 3, opt_i = 2, opt_k = 3, opt_m = 4;
  unsigned long seed = 1;
  int internal = 4, trials = 100, samples = 5, jobs = 1;
  int p = 0, q = 0, r = 0, s = 0;
  bool json = false, six_param = false;

  auto add_net_option = [&](CLI::App* cmd) {
    cmd->add_option("--net", net_path, "network JSON file ('-' or absent: stdin)");
  };

  auto* gen = app.add_subcommand("gen", "emit a generated network as JSON");
  gen->add_option("name", gen_name,
                  "fig1 | fig1-formal | g24 | diag | lower | upper | generic | hex | random")
      ->required();
  gen->add_option("--n", opt_n, "lines for diag/lower/upper/generic");
  gen->add_option("--i", opt_i, "elementary index");
  gen->add_option("--k", opt_k, "sources for hex");
  gen->add_option("--m", opt_m, "sinks for hex");
  gen->add_option("--seed", seed, "random generator seed");
  gen->add_option("--internal", internal, "target internal vertices for random");

  auto* validate_cmd = app.add_subcommand("validate", "check the network invariants");
  add_net_option(validate_cmd);

  auto* measure = app.add_subcommand("measure", "boundary measurement matrix");
  add_net_option(measure);

  auto* grassmannian = app.add_subcommand("grassmannian", "extended k x n matrix");
  add_net_option(grassmannian);

  auto* plucker_cmd = app.add_subcommand("plucker", "all maximal minors of the extended matrix");
  add_net_option(plucker_cmd);

  auto* faces_cmd = app.add_subcommand("faces", "face census and face weights");
  add_net_option(faces_cmd);

  auto* dual_cmd = app.add_subcommand("dual", "directed dual network");
  add_net_option(dual_cmd);

  auto* bracket_cmd = app.add_subcommand("bracket", "bracket of two measurement entries");
  add_net_option(bracket_cmd);
  bracket_cmd->add_option("--p", p, "first entry row (1-based)")->required();
  bracket_cmd->add_option("--q", q, "first entry column")->required();
  bracket_cmd->add_option("--r", r, "second entry row")->required();
  bracket_cmd->add_option("--s", s, "second entry column")->required();

  std::string alpha_value, beta_value;
  auto* psme = app.add_subcommand("verify-psme", "pushforward bracket identity");
  psme->add_option("--net", net_path, "network JSON file");
  psme->add_option("--gen", gen_name, "named generator instead of --net");
  psme->add_option("--alpha", alpha_value, "specialize alpha to a rational (default symbolic)");
  psme->add_option("--beta", beta_value, "specialize beta to a rational");
  psme->add_flag("--six-param", six_param, "use the 6-parameter chart");
  psme->add_flag("--json", json, "machine-readable report");
  psme->add_option("--jobs", jobs, "parallel jobs");
  psme->add_option("--seed", seed, "seed for the gauge-invariance check");

  auto* mcybe = app.add_subcommand("verify-mcybe", "modified classical Yang-Baxter equation");
  mcybe->add_option("--k", opt_k, "matrix size bound (2..k)");
  mcybe->add_option("--trials", trials, "random matrix pairs per sample");
  mcybe->add_option("--samples", samples, "number of (alpha, beta) samples");
  mcybe->add_option("--seed", seed, "random seed");
  mcybe->add_flag("--json", json, "machine-readable report");
  mcybe->add_option("--jobs", jobs, "parallel jobs");

  auto* jacobi = app.add_subcommand("verify-jacobi", "Jacobi identity and s-function identities");
  jacobi->add_option("--n", opt_n, "symbolic Jacobi bound (all I in [1,n])");
  jacobi->add_option("--m", opt_m, "exhaustive identity bound");
  jacobi->add_flag("--json", json, "machine-readable report");
  jacobi->add_option("--jobs", jobs, "parallel jobs");

  auto* compat = app.add_subcommand("cluster-compat", "bracket/cluster compatibility on N(k,m)");
  compat->add_option("k", opt_k, "sources")->required();
  compat->add_option("m", opt_m, "sinks")->required();
  compat->add_flag("--json", json, "machine-readable report");

  auto* concat_cmd = app.add_subcommand("concat", "concatenate two square networks");
  std::string path1, path2;
  concat_cmd->add_option("first", path1, "left network JSON")->required();
  concat_cmd->add_option("second", path2, "right network JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      Network net = generate(gen_name, opt_n, opt_i, opt_k, opt_m, seed, internal);
      std::cout << write_network_json(net);
      return 0;
    }
    if (validate_cmd->parsed()) {
      Network net = load_network(net_path);
      auto violations = validate(net);
      for (const auto& v : violations) std::cout << v.rule << "\t" << v.detail << "\n";
      std::cout << (violations.empty() ? "OK" : "INVALID") << "\n";
      return violations.empty() ? 0 : 1;
    }
    if (measure->parsed()) {
      Network net = load_network(net_path);
      print_matrix(measurement_matrix(net).entries, *net.vars());
      return 0;
    }
    if (grassmannian->parsed()) {
      Network net = load_network(net_path);
      print_matrix(extended_matrix(net).entries, *net.vars());
      return 0;
    }
    if (plucker_cmd->parsed()) {
      Network net = load_network(net_path);
      PluckerVector pv = plucker(extended_matrix(net));
      for (const auto& [cols, value] : pv.coords) {
        std::string label = "x_";
        for (int c : cols) label += std::to_string(c);
        std::cout << label << "\t" << to_string(value, *net.vars()) << "\n";
      }
      return 0;
    }
    if (faces_cmd->parsed()) {
      Network net = load_network(net_path);
      FaceSet fs = enumerate_faces(net);
      std::vector<RationalFunction> ys = face_weights(net, fs);
      for (size_t f = 0; f < fs.faces.size(); ++f) {
        std::cout << f << "\t" << (fs.faces[f].bounded ? "bounded" : "unbounded") << "\t";
        for (const auto& [eid, gamma] : fs.faces[f].boundary)
          std::cout << (gamma > 0 ? "+" : "-") << "e" << eid << " ";
        for (int arc : fs.faces[f].arcs) std::cout << "arc" << arc + 1 << " ";
        std::cout << "\t" << to_string(ys[f], *net.vars()) << "\n";
      }
      return 0;
    }
    if (dual_cmd->parsed()) {
      Network net = load_network(net_path);
      FaceSet fs = enumerate_faces(net);
      DualNetwork dual = dual_network(net, fs);
      for (const auto& e : dual.edges)
        std::cout << e.from << " -> " << e.to << "\tvia e" << e.primal_edge << "\t"
                  << to_string(e.weight, *dual.params) << "\n";
      return 0;
    }
    if (bracket_cmd->parsed()) {
      Network net = load_network(net_path);
      FlagAssignment fa = assign_flag_variables(net, true);
      MeasurementMatrix mm = measurement_matrix(fa.net);
      PoissonStructure ps = log_canonical(fa.spec);
      const RationalFunction& f1 = mm.entries.at(p - 1).at(q - 1);
      const RationalFunction& f2 = mm.entries.at(r - 1).at(s - 1);
      std::cout << to_string(ps.bracket(f1, f2), *fa.net.vars()) << "\n";
      return 0;
    }
    if (psme->parsed()) {
      Network net = gen_name.empty() ? load_network(net_path)
                                     : generate(gen_name, opt_n, opt_i, opt_k, opt_m, seed, 4);
      std::string label = gen_name.empty() ? net_path : gen_name;
      std::vector<std::function<Report()>> work;
      if (six_param) {
        work.push_back([&net, label] { return verify_pushforward_6param(net, label); });
      } else if (!alpha_value.empty() || !beta_value.empty()) {
        work.push_back([&net, label, alpha_value, beta_value] {
          return verify_pushforward_at(net, label, alpha_value.empty() ? "1" : alpha_value,
                                       beta_value.empty() ? "-1" : beta_value);
        });
      } else {
        work.push_back([&net, label] { return verify_pushforward(net, label); });
        work.push_back([&net, label, seed] { return verify_gauge_invariance(net, label, seed); });
      }
      return emit_jobs(std::move(work), jobs, json);
    }
    if (mcybe->parsed()) {
      std::vector<std::pair<Rat, Rat>> points{{Rat(1), Rat(-1)},
                                              {Rat(2), Rat(0)},
                                              {Rat(1, 2), Rat(3)},
                                              {Rat(-3, 5), Rat(7, 2)},
                                              {Rat(5), Rat(1, 3)}};
      points.resize(std::min<size_t>(points.size(), samples));
      std::vector<std::function<Report()>> work;
      for (int kk = 2; kk <= opt_k; ++kk)
        for (auto [a, b] : points)
          work.push_back([kk, a, b, trials, seed] { return mcybe_check(kk, a, b, trials, seed + kk); });
      return emit_jobs(std::move(work), jobs, json);
    }
    if (jacobi->parsed()) {
      std::vector<std::function<Report()>> work;
      for (int n = 2; n <= opt_n; ++n) work.push_back([n] { return check_jacobi_ij(n); });
      for (int n = 2; n <= opt_m; ++n) work.push_back([n] { return check_s_identities(n); });
      return emit_jobs(std::move(work), jobs, json);
    }
    if (compat->parsed()) {
      Report rep;
      rep.merge(check_face_products(opt_k, opt_m));
      rep.merge(check_tau_cluster_faces(opt_k, opt_m));
      rep.merge(check_tau_stable_faces(opt_k, opt_m));
      CompatibilityData data = compute_compatibility(opt_k, opt_m);
      rep.merge(data.report);
      if (!json) {
        std::cout << "Btilde (cluster rows):\n";
        for (const auto& row : data.btilde) {
          for (size_t c = 0; c < row.size(); ++c) std::cout << (c ? " " : "") << row[c];
          std::cout << "\n";
        }
        std::cout << "Omega^tau (first rows):\n";
        for (const auto& row : data.omega_rows) {
          for (size_t c = 0; c < row.size(); ++c)
            std::cout << (c ? "\t" : "") << to_string(row[c], *data.params);
          std::cout << "\n";
        }
      }
      return emit_report(rep, json);
    }
    if (concat_cmd->parsed()) {
      Network a = load_network(path1);
      // Both operands must share a variable table; reparse the second over
      // the first network's table.
      std::ifstream f(path2);
      if (!f) throw std::runtime_error("cannot open " + path2);
      Network b_own = read_network_json(read_stream(f));
      // Rebuild b over a's (append-only) table so the weights multiply in a
      // common variable world.
      auto vars = a.vars();
      for (int t = 0; t < b_own.vars()->size(); ++t) vars->add(b_own.vars()->name(t));
      Network b(vars);
      std::map<int, int> vmap;
      for (int v : b_own.boundary_ids()) vmap[v] = b.add_boundary(b_own.role(v), b_own.pos(v));
      for (int v : b_own.internal_ids()) vmap[v] = b.add_internal(b_own.color(v), b_own.pos(v));
      for (const auto& e : b_own.edges()) {
        b.add_edge(vmap[e.from], vmap[e.to], parse_expr(to_string(e.weight, *b_own.vars()), *vars));
      }
      std::cout << write_network_json(concatenate(a, b));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
