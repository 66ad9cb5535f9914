#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pnet/measurement.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>

using namespace pnet;

namespace {

std::string cli_path() {
  const char* p = std::getenv("PNET_CLI");
  REQUIRE(p != nullptr);
  return p;
}

struct RunResult {
  int status;
  std::string out;
};

RunResult run(const std::string& args, const std::string& stdin_file = "") {
  std::string cmd = cli_path() + " " + args;
  if (!stdin_file.empty()) cmd += " < " + stdin_file;
  cmd += " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::string temp_file(const std::string& name, const std::string& content) {
  std::string path = "/tmp/pnet_cli_test_" + name;
  std::ofstream f(path);
  f << content;
  return path;
}

}  // namespace

TEST_CASE("gen output round-trips through the parser") {
  RunResult gen = run("gen fig1");
  CHECK(gen.status == 0);
  Network net = read_network_json(gen.out);
  CHECK(write_network_json(net) == gen.out);
  CHECK(validate(net).empty());
}

TEST_CASE("gen | measure reproduces the library matrix") {
  std::string path = temp_file("fig1.json", run("gen fig1").out);
  RunResult measured = run("measure --net " + path);
  CHECK(measured.status == 0);

  Network net = fig1_network();
  MeasurementMatrix mm = measurement_matrix(net);
  std::string want;
  for (const auto& row : mm.entries) {
    for (size_t c = 0; c < row.size(); ++c) want += (c ? "\t" : "") + to_string(row[c], *net.vars());
    want += "\n";
  }
  CHECK(measured.out == want);
}

TEST_CASE("validate flags a broken file and exits nonzero") {
  std::string good = run("gen g24").out;
  std::string bad = good;
  auto pos = bad.find("\"source\"");
  REQUIRE(pos != std::string::npos);
  bad.replace(pos, 8, "\"sink\"");
  std::string path = temp_file("bad.json", bad);
  RunResult r = run("validate --net " + path);
  CHECK(r.status != 0);
  CHECK(r.out.find("INVALID") != std::string::npos);

  RunResult ok = run("validate --net " + temp_file("good.json", good));
  CHECK(ok.status == 0);
}

TEST_CASE("verify commands pass on the shipped corpus") {
  CHECK(run("verify-psme --gen fig1-formal").status == 0);
  CHECK(run("verify-psme --gen g24 --six-param").status == 0);
  CHECK(run("verify-mcybe --k 3 --trials 10 --samples 3 --jobs 2").status == 0);
  CHECK(run("verify-jacobi --n 3 --m 4").status == 0);
  RunResult compat = run("cluster-compat 2 2");
  CHECK(compat.status == 0);
  CHECK(compat.out.find("PASS") != std::string::npos);
}

TEST_CASE("json report format") {
  RunResult r = run("verify-mcybe --k 2 --trials 5 --samples 2 --json");
  CHECK(r.status == 0);
  CHECK(r.out.find("\"check-id\"") != std::string::npos);
  CHECK(r.out.find("\"status\": \"PASS\"") != std::string::npos);
}

TEST_CASE("concat multiplies transfer matrices") {
  std::string lower = temp_file("lower.json", run("gen lower --n 2 --i 2").out);
  std::string upper = temp_file("upper.json", run("gen upper --n 2 --i 2").out);
  RunResult joined = run("concat " + lower + " " + upper);
  CHECK(joined.status == 0);
  Network net = read_network_json(joined.out);
  CHECK(validate(net).empty());
  RFMat a = a_matrix(net);
  const auto& vars = *net.vars();
  CHECK(a[0][0].is_one());
  CHECK(a[0][1].equals(parse_expr("u", vars)));
  CHECK(a[1][0].equals(parse_expr("l", vars)));
  CHECK(a[1][1].equals(parse_expr("1+l*u", vars)));
}

TEST_CASE("faces and grassmannian subcommands run") {
  std::string path = temp_file("g24.json", run("gen g24").out);
  RunResult faces = run("faces --net " + path);
  CHECK(faces.status == 0);
  CHECK(faces.out.find("bounded") != std::string::npos);
  RunResult gr = run("grassmannian --net " + path);
  CHECK(gr.status == 0);
  RunResult pl = run("plucker --net " + path);
  CHECK(pl.status == 0);
  CHECK(pl.out.find("x_13\t1\n") != std::string::npos);
  RunResult hex = run("gen hex --k 2 --m 3");
  CHECK(hex.status == 0);
}
