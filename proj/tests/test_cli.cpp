#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "btsp/certificate_io.hpp"
#include "btsp/rational.hpp"
#include "cli.hpp"
#include "fixtures.hpp"

using namespace btsp;
using namespace btsp::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run_command(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("btsp-cli-test-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string file(const std::string& name) { return (scratch_dir() / name).string(); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string field(const std::string& line, const std::string& key) {
  auto at = line.find(" " + key + "=");
  if (at == std::string::npos) return {};
  at += key.size() + 2;
  return line.substr(at, line.find_first_of(" \n", at) - at);
}

std::string record_line(const std::string& out) {
  auto at = out.find("record ");
  REQUIRE(at != std::string::npos);
  return out.substr(at, out.find('\n', at) - at);
}

}  // namespace

TEST_CASE("gen writes the requested instance") {
  const std::string path = file("a.btsp");
  Result r = run({"gen", "--kind", "uniform-beta", "--n", "10", "--beta", "2", "--seed", "7", "--out", path});
  CHECK(r.code == 0);
  Instance inst = load_instance(path);
  CHECK(inst.size() == 10);
  CHECK(inst.declared_beta() == Rational(2));

  Result e = run({"gen", "--kind", "euclidean-power", "--n", "8", "--p", "2", "--seed", "1", "--out", file("e.btsp")});
  CHECK(e.code == 0);
  CHECK(load_instance(file("e.btsp")).size() == 8);
}

TEST_CASE("usage errors exit 2 and name the flag") {
  auto check_usage = [](std::vector<std::string> args, const std::string& flag) {
    Result r = run(args);
    CHECK(r.code == 2);
    CHECK_MESSAGE(r.err.find(flag) != std::string::npos, r.err);
  };
  check_usage({"gen", "--kind", "uniform-beta", "--n", "10", "--beta", "2"}, "--out");
  check_usage({"gen", "--kind", "uniform-beta", "--n", "10", "--beta", "two", "--out", file("x.btsp")}, "--beta");
  check_usage({"gen", "--kind", "uniform-beta", "--n", "10", "--beta", "1/2", "--out", file("x.btsp")}, "--beta");
  check_usage({"gen", "--kind", "uniform-beta", "--n", "10", "--p", "2", "--out", file("x.btsp")}, "--p");
  check_usage({"gen", "--kind", "spiral", "--n", "10", "--beta", "2", "--out", file("x.btsp")}, "--kind");
  check_usage({"gen", "--kind", "euclidean-power", "--n", "10", "--p", "3/2", "--out", file("x.btsp")}, "--p");
  check_usage({"solve", file("a.btsp"), "--bogus"}, "--bogus");
  check_usage({"bench", "--sizes", "5", "--seeds", "1"}, "--betas");
  check_usage({"bench", "--sizes", "21", "--betas", "2", "--seeds", "1", "--check-exact"}, "--check-exact");
  check_usage({"onetree", file("a.btsp"), "--bounds", "2,2"}, "--bounds");
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"solve", file("missing.btsp")}).code == 2);
}

TEST_CASE("solve on distinct K4 reports opt and bound") {
  save_instance(k4_distinct(), file("c.btsp"));
  Result r = run({"solve", file("c.btsp"), "--certify", "--check-exact"});
  REQUIRE(r.code == 0);
  const std::string rec = record_line(r.out);
  CHECK(field(rec, "opt") == "10/1");
  CHECK(field(rec, "beta") == "5/3");
  CHECK(field(rec, "bound") == "10/3");
  CHECK(field(rec, "tour_bound") == "100/3");
  CHECK(parse_rational(field(rec, "ratio")) <= Rational(10, 3));
  CHECK(r.out.find("\ncertificate decisions=") != std::string::npos);
  CHECK(r.out.find("\nverified ok\n") != std::string::npos);
}

TEST_CASE("solve size guards") {
  save_instance(gen_uniform_beta(61, Rational(2), 1), file("big.btsp"));
  Result big = run({"solve", file("big.btsp")});
  CHECK(big.code == 2);
  CHECK(big.err.find("--unsafe-large") != std::string::npos);

  save_instance(gen_uniform_beta(21, Rational(2), 1), file("mid.btsp"));
  Result mid = run({"solve", file("mid.btsp"), "--check-exact"});
  CHECK(mid.code == 2);
  CHECK(mid.err.find("--check-exact") != std::string::npos);
  Result exact = run({"exact", file("mid.btsp")});
  CHECK(exact.code == 2);
  CHECK(exact.err.find("capacity") != std::string::npos);

  // A positive edge spanned by a zero-weight two-hop path: beta is infinite.
  save_instance(lower("flat", {{0}, {1, 0}, {1, 1, 1}}), file("flat.btsp"));
  Result flat = run({"solve", file("flat.btsp")});
  CHECK(flat.code == 2);
  CHECK(flat.err.find("infinite beta") != std::string::npos);
}

TEST_CASE("verify accepts stored certificates and rejects tampered ones") {
  const std::string inst = file("v.btsp");
  REQUIRE(run({"gen", "--kind", "uniform-beta", "--n", "9", "--beta", "3", "--seed", "4", "--out", inst}).code == 0);
  const std::string cert = file("v.cert"), tour = file("v.tour");
  REQUIRE(run({"solve", inst, "--check-exact", "--out-cert", cert, "--out-tour", tour}).code == 0);
  const std::string tour_text = slurp(tour);
  CHECK(std::count(tour_text.begin(), tour_text.end(), '\n') == 9);

  Result ok = run({"verify", cert, "--instance", inst});
  CHECK(ok.code == 0);
  CHECK(ok.out.rfind("verified ok", 0) == 0);

  std::string text = slurp(cert);
  auto at = text.find("\nPATH-CLASS ");
  REQUIRE(at != std::string::npos);
  std::string tampered = text.substr(0, at) + text.substr(text.find('\n', at + 1));
  std::ofstream(file("t.cert"), std::ios::binary) << tampered;
  Result bad = run({"verify", file("t.cert")});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("violation check=path-partition") != std::string::npos);

  std::ofstream(file("g.cert"), std::ios::binary) << text << "extra\n";
  Result garbage = run({"verify", file("g.cert")});
  CHECK(garbage.code == 1);
  CHECK(garbage.out.find("violation check=parse") != std::string::npos);

  save_instance(k4_distinct(), file("other.btsp"));
  Result other = run({"verify", cert, "--instance", file("other.btsp")});
  CHECK(other.code == 1);
  CHECK(other.out.find("violation check=instance-match") != std::string::npos);
}

TEST_CASE("solve is deterministic") {
  const std::string inst = file("d.btsp");
  REQUIRE(run({"gen", "--kind", "euclidean-power", "--n", "11", "--p", "2", "--seed", "3", "--out", inst}).code == 0);
  Result a = run({"solve", inst, "--trace", "--certify", "--out-cert", file("d1.cert")});
  Result b = run({"solve", inst, "--trace", "--certify", "--out-cert", file("d2.cert")});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(slurp(file("d1.cert")) == slurp(file("d2.cert")));
  CHECK(a.out.find("trace euler ") != std::string::npos);
}

TEST_CASE("bench output does not depend on the thread count") {
  const std::vector<std::string> base = {"bench", "--sizes", "6,9", "--betas", "1,3/2", "--seeds", "1,2,3", "--check-exact"};
  auto with = [&](const std::string& threads, const std::string& csv) {
    auto args = base;
    args.insert(args.end(), {"--threads", threads, "--csv", csv});
    return run(args);
  };
  ::unsetenv("BTSP_THREADS");
  Result one = with("1", file("b1.csv"));
  Result four = with("4", file("b4.csv"));
  ::setenv("BTSP_THREADS", "2", 1);
  Result capped = with("8", file("b8.csv"));
  ::unsetenv("BTSP_THREADS");
  REQUIRE(one.code == 0);
  CHECK(one.out == four.out);
  CHECK(one.out == capped.out);
  const std::string csv = slurp(file("b1.csv"));
  CHECK(csv == slurp(file("b4.csv")));
  CHECK(csv == slurp(file("b8.csv")));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 2 * 3);
  CHECK(one.out.find("bench runs=12 verified=all") != std::string::npos);
  CHECK(field(record_line(one.out), "seed") == "1");
}

TEST_CASE("inspection subcommands") {
  save_instance(k4_distinct(), file("c.btsp"));
  Result info = run({"info", file("c.btsp")});
  CHECK(info.code == 0);
  CHECK(info.out == "info name=k4-distinct n=4 beta=5/3 beta_dec=1.666667 declared_beta=- min=1/1 max=6/1 mean=7/2 "
                    "mean_dec=3.500000 nonnegative=yes\n");
  Result exact = run({"exact", file("c.btsp")});
  CHECK(exact.out == "exact name=k4-distinct n=4 opt=10/1 opt_dec=10.000000 order=0,1,2,3\n");
  Result backbone = run({"backbone", file("c.btsp"), "--check-exact", "--dump-matching"});
  CHECK(backbone.code == 0);
  CHECK(backbone.out.find("backbone name=k4-distinct n=4 ") != std::string::npos);
  CHECK(parse_rational(field(backbone.out.substr(backbone.out.find("backbone ")), "ratio")) <= Rational(3, 2));
  Result tree = run({"onetree", file("c.btsp"), "--dump"});
  CHECK(tree.code == 0);
  CHECK(std::count(tree.out.begin(), tree.out.end(), '\n') == 5);
  CHECK(field(tree.out.substr(tree.out.find("onetree ")), "max_excess") == "0");
  Result help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("bench") != std::string::npos);
}
