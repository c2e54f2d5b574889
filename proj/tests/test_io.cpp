#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "btsp/certificate_io.hpp"
#include "btsp/error.hpp"
#include "btsp/oracles.hpp"
#include "btsp/record.hpp"
#include "fixtures.hpp"

using namespace btsp;
using namespace btsp::testing;

namespace {

int parse_error_line(const std::string& text) {
  try {
    parse_certificate(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

std::string replace_line(const std::string& text, const std::string& prefix, const std::string& with) {
  auto at = text.find("\n" + prefix);
  REQUIRE(at != std::string::npos);
  auto end = text.find('\n', at + 1);
  return text.substr(0, at + 1) + with + text.substr(end);
}

int line_of(const std::string& text, const std::string& prefix) {
  auto at = text.find("\n" + prefix);
  REQUIRE(at != std::string::npos);
  return 2 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(at), '\n'));
}

}  // namespace

TEST_CASE("certificates survive a write and parse round trip") {
  int index = 0;
  for (const Instance& inst : small_corpus(40, 10, 31)) {
    TourCertificate cert = approximate_tour(inst);
    if (index++ % 2 == 0) cert.opt = exact_tsp(inst).weight;
    const std::string text = write_certificate(inst, cert);
    CertificateFile back = parse_certificate(text);
    CHECK(back.instance == inst);
    CHECK(write_certificate(back.instance, back.certificate) == text);
    CHECK(back.certificate.families.cheap == cert.families.cheap);
    CHECK(back.certificate.families.expensive == cert.families.expensive);
    CHECK(verify_certificate(back.instance, back.certificate).ok());
  }
}

TEST_CASE("certificate parse errors carry the line") {
  const Instance inst = k4_distinct();
  const std::string text = write_certificate(inst, approximate_tour(inst));
  CHECK(parse_error_line("") == 1);
  CHECK(parse_error_line("BTSP-CERT 2\n") == 1);
  CHECK(parse_error_line(text.substr(0, text.size() - 4)) > 0);
  CHECK(parse_error_line(text + "ORDER 0\n") == line_of(text + "ORDER 0\n", "ORDER 0\n") + 0);
  const int order_line = line_of(text, "ORDER");
  CHECK(parse_error_line(replace_line(text, "ORDER", "ORDER 0 x 2 3")) == order_line);
  CHECK(parse_error_line(replace_line(text, "BETA 5", "BETA five")) == line_of(text, "BETA 5"));
  CHECK(parse_error_line(replace_line(text, "VERTICES", "VERTEX 4")) == line_of(text, "VERTICES"));
  CHECK(parse_error_line(replace_line(text, "TOUR-EDGE 0", "TOUR-EDGE 0 1")) == line_of(text, "TOUR-EDGE 0"));
  const int first_row = line_of(text, "N 4") + 1;
  CHECK(parse_error_line(replace_line(text, "1/1\n", "q")) == first_row);
}

TEST_CASE("tour files list one vertex per line") {
  CHECK(write_tour({0, 2, 1, 3}) == "0\n2\n1\n3\n");
  CHECK(write_tour({}).empty());
}

TEST_CASE("run records render stable keys") {
  const Instance inst = k4_distinct();
  TourCertificate cert = approximate_tour(inst);
  cert.opt = exact_tsp(inst).weight;
  RunRecord r = RunRecord::from_certificate(inst.name(), cert);
  CHECK(r.beta == Rational(5, 3));
  CHECK(r.bound == Rational(10, 3));
  REQUIRE(r.ratio);
  CHECK(*r.ratio <= Rational(10, 3));
  const std::string line = r.line();
  CHECK(line.rfind("record name=k4-distinct n=4 beta=5/3 beta_dec=1.666667 ", 0) == 0);
  CHECK(line.find(" opt=10/1 opt_dec=10.000000 ") != std::string::npos);
  CHECK(line.find(" bound=10/3 bound_dec=3.333333 ") != std::string::npos);
  CHECK(line.find(" tour_bound=100/3 tour_bound_dec=33.333333 ") != std::string::npos);
  CHECK(line.find(" wall_s=- seed=-") != std::string::npos);
  CHECK(RunRecord::csv_header() ==
        "name,n,beta,beta_dec,backbone,backbone_dec,tour,tour_dec,opt,opt_dec,ratio,ratio_dec,bound,bound_dec,"
        "tour_bound,tour_bound_dec,wall_s,seed");
  const std::string row = r.csv_row();
  CHECK(std::count(row.begin(), row.end(), ',') == 17);

  RunRecord bare = RunRecord::from_certificate("with space", approximate_tour(inst));
  bare.seed = 9;
  CHECK(bare.line().find("name=with_space ") != std::string::npos);
  CHECK(bare.line().find(" opt=- opt_dec=- ratio=- ratio_dec=- ") != std::string::npos);
  CHECK(bare.line().find(" seed=9") != std::string::npos);
}
