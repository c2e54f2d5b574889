#include "btsp/record.hpp"

#include <cstdio>
#include <utility>
#include <vector>

namespace btsp {
namespace {

// key, value; rationals contribute two entries.
std::vector<std::pair<std::string, std::string>> fields(const RunRecord& r) {
  std::vector<std::pair<std::string, std::string>> out;
  auto rational = [&](const std::string& key, const std::optional<Rational>& v) {
    out.emplace_back(key, v ? to_fraction(*v) : "-");
    out.emplace_back(key + "_dec", v ? to_decimal(*v) : "-");
  };
  std::string name = r.name.empty() ? "-" : r.name;
  for (char& c : name) {
    if (c == ' ' || c == '\t' || c == ',' || c == '=') c = '_';
  }
  out.emplace_back("name", name);
  out.emplace_back("n", std::to_string(r.n));
  rational("beta", r.beta);
  rational("backbone", r.backbone_weight);
  rational("tour", r.tour_weight);
  rational("opt", r.opt);
  rational("ratio", r.ratio);
  rational("bound", r.bound);
  rational("tour_bound", r.opt ? std::optional<Rational>(Rational(r.bound * *r.opt)) : std::nullopt);
  std::string wall = "-";
  if (r.wall_seconds) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *r.wall_seconds);
    wall = buf;
  }
  out.emplace_back("wall_s", wall);
  out.emplace_back("seed", r.seed ? std::to_string(*r.seed) : "-");
  return out;
}

}  // namespace

RunRecord RunRecord::from_certificate(const std::string& name, const TourCertificate& cert) {
  RunRecord r;
  r.name = name;
  r.n = cert.vertex_count;
  r.beta = cert.beta;
  r.backbone_weight = cert.backbone_weight;
  r.tour_weight = cert.tour_weight;
  r.bound = cert.ratio_bound();
  if (cert.opt) r.set_opt(*cert.opt);
  return r;
}

void RunRecord::set_opt(const Rational& value) {
  opt = value;
  if (value == 0) {
    ratio = Rational(1);
  } else {
    ratio = Rational(tour_weight / value);
  }
}

std::string RunRecord::line() const {
  std::string out = "record";
  for (const auto& [k, v] : fields(*this)) out += " " + k + "=" + v;
  return out;
}

std::string RunRecord::csv_header() {
  std::string out;
  for (const auto& [k, v] : fields(RunRecord{})) out += (out.empty() ? "" : ",") + k;
  return out;
}

std::string RunRecord::csv_row() const {
  std::string out;
  bool first = true;
  for (const auto& [k, v] : fields(*this)) {
    out += (first ? "" : ",") + v;
    first = false;
  }
  return out;
}

}  // namespace btsp
