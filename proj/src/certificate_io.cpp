#include "btsp/certificate_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "btsp/error.hpp"

namespace btsp {
namespace {

std::string ids_text(const std::vector<int>& ids) {
  std::string out;
  for (int id : ids) out += " " + std::to_string(id);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::string write_certificate(const Instance& inst, const TourCertificate& cert) {
  std::ostringstream out;
  const auto& fam = cert.families;
  out << "BTSP-CERT 1\n";
  out << "INSTANCE\n" << write_native(inst) << "END-INSTANCE\n";
  out << "VERTICES " << cert.vertex_count << "\n";
  out << "BETA " << to_fraction(cert.beta) << "\n";
  out << "ORDER" << ids_text(cert.order) << "\n";
  for (const auto& e : cert.tour_edges) out << "TOUR-EDGE " << e.id << " " << e.ends.u << " " << e.ends.v << "\n";
  for (const auto& e : cert.backbone_edges) out << "BACKBONE-EDGE " << e.id << " " << e.ends.u << " " << e.ends.v << "\n";
  for (const auto& [id, ends] : fam.cactus_arcs) {
    out << "CACTUS-ARC " << id << " " << ends.u << " " << ends.v;
    auto it = fam.arc_class.find(id);
    if (it != fam.arc_class.end()) out << ids_text(it->second);
    out << "\n";
  }
  for (const auto& [id, cls] : fam.tour_class) out << "TOUR-CLASS " << id << ids_text(cls) << "\n";
  for (const auto& [id, cls] : fam.path_class) out << "PATH-CLASS " << id << ids_text(cls) << "\n";
  for (const auto& d : fam.decisions) {
    out << "DECISION " << d.block << " " << d.exit_point << " " << d.cheap << " " << d.expensive << "\n";
  }
  out << "LIGHT" << ids_text(cert.light_edges) << "\n";
  out << "HEAVY" << ids_text(cert.heavy_edges) << "\n";
  out << "CHEAP-SIDE" << ids_text(cert.cheap_side) << "\n";
  out << "EXPENSIVE-SIDE" << ids_text(cert.expensive_side) << "\n";
  out << "WEIGHT TOUR " << to_fraction(cert.tour_weight) << "\n";
  out << "WEIGHT BACKBONE " << to_fraction(cert.backbone_weight) << "\n";
  out << "WEIGHT LIGHT " << to_fraction(cert.light_weight) << "\n";
  out << "WEIGHT HEAVY " << to_fraction(cert.heavy_weight) << "\n";
  out << "WEIGHT CHEAP-SIDE " << to_fraction(cert.cheap_side_weight) << "\n";
  out << "WEIGHT EXPENSIVE-SIDE " << to_fraction(cert.expensive_side_weight) << "\n";
  if (cert.opt) out << "OPT " << to_fraction(*cert.opt) << "\n";
  out << "END\n";
  return out.str();
}

CertificateFile parse_certificate(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::string all(text);
    std::istringstream in(all);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  std::size_t li = 0;
  auto fail = [&](const std::string& what) -> ParseError { return ParseError(what, static_cast<int>(li) + 1, 1); };
  auto skip_blank = [&] {
    while (li < lines.size() && split(lines[li]).empty()) ++li;
  };
  skip_blank();
  if (li >= lines.size() || split(lines[li]) != std::vector<std::string>{"BTSP-CERT", "1"}) {
    throw fail("expected 'BTSP-CERT 1'");
  }
  ++li;
  skip_blank();
  if (li >= lines.size() || split(lines[li]) != std::vector<std::string>{"INSTANCE"}) throw fail("expected INSTANCE");
  const std::size_t first = ++li;
  std::string body;
  while (li < lines.size() && split(lines[li]) != std::vector<std::string>{"END-INSTANCE"}) body += lines[li++] + "\n";
  if (li >= lines.size()) throw fail("missing END-INSTANCE");
  std::optional<Instance> inst;
  try {
    inst = parse_instance(body, Format::kNative);
  } catch (const ParseError& e) {
    std::string msg = e.what();
    msg = msg.substr(msg.find(": ") + 2);
    throw ParseError("embedded instance: " + msg, e.line() + static_cast<int>(first), e.column());
  } catch (const DomainError& e) {
    throw ParseError(std::string("embedded instance: ") + e.what(), static_cast<int>(first) + 1, 1);
  }
  ++li;

  TourCertificate cert;
  auto& fam = cert.families;
  bool ended = false;
  auto as_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw fail("expected an integer, got '" + s + "'");
    }
  };
  auto as_rational = [&](const std::string& s) {
    try {
      return parse_rational(s);
    } catch (const std::exception&) {
      throw fail("expected a rational, got '" + s + "'");
    }
  };
  auto ints_from = [&](const std::vector<std::string>& toks, std::size_t from) {
    std::vector<int> out;
    for (std::size_t i = from; i < toks.size(); ++i) out.push_back(as_int(toks[i]));
    return out;
  };
  auto need = [&](const std::vector<std::string>& toks, std::size_t lo, std::size_t hi) {
    if (toks.size() < lo || toks.size() > hi) throw fail("wrong number of fields for " + toks[0]);
  };
  bool have_vertices = false, have_beta = false;
  for (; li < lines.size(); ++li) {
    auto toks = split(lines[li]);
    if (toks.empty()) continue;
    if (ended) throw fail("content after END");
    const std::string& key = toks[0];
    if (key == "VERTICES") {
      need(toks, 2, 2);
      cert.vertex_count = as_int(toks[1]);
      have_vertices = true;
    } else if (key == "BETA") {
      need(toks, 2, 2);
      cert.beta = as_rational(toks[1]);
      have_beta = true;
    } else if (key == "ORDER") {
      cert.order = ints_from(toks, 1);
    } else if (key == "TOUR-EDGE" || key == "BACKBONE-EDGE") {
      need(toks, 4, 4);
      auto v = ints_from(toks, 1);
      TourEdge e{v[0], {v[1], v[2]}};
      (key == "TOUR-EDGE" ? cert.tour_edges : cert.backbone_edges).push_back(e);
    } else if (key == "CACTUS-ARC") {
      need(toks, 5, 6);
      auto v = ints_from(toks, 1);
      if (fam.cactus_arcs.count(v[0])) throw fail("arc " + toks[1] + " listed twice");
      fam.cactus_arcs[v[0]] = {v[1], v[2]};
      fam.arc_class[v[0]] = std::vector<int>(v.begin() + 3, v.end());
    } else if (key == "TOUR-CLASS" || key == "PATH-CLASS") {
      need(toks, 2, key == "TOUR-CLASS" ? 4 : 6);
      auto v = ints_from(toks, 1);
      auto& table = key == "TOUR-CLASS" ? fam.tour_class : fam.path_class;
      if (table.count(v[0])) throw fail("class " + toks[1] + " listed twice");
      table[v[0]] = std::vector<int>(v.begin() + 1, v.end());
    } else if (key == "DECISION") {
      need(toks, 5, 5);
      auto v = ints_from(toks, 1);
      fam.decisions.push_back({v[0], v[1], v[2], v[3]});
      fam.cheap.push_back(v[2]);
      fam.expensive.push_back(v[3]);
    } else if (key == "LIGHT") {
      cert.light_edges = ints_from(toks, 1);
    } else if (key == "HEAVY") {
      cert.heavy_edges = ints_from(toks, 1);
    } else if (key == "CHEAP-SIDE") {
      cert.cheap_side = ints_from(toks, 1);
    } else if (key == "EXPENSIVE-SIDE") {
      cert.expensive_side = ints_from(toks, 1);
    } else if (key == "WEIGHT") {
      need(toks, 3, 3);
      Rational w = as_rational(toks[2]);
      const std::string& which = toks[1];
      if (which == "TOUR") cert.tour_weight = w;
      else if (which == "BACKBONE") cert.backbone_weight = w;
      else if (which == "LIGHT") cert.light_weight = w;
      else if (which == "HEAVY") cert.heavy_weight = w;
      else if (which == "CHEAP-SIDE") cert.cheap_side_weight = w;
      else if (which == "EXPENSIVE-SIDE") cert.expensive_side_weight = w;
      else throw fail("unknown weight '" + which + "'");
    } else if (key == "OPT") {
      need(toks, 2, 2);
      cert.opt = as_rational(toks[1]);
    } else if (key == "END") {
      need(toks, 1, 1);
      ended = true;
    } else {
      throw fail("unknown key '" + key + "'");
    }
  }
  if (!ended) throw fail("missing END");
  if (!have_vertices) throw fail("missing VERTICES");
  if (!have_beta) throw fail("missing BETA");
  std::sort(fam.cheap.begin(), fam.cheap.end());
  std::sort(fam.expensive.begin(), fam.expensive.end());
  return {std::move(*inst), std::move(cert)};
}

void save_certificate(const Instance& inst, const TourCertificate& cert, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << write_certificate(inst, cert);
}

CertificateFile load_certificate(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_certificate(buf.str());
}

std::string write_tour(const std::vector<Vertex>& order) {
  std::string out;
  for (Vertex v : order) out += std::to_string(v) + "\n";
  return out;
}

}  // namespace btsp
