#include "btsp/instance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "btsp/error.hpp"
#include "random.hpp"

namespace btsp {

Instance::Instance(std::string name, const std::vector<std::vector<Rational>>& rows,
                   std::optional<Rational> declared_beta)
    : n_(static_cast<int>(rows.size())), name_(std::move(name)), declared_beta_(std::move(declared_beta)) {
  if (n_ < 3) throw DomainError("instance needs at least 3 vertices, got " + std::to_string(n_));
  w_.reserve(static_cast<std::size_t>(n_) * n_);
  for (int u = 0; u < n_; ++u) {
    if (static_cast<int>(rows[u].size()) != n_) {
      throw DomainError("row " + std::to_string(u) + " has " + std::to_string(rows[u].size()) +
                        " entries, expected " + std::to_string(n_));
    }
    for (int v = 0; v < n_; ++v) {
      w_.push_back(rows[u][v]);
      w_.back().canonicalize();
    }
  }
  if (declared_beta_) declared_beta_->canonicalize();
  for (int u = 0; u < n_; ++u) {
    if (weight(u, u) != 0) throw DomainError("nonzero diagonal at vertex " + std::to_string(u));
    for (int v = u + 1; v < n_; ++v) {
      if (weight(u, v) != weight(v, u)) {
        throw DomainError("asymmetric weight between " + std::to_string(u) + " and " + std::to_string(v));
      }
    }
  }
  if (declared_beta_) {
    if (*declared_beta_ < 1) throw DomainError("declared beta must be >= 1");
    Beta actual = beta_of(*this);
    if (actual.is_infinite() || actual.value() > *declared_beta_) {
      throw DomainError("declared beta " + to_fraction(*declared_beta_) + " is below the instance beta " +
                        actual.to_string());
    }
  }
}

bool Instance::nonnegative() const {
  return std::all_of(w_.begin(), w_.end(), [](const Rational& x) { return x >= 0; });
}

Instance Instance::with_name(std::string name) const {
  Instance copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

Instance Instance::with_declared_beta(std::optional<Rational> beta) const {
  Instance copy = *this;
  copy.declared_beta_ = std::nullopt;
  if (beta) {
    if (*beta < 1) throw DomainError("declared beta must be >= 1");
    Beta actual = beta_of(copy);
    if (actual.is_infinite() || actual.value() > *beta) {
      throw DomainError("declared beta " + to_fraction(*beta) + " is below the instance beta " + actual.to_string());
    }
  }
  copy.declared_beta_ = std::move(beta);
  return copy;
}

const Rational& Beta::value() const {
  if (!value_) throw DomainError("beta is infinite");
  return *value_;
}

std::string Beta::to_string() const { return value_ ? to_fraction(*value_) : std::string("inf"); }

Beta beta_of(const Instance& inst) {
  const int n = inst.size();
  if (!inst.nonnegative()) throw DomainError("beta is only defined for nonnegative weights");
  // best = best_num / best_den, starting at the clamp value 1
  Rational best_num = 1;
  Rational best_den = 1;
  Rational den;
  for (int v = 0; v < n; ++v) {
    for (int u = 0; u < n; ++u) {
      if (u == v) continue;
      for (int x = u + 1; x < n; ++x) {
        if (x == v) continue;
        const Rational& num = inst.weight(u, x);
        den = inst.weight(u, v) + inst.weight(v, x);
        if (den == 0) {
          if (num > 0) return Beta::infinite();
          continue;
        }
        if (num * best_den > best_num * den) {
          best_num = num;
          best_den = den;
        }
      }
    }
  }
  return Beta(best_num / best_den);
}

Rational effective_beta(const Instance& inst) {
  Beta b = beta_of(inst);
  if (b.is_infinite()) throw DomainError("instance " + inst.name() + " has infinite beta");
  return b.value();
}

namespace {

std::vector<std::vector<Rational>> zero_matrix(int n) {
  return std::vector<std::vector<Rational>>(n, std::vector<Rational>(n, Rational(0)));
}

std::uint64_t to_u64(const Integer& z, const char* what) {
  if (z < 0 || !z.fits_ulong_p()) throw DomainError(std::string(what) + " out of range");
  return z.get_ui();
}

// Exact square root of a nonnegative rational, if it is a perfect square.
std::optional<Rational> exact_sqrt(const Rational& q) {
  if (q < 0) return std::nullopt;
  const Integer& num = q.get_num();
  const Integer& den = q.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) return std::nullopt;
  Integer a, b;
  mpz_sqrt(a.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(b.get_mpz_t(), den.get_mpz_t());
  return Rational(a, b);
}

Rational power(const Rational& base, int e) {
  Rational r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

Instance gen_uniform_beta(int n, const Rational& beta, std::uint64_t seed) {
  if (n < 3) throw DomainError("gen_uniform_beta: n must be >= 3");
  if (beta < 1) throw DomainError("gen_uniform_beta: beta must be >= 1");
  std::string name = "uniform-beta-n" + std::to_string(n) + "-b" + to_fraction(beta) + "-s" + std::to_string(seed);
  auto rows = zero_matrix(n);
  if (beta == 1) {
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        if (u != v) rows[u][v] = 1;
    return Instance(name, rows, Rational(1));
  }
  // w = 1 + k / (1000 q) with k in [0, 1000 (2p - q)], i.e. w in [1, 2 beta]
  const Integer grid = Integer(1000) * beta.get_den();
  const std::uint64_t top = to_u64(Integer(1000) * (2 * beta.get_num() - beta.get_den()), "gen_uniform_beta: beta");
  std::mt19937_64 rng(seed);
  for (int u = 1; u < n; ++u) {
    for (int v = 0; v < u; ++v) {
      Integer k;
      mpz_set_ui(k.get_mpz_t(), detail::draw_upto(rng, top));
      Rational w = 1 + Rational(k, grid);
      w.canonicalize();
      rows[u][v] = rows[v][u] = w;
    }
  }
  return Instance(name, rows, beta);
}

Instance instance_from_points(std::string name, const std::vector<Point>& points, int p) {
  if (p < 1) throw DomainError("distance exponent must be a positive integer");
  const int n = static_cast<int>(points.size());
  if (n < 3) throw DomainError("instance needs at least 3 vertices, got " + std::to_string(n));
  auto rows = zero_matrix(n);
  for (int u = 1; u < n; ++u) {
    for (int v = 0; v < u; ++v) {
      Rational dx = points[u].x - points[v].x;
      Rational dy = points[u].y - points[v].y;
      Rational sq = dx * dx + dy * dy;
      Rational w;
      if (p % 2 == 0) {
        w = power(sq, p / 2);
      } else {
        auto d = exact_sqrt(sq);
        if (!d) {
          throw DomainError("distance between points " + std::to_string(v) + " and " + std::to_string(u) +
                            " is irrational; odd exponents need rational distances");
        }
        w = power(*d, p);
      }
      rows[u][v] = rows[v][u] = w;
    }
  }
  return Instance(std::move(name), rows);
}

Instance gen_euclidean_power(int n, const Rational& p, std::uint64_t seed) {
  if (n < 3) throw DomainError("gen_euclidean_power: n must be >= 3");
  if (p < 1 || p.get_den() != 1 || !p.get_num().fits_sint_p()) {
    throw DomainError("gen_euclidean_power: exponent " + to_fraction(p) + " is not a positive integer");
  }
  const int exponent = static_cast<int>(p.get_num().get_si());
  std::mt19937_64 rng(seed);
  std::vector<Point> points;
  if (exponent % 2 == 0) {
    constexpr std::uint64_t kGrid = 100;
    if (static_cast<std::uint64_t>(n) > (kGrid + 1) * (kGrid + 1)) throw DomainError("gen_euclidean_power: n too large");
    std::set<std::pair<std::uint64_t, std::uint64_t>> used;
    while (static_cast<int>(points.size()) < n) {
      std::uint64_t a = detail::draw_upto(rng, kGrid);
      std::uint64_t b = detail::draw_upto(rng, kGrid);
      if (!used.insert({a, b}).second) continue;
      points.push_back({Rational(static_cast<unsigned long>(a), kGrid), Rational(static_cast<unsigned long>(b), kGrid)});
    }
  } else {
    // tan(phi/2) = s gives rational cos/sin of phi; the point at angle 2 phi on the
    // circle then has rational chord lengths |sin(phi_i - phi_j)| (radius 1/2).
    constexpr std::uint64_t kGrid = 1000;
    if (static_cast<std::uint64_t>(n) > 2 * kGrid) throw DomainError("gen_euclidean_power: n too large");
    std::set<std::uint64_t> used;
    while (static_cast<int>(points.size()) < n) {
      std::uint64_t k = detail::draw_upto(rng, 2 * kGrid - 1);  // s = (k + 1 - G) / G in (-1, 1]
      if (!used.insert(k).second) continue;
      Rational s(static_cast<long>(k) + 1 - static_cast<long>(kGrid), static_cast<long>(kGrid));
      s.canonicalize();
      Rational c = (1 - s * s) / (1 + s * s);
      Rational sn = 2 * s / (1 + s * s);
      Rational c2 = c * c - sn * sn;
      Rational s2 = 2 * sn * c;
      points.push_back({Rational(1, 2) + c2 / 2, Rational(1, 2) + s2 / 2});
    }
  }
  std::string name = "euclidean-power-n" + std::to_string(n) + "-p" + std::to_string(exponent) + "-s" + std::to_string(seed);
  Instance inst = instance_from_points(name, points, exponent);
  return inst.with_declared_beta(effective_beta(inst));
}

// ---------------------------------------------------------------------------
// Text formats

namespace {

struct Token {
  std::string text;
  int line;
  int column;
};

// Splits into whitespace-separated tokens, dropping '#' comments when asked.
std::vector<std::vector<Token>> tokenize_lines(std::string_view text, bool hash_comments) {
  std::vector<std::vector<Token>> lines;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    if (hash_comments) {
      auto hash = line.find('#');
      if (hash != std::string_view::npos) line = line.substr(0, hash);
    }
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      tokens.push_back({std::string(line.substr(i, j - i)), line_no, static_cast<int>(i) + 1});
      i = j;
    }
    if (!tokens.empty()) lines.push_back(std::move(tokens));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

Rational rational_token(const Token& t) {
  try {
    return parse_rational(t.text);
  } catch (const std::invalid_argument&) {
    throw ParseError("expected a rational, got '" + t.text + "'", t.line, t.column);
  }
}

int int_token(const Token& t) {
  Rational r = rational_token(t);
  if (r.get_den() != 1 || !r.get_num().fits_sint_p()) throw ParseError("expected an integer, got '" + t.text + "'", t.line, t.column);
  return static_cast<int>(r.get_num().get_si());
}

Instance parse_native(std::string_view text) {
  auto lines = tokenize_lines(text, true);
  std::size_t li = 0;
  auto expect_key = [&](const char* key) -> const std::vector<Token>& {
    if (li >= lines.size()) throw ParseError(std::string("missing ") + key + " line", lines.empty() ? 1 : lines.back()[0].line + 1, 1);
    const auto& toks = lines[li];
    if (toks[0].text != key) throw ParseError(std::string("expected ") + key + ", got '" + toks[0].text + "'", toks[0].line, toks[0].column);
    if (toks.size() != 2) throw ParseError(std::string(key) + " takes exactly one value", toks[0].line, toks[0].column);
    ++li;
    return toks;
  };
  const auto& header = expect_key("BTSP");
  if (header[1].text != "1") throw ParseError("unsupported BTSP version '" + header[1].text + "'", header[1].line, header[1].column);
  std::string name = expect_key("NAME")[1].text;
  const auto& ntoks = expect_key("N");
  int n = int_token(ntoks[1]);
  if (n < 3) throw ParseError("N must be >= 3", ntoks[1].line, ntoks[1].column);
  std::optional<Rational> declared;
  std::optional<Token> beta_token;
  if (li < lines.size() && lines[li][0].text == "BETA") {
    const auto& btoks = expect_key("BETA");
    declared = rational_token(btoks[1]);
    beta_token = btoks[1];
  }
  auto rows = zero_matrix(n);
  for (int i = 1; i < n; ++i, ++li) {
    if (li >= lines.size()) {
      int line = lines.empty() ? 1 : lines.back()[0].line + 1;
      throw ParseError("truncated weight section: expected " + std::to_string(n - 1) + " rows, got " + std::to_string(i - 1),
                       line, 1);
    }
    const auto& toks = lines[li];
    if (static_cast<int>(toks.size()) != i) {
      throw ParseError("weight row " + std::to_string(i) + " needs " + std::to_string(i) + " entries, got " +
                           std::to_string(toks.size()),
                       toks[0].line, toks[0].column);
    }
    for (int j = 0; j < i; ++j) rows[i][j] = rows[j][i] = rational_token(toks[j]);
  }
  if (li < lines.size()) throw ParseError("unexpected trailing content '" + lines[li][0].text + "'", lines[li][0].line, lines[li][0].column);
  try {
    return Instance(name, rows, declared);
  } catch (const DomainError& e) {
    if (beta_token) throw ParseError(e.what(), beta_token->line, beta_token->column);
    throw;
  }
}

// TSPLIB numbers may be decimals ("12.5", "1e3" is not supported).
Rational tsplib_number(const Token& t) {
  std::string s = t.text;
  auto dot = s.find('.');
  if (dot == std::string::npos) return rational_token(t);
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  std::size_t frac = s.size() - dot - 1;
  if (digits.empty() || digits == "-" || digits == "+") throw ParseError("expected a number, got '" + s + "'", t.line, t.column);
  Integer den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
  Rational r;
  try {
    r = parse_rational(digits);
  } catch (const std::invalid_argument&) {
    throw ParseError("expected a number, got '" + s + "'", t.line, t.column);
  }
  r /= den;
  return r;
}

Instance parse_tsplib(std::string_view text) {
  auto lines = tokenize_lines(text, false);
  std::map<std::string, std::string> spec;
  std::vector<Token> weight_tokens;
  std::vector<std::vector<Token>> coord_lines;
  enum class Section { kNone, kWeights, kCoords } section = Section::kNone;
  bool saw_weight_section = false, saw_coord_section = false;
  int last_line = 1;
  for (const auto& toks : lines) {
    last_line = toks[0].line;
    std::string first = toks[0].text;
    if (first == "EOF") break;
    if (first == "EDGE_WEIGHT_SECTION") {
      section = Section::kWeights;
      saw_weight_section = true;
      continue;
    }
    if (first == "NODE_COORD_SECTION") {
      section = Section::kCoords;
      saw_coord_section = true;
      continue;
    }
    // "KEY : value", "KEY: value", "KEY :value"
    std::string joined;
    for (const auto& t : toks) joined += (joined.empty() ? "" : " ") + t.text;
    auto colon = joined.find(':');
    if (colon != std::string::npos && std::isalpha(static_cast<unsigned char>(first[0]))) {
      std::string key = joined.substr(0, colon);
      while (!key.empty() && key.back() == ' ') key.pop_back();
      std::string value = joined.substr(colon + 1);
      while (!value.empty() && value.front() == ' ') value.erase(0, 1);
      spec[key] = value;
      section = Section::kNone;
      continue;
    }
    switch (section) {
      case Section::kWeights:
        weight_tokens.insert(weight_tokens.end(), toks.begin(), toks.end());
        break;
      case Section::kCoords:
        coord_lines.push_back(toks);
        break;
      case Section::kNone:
        throw ParseError("unexpected token '" + first + "'", toks[0].line, toks[0].column);
    }
  }
  auto need = [&](const std::string& key) -> std::string {
    auto it = spec.find(key);
    if (it == spec.end()) throw ParseError("missing " + key, last_line + 1, 1);
    return it->second;
  };
  if (auto it = spec.find("TYPE"); it != spec.end() && it->second != "TSP") {
    throw ParseError("unsupported TYPE '" + it->second + "' (only TSP)", 1, 1);
  }
  int n = 0;
  {
    std::string dim = need("DIMENSION");
    try {
      n = std::stoi(dim);
    } catch (const std::exception&) {
      throw ParseError("bad DIMENSION '" + dim + "'", 1, 1);
    }
  }
  if (n < 3) throw ParseError("DIMENSION must be >= 3", 1, 1);
  std::string name = spec.count("NAME") ? spec["NAME"] : std::string("unnamed");
  std::string type = need("EDGE_WEIGHT_TYPE");
  auto rows = zero_matrix(n);
  if (type == "EXPLICIT") {
    std::string fmt = need("EDGE_WEIGHT_FORMAT");
    if (!saw_weight_section) throw ParseError("missing EDGE_WEIGHT_SECTION", last_line + 1, 1);
    std::size_t expected = fmt == "FULL_MATRIX"       ? static_cast<std::size_t>(n) * n
                           : fmt == "LOWER_DIAG_ROW" ? static_cast<std::size_t>(n) * (n + 1) / 2
                                                     : 0;
    if (expected == 0) throw ParseError("unsupported EDGE_WEIGHT_FORMAT '" + fmt + "'", 1, 1);
    if (weight_tokens.size() < expected) {
      throw ParseError("truncated EDGE_WEIGHT_SECTION: expected " + std::to_string(expected) + " values, got " +
                           std::to_string(weight_tokens.size()),
                       last_line + 1, 1);
    }
    if (weight_tokens.size() > expected) {
      const Token& t = weight_tokens[expected];
      throw ParseError("inconsistent dimension: extra value '" + t.text + "' in EDGE_WEIGHT_SECTION", t.line, t.column);
    }
    std::size_t k = 0;
    if (fmt == "FULL_MATRIX") {
      std::vector<std::vector<Token>> at(n, std::vector<Token>(n));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          at[i][j] = weight_tokens[k];
          rows[i][j] = tsplib_number(weight_tokens[k++]);
        }
      for (int i = 0; i < n; ++i) {
        if (rows[i][i] != 0) throw ParseError("nonzero diagonal entry", at[i][i].line, at[i][i].column);
        for (int j = i + 1; j < n; ++j)
          if (rows[i][j] != rows[j][i]) throw ParseError("asymmetric matrix entry", at[j][i].line, at[j][i].column);
      }
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
          const Token& t = weight_tokens[k++];
          Rational w = tsplib_number(t);
          if (i == j && w != 0) throw ParseError("nonzero diagonal entry", t.line, t.column);
          rows[i][j] = rows[j][i] = w;
        }
    }
  } else if (type == "EUC_2D") {
    if (!saw_coord_section) throw ParseError("missing NODE_COORD_SECTION", last_line + 1, 1);
    if (static_cast<int>(coord_lines.size()) != n) {
      int line = coord_lines.empty() ? last_line + 1 : coord_lines.back()[0].line;
      throw ParseError("inconsistent dimension: NODE_COORD_SECTION has " + std::to_string(coord_lines.size()) +
                           " nodes, DIMENSION is " + std::to_string(n),
                       line, 1);
    }
    std::vector<double> xs(n), ys(n);
    std::vector<bool> seen(n, false);
    for (const auto& toks : coord_lines) {
      if (toks.size() != 3) throw ParseError("node line needs 'id x y'", toks[0].line, toks[0].column);
      int id = int_token(toks[0]);
      if (id < 1 || id > n || seen[id - 1]) throw ParseError("bad or duplicate node id", toks[0].line, toks[0].column);
      seen[id - 1] = true;
      xs[id - 1] = tsplib_number(toks[1]).get_d();
      ys[id - 1] = tsplib_number(toks[2]).get_d();
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) {
        double d = std::sqrt((xs[i] - xs[j]) * (xs[i] - xs[j]) + (ys[i] - ys[j]) * (ys[i] - ys[j]));
        rows[i][j] = rows[j][i] = Rational(static_cast<long>(d + 0.5));
      }
  } else {
    throw ParseError("unsupported EDGE_WEIGHT_TYPE '" + type + "'", 1, 1);
  }
  return Instance(name, rows);
}

}  // namespace

Instance parse_instance(std::string_view text, Format format) {
  return format == Format::kNative ? parse_native(text) : parse_tsplib(text);
}

std::string write_native(const Instance& inst) {
  std::ostringstream out;
  out << "BTSP 1\n";
  out << "NAME " << inst.name() << "\n";
  out << "N " << inst.size() << "\n";
  if (inst.declared_beta()) out << "BETA " << to_fraction(*inst.declared_beta()) << "\n";
  for (int i = 1; i < inst.size(); ++i) {
    for (int j = 0; j < i; ++j) out << (j ? " " : "") << to_fraction(inst.weight(i, j));
    out << "\n";
  }
  return out.str();
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  bool tsplib = path.size() >= 4 && path.compare(path.size() - 4, 4, ".tsp") == 0;
  return parse_instance(buf.str(), tsplib ? Format::kTsplib : Format::kNative);
}

void save_instance(const Instance& inst, const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".tsp") == 0) {
    throw DomainError("instances are written in the native format; use a .btsp name");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << write_native(inst);
}

}  // namespace btsp
