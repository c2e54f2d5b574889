#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "btsp/rational.hpp"

namespace btsp {

using Vertex = int;

// A complete graph on n >= 3 vertices with exact symmetric rational weights.
//
// Negative weights are allowed here so that the Eulerian backbone can be built
// for arbitrary weights; the beta-TSP entry points reject them.
class Instance {
 public:
  // `rows` is the full n x n matrix; it must be symmetric with a zero diagonal.
  // When `declared_beta` is present the weights must be nonnegative and satisfy
  // the relaxed triangle inequality for that beta.
  Instance(std::string name, const std::vector<std::vector<Rational>>& rows,
           std::optional<Rational> declared_beta = std::nullopt);

  int size() const noexcept { return n_; }
  const Rational& weight(Vertex u, Vertex v) const { return w_[static_cast<std::size_t>(u) * n_ + v]; }
  const std::string& name() const noexcept { return name_; }
  const std::optional<Rational>& declared_beta() const noexcept { return declared_beta_; }
  bool nonnegative() const;

  // Rebinds metadata without touching the weights.
  Instance with_name(std::string name) const;
  Instance with_declared_beta(std::optional<Rational> beta) const;

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.n_ == b.n_ && a.name_ == b.name_ && a.declared_beta_ == b.declared_beta_ && a.w_ == b.w_;
  }

 private:
  Instance() = default;

  int n_ = 0;
  std::vector<Rational> w_;
  std::string name_;
  std::optional<Rational> declared_beta_;
};

// The relaxed-triangle parameter of an instance; infinite when some positive
// weight is bounded by a zero-weight two-hop path.
class Beta {
 public:
  static Beta infinite() { return Beta(); }
  explicit Beta(Rational value) : value_(std::move(value)) {}

  bool is_infinite() const noexcept { return !value_.has_value(); }
  // Throws DomainError when infinite.
  const Rational& value() const;
  std::string to_string() const;

  friend bool operator==(const Beta&, const Beta&) = default;

 private:
  Beta() = default;
  std::optional<Rational> value_;
};

// max(1, max over ordered triples of w(u,x) / (w(u,v) + w(v,x))).
Beta beta_of(const Instance& inst);

// beta_of as a finite rational; throws DomainError for INFINITE.
Rational effective_beta(const Instance& inst);

// Weights uniform on a grid over [1, 2*beta]; beta == 1 yields the all-ones metric.
Instance gen_uniform_beta(int n, const Rational& beta, std::uint64_t seed);

struct Point {
  Rational x;
  Rational y;
};

// w(u,v) = |uv|^p. Even p works for any rational points; odd p requires every
// pairwise distance to be rational.
Instance instance_from_points(std::string name, const std::vector<Point>& points, int p);

// Euclidean distances raised to an integer power p >= 1, declared beta = beta_of.
// Even p samples distinct points of a 1/100 grid in the unit square; odd p
// samples distinct rational points on the circle inscribed in the unit square,
// where all chord lengths are rational.
Instance gen_euclidean_power(int n, const Rational& p, std::uint64_t seed);

enum class Format { kNative, kTsplib };

Instance parse_instance(std::string_view text, Format format);
std::string write_native(const Instance& inst);

// Reads a file, picking TSPLIB for a ".tsp" suffix and NATIVE otherwise.
Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

}  // namespace btsp
