#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "btsp/cactus.hpp"
#include "btsp/rational.hpp"

namespace btsp {

// Summary of one solver run. Rendered as a single line of space-separated
// key=value pairs in a fixed key order; rationals appear as p/q and as a
// decimal under the same key with a "_dec" suffix, absent values as "-".
// Besides the fields below, tour_bound = bound * opt is rendered when opt is
// known.
struct RunRecord {
  std::string name;
  int n = 0;
  Rational beta;
  Rational backbone_weight;
  Rational tour_weight;
  std::optional<Rational> opt;
  std::optional<Rational> ratio;
  Rational bound;
  std::optional<double> wall_seconds;
  std::optional<std::uint64_t> seed;

  static RunRecord from_certificate(const std::string& name, const TourCertificate& cert);
  // Sets opt and ratio = tour weight / opt (ratio 1 when opt is 0).
  void set_opt(const Rational& value);

  std::string line() const;
  static std::string csv_header();
  std::string csv_row() const;
};

}  // namespace btsp
