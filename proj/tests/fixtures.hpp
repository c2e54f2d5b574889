#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "btsp/graph.hpp"
#include "btsp/instance.hpp"

namespace btsp::testing {

// Builds an instance from the strict lower triangle, row by row:
// {w10}, {w20, w21}, {w30, w31, w32}, ...
inline Instance lower(std::string name, std::initializer_list<std::initializer_list<Rational>> rows) {
  const int n = static_cast<int>(rows.size()) + 1;
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n, Rational(0)));
  int i = 1;
  for (const auto& row : rows) {
    int j = 0;
    for (const auto& w : row) {
      m[i][j] = m[j][i] = w;
      ++j;
    }
    ++i;
  }
  return Instance(std::move(name), m);
}

inline Instance uniform(int n, Rational w) {
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n, w));
  for (int i = 0; i < n; ++i) m[i][i] = 0;
  return Instance("uniform", m);
}

// K3 with w01 = 1, w12 = 1, w02 = 3.
inline Instance skewed_triangle() { return lower("skewed-triangle", {{1}, {3, 1}}); }

// K4: w01=1, w12=2, w23=3, w03=4, w02=5, w13=6.
inline Instance k4_distinct() { return lower("k4-distinct", {{1}, {5, 2}, {4, 6, 3}}); }

// K4 hub: w(0,i) = 1, w(i,j) = 10.
inline Instance hub() { return lower("hub", {{1}, {1, 10}, {1, 10, 10}}); }

// Six vertices, every weight 2 except w(2,4) = 1.
inline Instance two_squares_instance() {
  std::vector<std::vector<Rational>> m(6, std::vector<Rational>(6, Rational(2)));
  for (int i = 0; i < 6; ++i) m[i][i] = 0;
  m[2][4] = m[4][2] = 1;
  return Instance("two-squares", m);
}

// Two 4-cycles 0-1-2-3 and 1-4-5-2 sharing the doubled pair {1,2}, in id order.
inline std::vector<Edge> two_squares_edges() {
  return {{0, 1}, {1, 4}, {4, 5}, {2, 5}, {1, 2}, {1, 2}, {2, 3}, {0, 3}};
}

// Triangles 0-1-2 and 0-3-4 sharing vertex 0.
inline std::vector<Edge> bow_tie_edges() { return {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {3, 4}, {0, 4}}; }

inline std::vector<Instance> small_corpus(int count, int max_n, std::uint64_t seed) {
  std::vector<Instance> out;
  const Rational betas[] = {Rational(1), Rational(3, 2), Rational(2), Rational(3)};
  for (int i = 0; i < count; ++i) {
    int n = 4 + static_cast<int>((seed + i) % static_cast<std::uint64_t>(max_n - 3));
    if (i % 3 == 2) {
      out.push_back(gen_euclidean_power(n, Rational(1 + i % 2), seed * 1000 + i));
    } else {
      out.push_back(gen_uniform_beta(n, betas[i % 4], seed * 1000 + i));
    }
  }
  return out;
}

}  // namespace btsp::testing
