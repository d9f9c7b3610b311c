#include "doctest.h"

#include "ldnoma/graphgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <vector>

using namespace ldnoma;

namespace {

EnsembleSpec spec_of(std::size_t n, std::size_t k, std::size_t d, EntryMode mode, std::uint64_t seed) {
  return EnsembleSpec{n, k, d, mode, seed};
}

// Cycles of length 2L by enumerating L rows, L columns and every
// alternating ordering; each cycle appears 2 times with the first row fixed.
std::uint64_t brute_force_cycles(const SparseSignatureMatrix& a, std::size_t half) {
  const std::size_t n = a.rows(), k = a.cols();
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (const auto& e : a.entries()) edges.insert({e.row, e.col});
  auto has = [&](std::size_t r, std::size_t c) {
    return edges.count({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c)}) > 0;
  };
  std::uint64_t count = 0;
  std::vector<int> row_pick(n, 0), col_pick(k, 0);
  std::fill(row_pick.end() - static_cast<long>(half), row_pick.end(), 1);
  do {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i) if (row_pick[i]) rows.push_back(i);
    std::fill(col_pick.begin(), col_pick.end(), 0);
    std::fill(col_pick.end() - static_cast<long>(half), col_pick.end(), 1);
    do {
      std::vector<std::size_t> cols;
      for (std::size_t i = 0; i < k; ++i) if (col_pick[i]) cols.push_back(i);
      std::vector<std::size_t> rest(rows.begin() + 1, rows.end());
      do {
        std::vector<std::size_t> order{rows[0]};
        order.insert(order.end(), rest.begin(), rest.end());
        auto perm = cols;
        do {
          bool ok = true;
          for (std::size_t i = 0; i < half && ok; ++i) {
            ok = has(order[i], perm[i]) && has(order[(i + 1) % half], perm[i]);
          }
          if (ok) ++count;
        } while (std::next_permutation(perm.begin(), perm.end()));
      } while (std::next_permutation(rest.begin(), rest.end()));
    } while (std::next_permutation(col_pick.begin(), col_pick.end()));
  } while (std::next_permutation(row_pick.begin(), row_pick.end()));
  return count / 2;
}

// 4-cycles = sum over row pairs of C(common neighbours, 2).
std::uint64_t four_cycles_by_common_neighbours(const SparseSignatureMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<std::vector<int>> common(n, std::vector<int>(n, 0));
  std::vector<std::vector<std::uint32_t>> by_col(a.cols());
  for (const auto& e : a.entries()) by_col[e.col].push_back(e.row);
  for (const auto& rows : by_col) {
    for (auto r1 : rows) for (auto r2 : rows) if (r1 < r2) ++common[r1][r2];
  }
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) total += common[i][j] * (common[i][j] - 1) / 2;
  }
  return total;
}

} // namespace

TEST_SUITE("graphgen") {

TEST_CASE("2x2 with d = 2 is forced to the all-ones matrix") {
  const auto a = generate_regular(spec_of(2, 2, 2, EntryMode::Ones, 11));
  REQUIRE(a.nonzeros() == 4);
  for (const auto& e : a.entries()) CHECK(e.value == 1.0);
  CHECK(a.is_biregular());
}

TEST_CASE("full-size (2600x3900) sampler meets exact degrees") {
  for (std::uint64_t r = 0; r < 3; ++r) {
    const auto a = generate_regular(spec_of(2600, 3900, 2, EntryMode::Rademacher, 1), r);
    const auto cd = a.column_degrees();
    const auto rd = a.row_degrees();
    CHECK(std::all_of(cd.begin(), cd.end(), [](auto v) { return v == 2; }));
    CHECK(std::all_of(rd.begin(), rd.end(), [](auto v) { return v == 3; }));
  }
}

TEST_CASE("fixed seed reproduces, other realizations differ") {
  const auto s = spec_of(100, 150, 2, EntryMode::Rademacher, 1);
  const auto a = generate_regular(s);
  const auto b = generate_regular(s);
  CHECK(a == b);
  CHECK_FALSE(a.entries() == generate_regular(s, 1).entries());
}

TEST_CASE("property: sampler output is simple and biregular across specs") {
  const EnsembleSpec specs[] = {
      spec_of(10, 15, 2, EntryMode::Rademacher, 0), spec_of(12, 12, 3, EntryMode::Ones, 0),
      spec_of(30, 90, 4, EntryMode::Rademacher, 0), spec_of(6, 9, 4, EntryMode::Ones, 0),
      spec_of(40, 60, 6, EntryMode::Rademacher, 0)};
  for (const auto& s : specs) {
    for (std::uint64_t r = 0; r < 25; ++r) {
      const auto a = generate_regular(s, r);
      REQUIRE(a.is_biregular());
      std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
      for (const auto& e : a.entries()) REQUIRE(seen.insert({e.row, e.col}).second);
    }
  }
}

TEST_CASE("rademacher signs are balanced, ones mode is all +1") {
  const auto a = generate_regular(spec_of(1000, 1500, 2, EntryMode::Rademacher, 4));
  const auto plus = std::count_if(a.entries().begin(), a.entries().end(),
                                  [](const Entry& e) { return e.value > 0; });
  CHECK(std::abs(static_cast<double>(plus) / 3000.0 - 0.5) < 0.05);
  const auto b = generate_regular(spec_of(100, 150, 2, EntryMode::Ones, 4));
  for (const auto& e : b.entries()) CHECK(e.value == 1.0);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(generate_regular(spec_of(4, 6, 1, EntryMode::Ones, 0)), EnsembleError);
  CHECK_THROWS_AS(generate_regular(spec_of(4, 3, 2, EntryMode::Ones, 0)), EnsembleError);
  CHECK_THROWS_AS(generate_regular(spec_of(4, 5, 2, EntryMode::Ones, 0)), EnsembleError);
  CHECK_THROWS_AS(generate_regular(spec_of(0, 5, 2, EntryMode::Ones, 0)), EnsembleError);
  CHECK_THROWS_AS(generate_irregular(spec_of(2, 3, 2, EntryMode::Ones, 0)), EnsembleError);
  CHECK_NOTHROW(generate_irregular(spec_of(5, 7, 2, EntryMode::Ones, 0)));
}

TEST_CASE("irregular column degrees: mean and variance near d") {
  const auto s = spec_of(1000, 1500, 2, EntryMode::Rademacher, 17);
  double sum = 0.0, sum_sq = 0.0;
  std::size_t count = 0;
  for (std::uint64_t r = 0; r < 100; ++r) {
    for (const auto deg : generate_irregular(s, r).column_degrees()) {
      sum += static_cast<double>(deg);
      sum_sq += static_cast<double>(deg * deg);
      ++count;
    }
  }
  const double mean = sum / static_cast<double>(count);
  const double var = (sum_sq - static_cast<double>(count) * mean * mean) / static_cast<double>(count - 1);
  CHECK(std::abs(mean - 2.0) < 0.1);
  CHECK(std::abs(var - 2.0) < 0.2);
}

TEST_CASE("irregular column degrees pass a chi-square test against Poisson(d)") {
  const auto a = generate_irregular(spec_of(1000, 10000, 2, EntryMode::Ones, 23));
  std::vector<double> observed(8, 0.0);
  for (const auto deg : a.column_degrees()) observed[std::min<std::size_t>(deg, 7)] += 1.0;
  double chi2 = 0.0, tail = 1.0, pk = std::exp(-2.0);
  for (int k = 0; k < 8; ++k) {
    const double prob = k < 7 ? pk : tail;
    const double expected = 10000.0 * prob;
    chi2 += (observed[k] - expected) * (observed[k] - expected) / expected;
    tail -= pk;
    pk *= 2.0 / (k + 1);
  }
  CHECK(chi2 < 18.475);  // 99th percentile, 7 dof
}

TEST_CASE("cycle diagnostics on small known graphs") {
  const auto k22 = generate_regular(spec_of(2, 2, 2, EntryMode::Ones, 0));
  const auto c = cycle_diagnostics(k22, 8);
  CHECK(c.len4 == 1);
  CHECK(c.len6 == 0);
  CHECK(c.len8 == 0);

  // A path r0 - u0 - r1 - u1 - r2 plus a pendant user: a tree.
  const EnsembleSpec s = spec_of(3, 3, 2, EntryMode::Ones, 0);
  const auto tree = SparseSignatureMatrix::from_entries(
      s, {{0, 0, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}, {2, 1, 1.0}, {2, 2, 1.0}}, true);
  CHECK(cycle_diagnostics(tree, 8).total() == 0);

  // The only simple (2,2)-biregular 3x3 graph is a 6-cycle.
  const auto hex = generate_regular(spec_of(3, 3, 2, EntryMode::Ones, 0));
  const auto h = cycle_diagnostics(hex, 8);
  CHECK(h.len4 == 0);
  CHECK(h.len6 == 1);
}

TEST_CASE("cycle diagnostics agree with brute-force enumeration") {
  for (std::uint64_t r = 0; r < 8; ++r) {
    const auto a = generate_regular(spec_of(4, 6, 2, EntryMode::Ones, 5), r);
    const auto c = cycle_diagnostics(a, 8);
    CHECK(c.len4 == brute_force_cycles(a, 2));
    CHECK(c.len4 == four_cycles_by_common_neighbours(a));
    CHECK(c.len6 == brute_force_cycles(a, 3));
    CHECK(c.len8 == brute_force_cycles(a, 4));
  }
  const auto dense = generate_regular(spec_of(5, 5, 3, EntryMode::Ones, 9));
  const auto c = cycle_diagnostics(dense, 8);
  CHECK(c.len4 == brute_force_cycles(dense, 2));
  CHECK(c.len6 == brute_force_cycles(dense, 3));
  CHECK(c.len8 == brute_force_cycles(dense, 4));
}

TEST_CASE("full-size (2600x3900) graphs are locally tree-like") {
  double per_node = 0.0;
  const int realizations = 5;
  for (int r = 0; r < realizations; ++r) {
    const auto a = generate_regular(spec_of(2600, 3900, 2, EntryMode::Ones, 3), r);
    per_node += static_cast<double>(cycle_diagnostics(a, 4).len4) / 2600.0;
  }
  CHECK(per_node / realizations < 0.05);
}

TEST_CASE("cycle diagnostics rejects long or odd lengths") {
  const auto a = generate_regular(spec_of(2, 2, 2, EntryMode::Ones, 0));
  CHECK_THROWS_AS(cycle_diagnostics(a, 10), std::invalid_argument);
  CHECK_THROWS_AS(cycle_diagnostics(a, 5), std::invalid_argument);
}

TEST_CASE("matrix text format") {
  const auto a = generate_regular(spec_of(2, 2, 2, EntryMode::Ones, 7));
  std::ostringstream os;
  write_matrix(os, a);
  CHECK(os.str() == "2 2 2 ONES 7\n0 0 1\n0 1 1\n1 0 1\n1 1 1\n");

  SUBCASE("round trip over random specs") {
    for (std::uint64_t r = 0; r < 10; ++r) {
      const auto m = r % 2 ? generate_regular(spec_of(20, 30, 2, EntryMode::Rademacher, r))
                           : generate_irregular(spec_of(20, 30, 2, EntryMode::Rademacher, r));
      std::stringstream ss;
      write_matrix(ss, m);
      const auto back = read_matrix(ss);
      CHECK(back.entries() == m.entries());
      CHECK(back.spec().seed == m.spec().seed);
      CHECK(back.is_biregular() == m.is_biregular());
    }
  }

  SUBCASE("malformed input") {
    std::istringstream bad_header("2 2 x ONES 7\n");
    CHECK_THROWS_AS(read_matrix(bad_header), EnsembleError);
    std::istringstream dup("2 2 2 ONES 7\n0 0 1\n0 0 1\n");
    CHECK_THROWS_AS(read_matrix(dup), EnsembleError);
    std::istringstream bad_value("2 2 2 RADEMACHER 7\n0 0 2\n");
    CHECK_THROWS_AS(read_matrix(bad_value), EnsembleError);
  }
}

}
