// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helio/error.hpp"
#include "helio/eval.hpp"
#include "oracles.hpp"

using namespace helio;

TEST_CASE("metrics: worked examples") {
  const std::vector<double> p{1, 2}, a{2, 4};
  CHECK(std::fabs(mae(p, a) - 1.5) <= 1e-12);
  CHECK(std::fabs(rmse(p, a) - std::sqrt(2.5)) <= 1e-12);
  CHECK(std::fabs(rmse(p, a) - 1.58114) <= 1e-5);
  CHECK(mae(a, a) == 0.0);
  CHECK(rmse(a, a) == 0.0);
  CHECK(mae(std::vector<double>{5}, std::vector<double>{3}) == 2.0);
  CHECK(r2(std::vector<double>{1, 2, 4}, std::vector<double>{1, 2, 3}) == 0.5);
  CHECK(r2(a, a) == 1.0);
  const std::vector<double> actual{1, 5, 2, 8, 3};
  double m = 0;
  for (double v : actual) m += v;
  m /= actual.size();
  CHECK(r2(std::vector<double>(actual.size(), m), actual) == 0.0);
  std::vector<double> e(7, 0.0), shifted(7, 0.0);
  for (std::size_t i = 0; i < 7; ++i) shifted[i] = -2.5;
  CHECK(rmse(shifted, e) == 2.5);
}

TEST_CASE("metrics: errors") {
  auto code = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::Io;
  };
  std::vector<double> one{1}, two{1, 2}, none;
  CHECK(code([&] { mae(one, two); }) == Errc::LengthMismatch);
  CHECK(code([&] { rmse(none, none); }) == Errc::Empty);
  CHECK(code([&] { r2(two, std::vector<double>{3, 3}); }) == Errc::ConstantActual);
}

TEST_CASE("metrics: properties against independent accumulation") {
  oracle::Gen g(31);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 2 + g.below(100);
    auto p = g.vec(n, -100, 100), a = g.vec(n, -100, 100);
    const double r = rmse(p, a);
    CHECK(std::fabs(r * r - oracle::mse(p, a)) <= 1e-12 * std::max(1.0, oracle::mse(p, a)));
    CHECK(std::fabs(mae(p, a) - oracle::mae(p, a)) <= 1e-12 * std::max(1.0, oracle::mae(p, a)));
    const double c = g.uniform(-1000, 1000);
    auto pc = p, ac = a;
    for (auto& v : pc) v += c;
    for (auto& v : ac) v += c;
    CHECK(std::fabs(r2(pc, ac) - r2(p, a)) <= 1e-9);
    CHECK(r2(p, a) <= 1.0);
  }
}

TEST_CASE("comparison table ordering") {
  std::vector<ComparisonRow> rows{{"B", {50.16, 111.49, 0.87, 10}}, {"A", {34.82, 87.18, 0.95, 10}}};
  auto t = make_table(rows);
  CHECK(t.rows[0].model_name == "A");
  CHECK(t.rows[1].model_name == "B");
  std::vector<ComparisonRow> tie{{"zeta", {1, 2, 0.5, 3}}, {"alpha", {1, 2, 0.5, 3}}, {"mid", {1, 1, 0.5, 3}}};
  std::vector<std::string> expected{"mid", "alpha", "zeta"};
  std::sort(tie.begin(), tie.end(), [](auto& a, auto& b) { return a.model_name < b.model_name; });
  do {
    auto tt = make_table(tie);
    std::vector<std::string> names;
    for (auto& r : tt.rows) names.push_back(r.model_name);
    CHECK(names == expected);
  } while (std::next_permutation(tie.begin(), tie.end(), [](auto& a, auto& b) { return a.model_name < b.model_name; }));
  CHECK(make_table({{"solo", {1, 1, 1, 1}}}).rows.size() == 1);
}
