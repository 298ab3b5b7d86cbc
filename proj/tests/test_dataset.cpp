// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "helio/dataset.hpp"
#include "helio/error.hpp"
#include "helio/rng.hpp"
#include "oracles.hpp"

using namespace helio;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  auto p = std::filesystem::temp_directory_path() / ("helio_test_" + name);
  std::ofstream(p) << body;
  return p;
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::Io;
}

TabularDataset random_dataset(oracle::Gen& g, std::size_t n, std::size_t d) {
  TabularDataset ds;
  ds.schema.push_back({"y", ColumnKind::target, ""});
  for (std::size_t j = 0; j < d; ++j) ds.schema.push_back({"x" + std::to_string(j), ColumnKind::feature, ""});
  ds.rows = Matrix(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < d; ++j) ds.rows(r, j) = g.uniform(-50, 50) * (j + 1) + 10.0 * j;
    ds.target.push_back(g.normal());
  }
  return ds;
}

}  // namespace

TEST_CASE("rng: counter draws are pure and match the documented recurrence") {
  // mix(0) from the splitmix64 reference.
  CHECK(splitmix_mix(0) == 0xE220A8397B1DCDAFULL);
  CHECK(counter_draw(7, 1, 2, 3) == splitmix_mix(splitmix_mix(splitmix_mix(splitmix_mix(7) ^ 1) ^ 2) ^ 3));
  CounterRng a(5, StreamTag::split), b(5, StreamTag::split);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CounterRng c(5, StreamTag::split);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("rng: permutation is a bijection and halton stays in the unit cube") {
  for (std::size_t n : {1u, 2u, 17u, 300u}) {
    CounterRng r(n, StreamTag::folds);
    auto p = permutation(n, r);
    std::set<std::size_t> s(p.begin(), p.end());
    CHECK(s.size() == n);
    CHECK(*s.rbegin() == n - 1);
  }
  ShiftedHalton h(3, 9, 0);
  for (std::uint64_t i = 0; i < 500; ++i)
    for (double v : h.point(i)) CHECK((v >= 0.0 && v < 1.0));
}

TEST_CASE("csv: load, mapping and error cases") {
  ColumnSchema schema{{"y", ColumnKind::target, ""}, {"a", ColumnKind::feature, ""}, {"b", ColumnKind::feature, ""}};
  auto ok = temp_file("ok.csv", "B_col,a,y\n1,2,3\n4,5,6\n");
  auto ds = load_csv(ok, schema, {{"b", "B_col"}});
  REQUIRE(ds.row_count() == 2);
  CHECK(ds.rows(0, 0) == 2.0);
  CHECK(ds.rows(0, 1) == 1.0);
  CHECK(ds.target[1] == 6.0);

  CHECK(code_of([&] { load_csv(ok, schema); }) == Errc::MissingColumn);
  CHECK(code_of([&] { load_csv(temp_file("empty.csv", ""), schema); }) == Errc::EmptyFile);
  auto bad = temp_file("bad.csv", "a,b,y\n1,2,3\n1,x,3\n");
  try {
    load_csv(bad, schema);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ParseError);
    CHECK(e.row() == 2u);
  }
}

TEST_CASE("csv: write/load round trip is exact") {
  oracle::Gen g(3);
  auto ds = random_dataset(g, 20, 3);
  auto p = std::filesystem::temp_directory_path() / "helio_test_roundtrip.csv";
  write_csv(p, ds);
  CHECK(load_csv(p, ds.schema) == ds);
}

TEST_CASE("clean: drops non-finite rows or fails") {
  oracle::Gen g(4);
  auto ds = random_dataset(g, 5, 2);
  ds.rows(2, 1) = std::nan("");
  ds.target[4] = INFINITY;
  const auto c = clean(ds);
  CHECK(c.row_count() == 3);
  CHECK(code_of([&] { clean(ds, CleanPolicy::fail); }) == Errc::DirtyData);
}

TEST_CASE("standardizer: fixed point and round trip on random datasets") {
  oracle::Gen g(11);
  for (int trial = 0; trial < 100; ++trial) {
    auto ds = random_dataset(g, 5 + g.below(60), 1 + g.below(6));
    const auto p = fit_standardizer(ds);
    const auto z = apply_standardizer(ds, p);
    for (std::size_t j = 0; j < z.feature_count(); ++j) {
      const auto col = z.rows.column(j);
      long double m = 0, v = 0;
      for (double x : col) m += x;
      m /= col.size();
      for (double x : col) v += (x - m) * (x - m);
      v /= col.size();
      CHECK(std::fabs(static_cast<double>(m)) <= 1e-9);
      CHECK(std::fabs(std::sqrt(static_cast<double>(v)) - 1.0) <= 1e-9);
    }
    const auto back = invert_standardizer(z, p);
    for (std::size_t i = 0; i < ds.rows.data().size(); ++i)
      CHECK(std::fabs(back.rows.data()[i] - ds.rows.data()[i]) <= 1e-9 * std::max(1.0, std::fabs(ds.rows.data()[i])));
  }
}

TEST_CASE("standardizer: constant column and width mismatch") {
  oracle::Gen g(12);
  auto ds = random_dataset(g, 10, 2);
  for (std::size_t r = 0; r < 10; ++r) ds.rows(r, 1) = 3.0;
  CHECK(code_of([&] { fit_standardizer(ds); }) == Errc::ConstantColumn);
  auto other = random_dataset(g, 10, 3);
  const auto p = fit_standardizer(random_dataset(g, 10, 2));
  CHECK(code_of([&] { apply_standardizer(other, p); }) == Errc::DimensionMismatch);
}

TEST_CASE("split: partition property for every n in [2, 500]") {
  for (std::size_t n = 2; n <= 500; ++n) {
    for (double f : {0.5, 0.8, 0.25}) {
      const auto n_train = static_cast<std::size_t>(std::llround(f * static_cast<double>(n)));
      if (n_train == 0 || n_train == n) {
        CHECK(code_of([&] { split_train_test(n, f, n); }) == Errc::TooFewRows);
        continue;
      }
      const auto s = split_train_test(n, f, n);
      CHECK(s.train.size() == n_train);
      std::vector<int> seen(n, 0);
      for (auto i : s.train) ++seen[i];
      for (auto i : s.test) ++seen[i];
      CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
      CHECK(std::is_sorted(s.train.begin(), s.train.end()));
      CHECK(s == split_train_test(n, f, n));
    }
  }
  CHECK(code_of([] { split_train_test(10, 1.2, 0); }) == Errc::InvalidConfig);
  CHECK(code_of([] { split_train_test(10, 0.0, 0); }) == Errc::InvalidConfig);
  const auto ordered = split_train_test(10, 0.7, 0, false);
  CHECK(ordered.train == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6});
}

TEST_CASE("folds: every row validated exactly once, sizes balanced") {
  for (std::size_t n = 2; n <= 500; n += 1) {
    for (std::size_t k = 2; k <= std::min<std::size_t>(10, n); ++k) {
      const auto plan = make_folds(n, k, n * 31 + k);
      std::vector<int> count(n, 0);
      std::size_t lo = n, hi = 0;
      for (std::size_t f = 0; f < k; ++f) {
        const auto v = plan.validation_indices(f);
        const auto t = plan.train_indices(f);
        CHECK(v.size() + t.size() == n);
        lo = std::min(lo, v.size());
        hi = std::max(hi, v.size());
        for (auto i : v) ++count[i];
      }
      CHECK(hi - lo <= 1);
      CHECK(std::all_of(count.begin(), count.end(), [](int c) { return c == 1; }));
    }
  }
  CHECK(code_of([] { make_folds(5, 1, 0); }) == Errc::BadK);
  CHECK(code_of([] { make_folds(5, 6, 0); }) == Errc::BadK);
  CHECK(make_folds(100, 5, 0).validation_indices(3).size() == 20);
}

TEST_CASE("synthetic generator: deterministic, schema, night-time zero irradiance") {
  const auto a = synth_generate(48, 42);
  const auto b = synth_generate(48, 42);
  CHECK(a == b);
  CHECK(a.feature_names() == std::vector<std::string>{"temperature", "pressure", "humidity", "wind_speed",
                                                      "wind_direction", "time_of_day", "length_of_day"});
  const auto tod = *a.feature_index("time_of_day");
  for (std::size_t r = 0; r < a.row_count(); ++r) {
    const double h = a.rows(r, tod);
    if (h <= 6.0 || h >= 18.0) CHECK(a.target[r] == 0.0);
  }
  CHECK(synth_generate(48, 43) != a);
}

TEST_CASE("cyclic encoding and noise features") {
  const auto ds = synth_generate(48, 1);
  const auto enc = encode_cyclic(ds, "wind_direction");
  CHECK(!enc.feature_index("wind_direction"));
  const auto s = *enc.feature_index("wind_direction_sin");
  const auto c = *enc.feature_index("wind_direction_cos");
  const auto w = *ds.feature_index("wind_direction");
  for (std::size_t r = 0; r < ds.row_count(); ++r) {
    CHECK(enc.rows(r, s) == doctest::Approx(std::sin(ds.rows(r, w) * M_PI / 180.0)));
    CHECK(enc.rows(r, c) == doctest::Approx(std::cos(ds.rows(r, w) * M_PI / 180.0)));
  }
  const auto noisy = add_noise_features(ds, 3, 7);
  CHECK(noisy.feature_count() == ds.feature_count() + 3);
  CHECK(noisy.feature_index("noise_2"));
  CHECK(noisy == add_noise_features(ds, 3, 7));
  std::vector<std::string> keep{"humidity", "temperature"};
  const auto proj = project_features(ds, keep);
  CHECK(proj.feature_names() == keep);
  std::vector<std::string> missing{"nope"};
  CHECK(code_of([&] { project_features(ds, missing); }) == Errc::SchemaMismatch);
}
