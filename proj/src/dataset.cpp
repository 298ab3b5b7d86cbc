// SPDX-License-Identifier: Apache-2.0
#include "helio/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_map>

#include "helio/error.hpp"
#include "helio/rng.hpp"

namespace helio {

void validate_schema(const ColumnSchema& schema) {
  std::set<std::string> seen;
  std::size_t targets = 0;
  for (const auto& c : schema) {
    if (c.name.empty()) fail(Errc::InvalidConfig, "schema column with empty name");
    if (!seen.insert(c.name).second) fail(Errc::InvalidConfig, "duplicate schema column '" + c.name + "'");
    if (c.kind == ColumnKind::target) ++targets;
  }
  if (targets != 1)
    fail(Errc::InvalidConfig, "schema must have exactly one target column, found " + std::to_string(targets));
}

ColumnSchema weather_schema() {
  return {
      {"irradiance", ColumnKind::target, "W/m2"},
      {"temperature", ColumnKind::feature, "degC"},
      {"pressure", ColumnKind::feature, "hPa"},
      {"humidity", ColumnKind::feature, "%"},
      {"wind_speed", ColumnKind::feature, "m/s"},
      {"wind_direction", ColumnKind::feature, "deg"},
      {"time_of_day", ColumnKind::feature, "h"},
      {"length_of_day", ColumnKind::feature, "h"},
  };
}

std::vector<std::string> TabularDataset::feature_names() const {
  std::vector<std::string> out;
  for (const auto& c : schema)
    if (c.kind == ColumnKind::feature) out.push_back(c.name);
  return out;
}

std::string TabularDataset::target_name() const {
  for (const auto& c : schema)
    if (c.kind == ColumnKind::target) return c.name;
  return {};
}

std::optional<std::size_t> TabularDataset::feature_index(const std::string& name) const {
  std::size_t j = 0;
  for (const auto& c : schema) {
    if (c.kind != ColumnKind::feature) continue;
    if (c.name == name) return j;
    ++j;
  }
  return std::nullopt;
}

TabularDataset TabularDataset::subset(std::span<const std::size_t> indices) const {
  TabularDataset out;
  out.schema = schema;
  out.rows = rows.select_rows(indices);
  out.target.reserve(indices.size());
  for (auto i : indices) out.target.push_back(target[i]);
  return out;
}

namespace {

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"'))
    s.remove_suffix(1);
  return s;
}

std::optional<double> parse_real(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

}  // namespace

TabularDataset load_csv(const std::filesystem::path& path, const ColumnSchema& schema,
                        const ColumnMapping& mapping) {
  validate_schema(schema);
  std::ifstream in(path);
  if (!in) fail(Errc::Io, "cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) fail(Errc::EmptyFile, "'" + path.string() + "' has no header");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  std::unordered_map<std::string, std::size_t> header;
  {
    const auto cells = split_line(line);
    for (std::size_t i = 0; i < cells.size(); ++i) header.emplace(std::string(trim(cells[i])), i);
  }

  // Source column for each used schema entry, features first then target.
  std::vector<std::size_t> feature_src;
  std::size_t target_src = 0;
  std::vector<std::string> feature_headers;
  for (const auto& c : schema) {
    if (c.kind == ColumnKind::excluded) continue;
    auto it = mapping.find(c.name);
    const std::string& csv_name = it == mapping.end() ? c.name : it->second;
    auto h = header.find(csv_name);
    if (h == header.end()) throw Error(Errc::MissingColumn, "missing column '" + csv_name + "'");
    if (c.kind == ColumnKind::target) {
      target_src = h->second;
    } else {
      feature_src.push_back(h->second);
      feature_headers.push_back(csv_name);
    }
  }

  TabularDataset ds;
  ds.schema = schema;
  ds.rows = Matrix(0, feature_src.size());
  std::vector<double> buffer(feature_src.size());
  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++data_row;
    const auto cells = split_line(line);
    auto cell_value = [&](std::size_t col) {
      if (col >= cells.size())
        throw Error(Errc::ParseError, "row " + std::to_string(data_row) + ": too few cells", data_row, col);
      auto v = parse_real(cells[col]);
      if (!v)
        throw Error(Errc::ParseError,
                    "row " + std::to_string(data_row) + " col " + std::to_string(col) + ": cannot parse '" +
                        std::string(trim(cells[col])) + "'",
                    data_row, col);
      return *v;
    };
    for (std::size_t j = 0; j < feature_src.size(); ++j) buffer[j] = cell_value(feature_src[j]);
    ds.rows.append_row(buffer);
    ds.target.push_back(cell_value(target_src));
  }
  if (data_row == 0) fail(Errc::EmptyFile, "'" + path.string() + "' has no data rows");
  return ds;
}

void write_csv(const std::filesystem::path& path, const TabularDataset& ds) {
  std::ofstream out(path);
  if (!out) fail(Errc::Io, "cannot write '" + path.string() + "'");
  std::vector<std::string> names;
  std::vector<std::ptrdiff_t> source;  // -1 = target
  std::size_t f = 0;
  for (const auto& c : ds.schema) {
    if (c.kind == ColumnKind::excluded) continue;
    names.push_back(c.name);
    source.push_back(c.kind == ColumnKind::target ? -1 : static_cast<std::ptrdiff_t>(f++));
  }
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  char buf[40];
  for (std::size_t r = 0; r < ds.row_count(); ++r) {
    for (std::size_t i = 0; i < source.size(); ++i) {
      const double v = source[i] < 0 ? ds.target[r] : ds.rows(r, static_cast<std::size_t>(source[i]));
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << (i ? "," : "") << buf;
    }
    out << '\n';
  }
}

TabularDataset clean(const TabularDataset& ds, CleanPolicy policy) {
  std::vector<std::size_t> keep;
  keep.reserve(ds.row_count());
  for (std::size_t r = 0; r < ds.row_count(); ++r) {
    bool ok = std::isfinite(ds.target[r]);
    for (double v : ds.rows.row(r)) ok = ok && std::isfinite(v);
    if (ok) {
      keep.push_back(r);
    } else if (policy == CleanPolicy::fail) {
      throw Error(Errc::DirtyData, "non-finite value in row " + std::to_string(r), r);
    }
  }
  if (keep.size() == ds.row_count()) return ds;
  return ds.subset(keep);
}

StandardizationParams fit_standardizer(const TabularDataset& ds) {
  const auto names = ds.feature_names();
  const std::size_t n = ds.row_count();
  if (n == 0) fail(Errc::TooFewRows, "cannot standardize an empty dataset");
  StandardizationParams p;
  p.names = names;
  p.mean.resize(ds.feature_count());
  p.stddev.resize(ds.feature_count());
  for (std::size_t j = 0; j < ds.feature_count(); ++j) {
    double lo = ds.rows(0, j), hi = lo, sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double v = ds.rows(r, j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    if (lo == hi) throw Error(Errc::ConstantColumn, "constant column '" + names[j] + "'");
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double d = ds.rows(r, j) - mean;
      ss += d * d;
    }
    p.mean[j] = mean;
    p.stddev[j] = std::sqrt(ss / static_cast<double>(n));
  }
  return p;
}

namespace {

void check_dims(const TabularDataset& ds, const StandardizationParams& p) {
  if (ds.feature_count() != p.size())
    fail(Errc::DimensionMismatch, "standardizer has " + std::to_string(p.size()) + " features, dataset has " +
                                      std::to_string(ds.feature_count()));
}

}  // namespace

TabularDataset apply_standardizer(const TabularDataset& ds, const StandardizationParams& p) {
  check_dims(ds, p);
  TabularDataset out = ds;
  for (std::size_t r = 0; r < out.row_count(); ++r)
    for (std::size_t j = 0; j < p.size(); ++j) out.rows(r, j) = (out.rows(r, j) - p.mean[j]) / p.stddev[j];
  return out;
}

TabularDataset invert_standardizer(const TabularDataset& ds, const StandardizationParams& p) {
  check_dims(ds, p);
  TabularDataset out = ds;
  for (std::size_t r = 0; r < out.row_count(); ++r)
    for (std::size_t j = 0; j < p.size(); ++j) out.rows(r, j) = out.rows(r, j) * p.stddev[j] + p.mean[j];
  return out;
}

SplitIndices split_train_test(std::size_t n, double train_fraction, std::uint64_t seed, bool shuffle) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    fail(Errc::InvalidConfig, "train_fraction must lie in (0, 1)");
  if (n < 2) fail(Errc::TooFewRows, "need at least 2 rows to split, got " + std::to_string(n));
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train == n)
    fail(Errc::TooFewRows, "split of " + std::to_string(n) + " rows leaves an empty side");

  std::vector<std::size_t> order(n);
  if (shuffle) {
    CounterRng rng(seed, StreamTag::split);
    order = permutation(n, rng);
  } else {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
  }
  SplitIndices s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] != fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::validation_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] == fold) out.push_back(i);
  return out;
}

FoldPlan make_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n)
    fail(Errc::BadK, "k=" + std::to_string(k) + " outside [2, " + std::to_string(n) + "]");
  CounterRng rng(seed, StreamTag::folds);
  const auto order = permutation(n, rng);
  FoldPlan plan;
  plan.k = k;
  plan.assignments.resize(n);
  for (std::size_t i = 0; i < n; ++i) plan.assignments[order[i]] = i % k;
  return plan;
}

TabularDataset synth_generate(std::size_t n_hours, std::uint64_t seed, const SynthCoefficients& coef) {
  if (n_hours < 24) fail(Errc::InvalidConfig, "synthetic dataset needs at least 24 hours");
  using std::numbers::pi;
  namespace col = synth_column;

  TabularDataset ds;
  ds.schema = weather_schema();
  ds.rows = Matrix(n_hours, 7);
  ds.target.resize(n_hours);
  for (std::size_t h = 0; h < n_hours; ++h) {
    const double hd = static_cast<double>(h);
    const auto hod = static_cast<double>(h % 24);
    const double season = std::sin(2.0 * pi * hd / 8760.0);
    const bool daylight = hod > 6.0 && hod < 18.0;
    const double clearsky = daylight ? 1000.0 * std::sin(pi * (hod - 6.0) / 12.0) : 0.0;

    const double temperature = 15.0 + 10.0 * std::sin(pi * (hod - 8.0) / 12.0) + 5.0 * season +
                               counter_normal(seed, h, col::temperature, 0);
    const double humidity = std::clamp(
        60.0 - 0.5 * (temperature - 15.0) + 5.0 * counter_normal(seed, h, col::humidity, 0), 5.0, 100.0);
    const double pressure = 1013.0 + 3.0 * counter_normal(seed, h, col::pressure, 0);
    const double wind_speed = std::abs(3.0 + 2.0 * counter_normal(seed, h, col::wind_speed, 0));
    const double wind_direction = 360.0 * counter_uniform(seed, h, col::wind_direction, 0);
    const double length_of_day = 12.0 + 2.0 * season;

    double irradiance = 0.0;
    if (daylight) {
      const double factor = coef.base + coef.temperature * (temperature - 15.0) + coef.humidity * (humidity - 60.0) +
                            coef.wind_direction * std::cos(wind_direction * pi / 180.0);
      irradiance =
          std::max(0.0, clearsky * factor + coef.noise_sd * counter_normal(seed, h, col::irradiance, 0));
    }

    auto row = ds.rows.row(h);
    row[0] = temperature;
    row[1] = pressure;
    row[2] = humidity;
    row[3] = wind_speed;
    row[4] = wind_direction;
    row[5] = hod;
    row[6] = length_of_day;
    ds.target[h] = irradiance;
  }
  return ds;
}

TabularDataset encode_cyclic(const TabularDataset& ds, const std::string& column) {
  const auto idx = ds.feature_index(column);
  if (!idx) throw Error(Errc::MissingColumn, "missing column '" + column + "'");
  TabularDataset out;
  for (const auto& c : ds.schema) {
    if (c.name == column) {
      out.schema.push_back({column + "_sin", ColumnKind::feature, ""});
      out.schema.push_back({column + "_cos", ColumnKind::feature, ""});
    } else {
      out.schema.push_back(c);
    }
  }
  out.rows = Matrix(ds.row_count(), ds.feature_count() + 1);
  out.target = ds.target;
  for (std::size_t r = 0; r < ds.row_count(); ++r) {
    std::size_t k = 0;
    for (std::size_t j = 0; j < ds.feature_count(); ++j) {
      const double v = ds.rows(r, j);
      if (j == *idx) {
        const double rad = v * std::numbers::pi / 180.0;
        out.rows(r, k++) = std::sin(rad);
        out.rows(r, k++) = std::cos(rad);
      } else {
        out.rows(r, k++) = v;
      }
    }
  }
  return out;
}

TabularDataset add_noise_features(const TabularDataset& ds, std::size_t count, std::uint64_t seed) {
  TabularDataset out;
  out.schema = ds.schema;
  for (std::size_t c = 0; c < count; ++c)
    out.schema.push_back({"noise_" + std::to_string(c), ColumnKind::feature, ""});
  validate_schema(out.schema);
  const std::size_t d = ds.feature_count();
  out.rows = Matrix(ds.row_count(), d + count);
  out.target = ds.target;
  for (std::size_t r = 0; r < ds.row_count(); ++r) {
    for (std::size_t j = 0; j < d; ++j) out.rows(r, j) = ds.rows(r, j);
    for (std::size_t c = 0; c < count; ++c)
      out.rows(r, d + c) = counter_normal(seed, static_cast<std::uint64_t>(StreamTag::noise_features), c, r);
  }
  return out;
}

TabularDataset project_features(const TabularDataset& ds, std::span<const std::string> names) {
  std::vector<std::size_t> idx;
  idx.reserve(names.size());
  for (const auto& n : names) {
    auto j = ds.feature_index(n);
    if (!j) throw Error(Errc::SchemaMismatch, "dataset has no feature '" + n + "'");
    idx.push_back(*j);
  }
  TabularDataset out;
  for (const auto& c : ds.schema)
    if (c.kind != ColumnKind::feature) out.schema.push_back(c);
  for (const auto& n : names) {
    for (const auto& c : ds.schema)
      if (c.kind == ColumnKind::feature && c.name == n) out.schema.push_back(c);
  }
  out.rows = ds.rows.select_cols(idx);
  out.target = ds.target;
  return out;
}

}  // namespace helio
