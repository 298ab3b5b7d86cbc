// SPDX-License-Identifier: Apache-2.0
#include "helio/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "helio/error.hpp"

namespace helio {

namespace {

void check_lengths(std::span<const double> pred, std::span<const double> actual) {
  if (pred.size() != actual.size())
    fail(Errc::LengthMismatch, "metric inputs differ in length (" + std::to_string(pred.size()) + " vs " +
                                   std::to_string(actual.size()) + ")");
  if (pred.empty()) fail(Errc::Empty, "metric inputs are empty");
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::Io, "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

double mae(std::span<const double> pred, std::span<const double> actual) {
  check_lengths(pred, actual);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - actual[i]);
  return s / static_cast<double>(pred.size());
}

double rmse(std::span<const double> pred, std::span<const double> actual) {
  check_lengths(pred, actual);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - actual[i];
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(pred.size()));
}

double r2(std::span<const double> pred, std::span<const double> actual) {
  check_lengths(pred, actual);
  double mean = 0.0;
  for (double a : actual) mean += a;
  mean /= static_cast<double>(actual.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - actual[i];
    const double c = actual[i] - mean;
    ss_res += e * e;
    ss_tot += c * c;
  }
  if (!(ss_tot > 0.0)) fail(Errc::ConstantActual, "r2 undefined for constant actual values");
  return 1.0 - ss_res / ss_tot;
}

MetricsReport score(std::span<const double> pred, std::span<const double> actual) {
  return {mae(pred, actual), rmse(pred, actual), r2(pred, actual), pred.size()};
}

MetricsReport evaluate(const ModelBundle& model, const TabularDataset& ds, const SplitIndices& split) {
  return evaluate(model, ds.subset(split.test));
}

MetricsReport evaluate(const ModelBundle& model, const TabularDataset& ds) {
  const auto pred = model.predict(ds);
  return score(pred, ds.target);
}

ComparisonTable make_table(std::vector<ComparisonRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
    if (a.metrics.rmse != b.metrics.rmse) return a.metrics.rmse < b.metrics.rmse;
    return a.model_name < b.model_name;
  });
  return {std::move(rows)};
}

ComparisonTable compare(std::span<const NamedModel> models, const TabularDataset& ds, const SplitIndices& split) {
  const TabularDataset test = ds.subset(split.test);
  std::vector<ComparisonRow> rows;
  rows.reserve(models.size());
  for (const auto& m : models) {
    try {
      rows.push_back({m.name, evaluate(*m.model, test)});
    } catch (const Error& e) {
      throw e.with_context("model '" + m.name + "'");
    }
  }
  return make_table(std::move(rows));
}

TransferReport transfer_test(const ModelBundle& model, const LabeledDataset& home, const SplitIndices& home_split,
                             std::span<const LabeledDataset> away) {
  TransferReport report;
  report.rows.push_back({home.label, home.distance_note, evaluate(model, home.ds, home_split)});
  for (const auto& loc : away) {
    if (loc.ds.schema != home.ds.schema)
      fail(Errc::SchemaMismatch, "location '" + loc.label + "' does not share the home schema");
    try {
      report.rows.push_back({loc.label, loc.distance_note, evaluate(model, loc.ds)});
    } catch (const Error& e) {
      throw e.with_context("location '" + loc.label + "'");
    }
  }
  return report;
}

void write_comparison_csv(const std::filesystem::path& path, const ComparisonTable& table) {
  auto out = open_out(path);
  out << "model,rmse,mae,r2,n\n";
  for (const auto& r : table.rows)
    out << r.model_name << ',' << num(r.metrics.rmse) << ',' << num(r.metrics.mae) << ',' << num(r.metrics.r2) << ','
        << r.metrics.n << '\n';
}

void write_transfer_csv(const std::filesystem::path& path, const TransferReport& report) {
  auto out = open_out(path);
  out << "location,distance_note,rmse,mae,r2,n\n";
  for (const auto& r : report.rows)
    out << r.label << ',' << r.distance_note << ',' << num(r.metrics.rmse) << ',' << num(r.metrics.mae) << ','
        << num(r.metrics.r2) << ',' << r.metrics.n << '\n';
}

nlohmann::json to_json(const MetricsReport& m) {
  return {{"rmse", m.rmse}, {"mae", m.mae}, {"r2", m.r2}, {"n", m.n}};
}

nlohmann::json to_json(const ComparisonTable& t) {
  auto rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    auto j = to_json(r.metrics);
    j["model"] = r.model_name;
    rows.push_back(std::move(j));
  }
  return {{"rows", std::move(rows)}};
}

nlohmann::json to_json(const TransferReport& t) {
  auto rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    auto j = to_json(r.metrics);
    j["location"] = r.label;
    j["distance_note"] = r.distance_note;
    rows.push_back(std::move(j));
  }
  return {{"rows", std::move(rows)}};
}

}  // namespace helio
