// SPDX-License-Identifier: Apache-2.0
#include "helio/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "helio/error.hpp"

namespace helio {

namespace {

bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
}

// Indices of entries ordered by descending |pcc|; stable, so ties keep schema order.
std::vector<std::size_t> rank_by_magnitude(const CorrelationReport& report) {
  std::vector<std::size_t> order(report.entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(report.entries[a].pcc) > std::abs(report.entries[b].pcc);
  });
  return order;
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    fail(Errc::LengthMismatch, "pearson: lengths " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
  if (x.size() < 2) fail(Errc::LengthMismatch, "pearson: need at least 2 samples");
  if (is_constant(x) || is_constant(y)) fail(Errc::ConstantVector, "pearson: constant input");

  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

CorrelationReport correlation_report(const TabularDataset& ds) {
  if (ds.row_count() < 2) fail(Errc::TooFewRows, "correlation report needs at least 2 rows");
  CorrelationReport report;
  const auto names = ds.feature_names();
  const bool target_constant = is_constant(ds.target);
  for (std::size_t j = 0; j < ds.feature_count(); ++j) {
    const auto column = ds.rows.column(j);
    CorrelationEntry e{names[j], 0.0, false};
    if (target_constant || is_constant(column)) {
      e.constant = true;
    } else {
      e.pcc = pearson(column, ds.target);
    }
    report.entries.push_back(std::move(e));
  }
  return report;
}

void write_correlation_csv(const std::filesystem::path& path, const CorrelationReport& report) {
  std::ofstream out(path);
  if (!out) fail(Errc::Io, "cannot write '" + path.string() + "'");
  out << "feature,pcc\n";
  char buf[40];
  for (auto i : rank_by_magnitude(report)) {
    std::snprintf(buf, sizeof buf, "%.17g", report.entries[i].pcc);
    out << report.entries[i].name << ',' << buf << '\n';
  }
}

FeatureSelection select_features(const CorrelationReport& report, const SelectionRule& rule) {
  const auto order = rank_by_magnitude(report);
  FeatureSelection sel;
  sel.rule = rule;
  if (const auto* th = std::get_if<ThresholdRule>(&rule)) {
    if (!(th->t > 0.0 && th->t < 1.0)) fail(Errc::InvalidConfig, "threshold must lie in (0, 1)");
    for (auto i : order)
      if (std::abs(report.entries[i].pcc) >= th->t) sel.selected.push_back(report.entries[i].name);
    if (sel.selected.empty()) fail(Errc::EmptySelection, "no feature reaches |pcc| >= " + std::to_string(th->t));
  } else {
    const auto k = std::get<TopKRule>(rule).k;
    if (k < 1 || k > order.size())
      fail(Errc::InvalidConfig, "top_k must lie in [1, " + std::to_string(order.size()) + "]");
    for (std::size_t i = 0; i < k; ++i) sel.selected.push_back(report.entries[order[i]].name);
  }
  return sel;
}

}  // namespace helio
