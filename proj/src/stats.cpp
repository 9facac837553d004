#include "rockperm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rockperm/errors.hpp"

namespace rockperm::stats {

namespace {

void check_paired(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw StatisticsError("targets and predictions differ in length");
  if (t.empty()) throw StatisticsError("empty target vector");
}

}  // namespace

double mean(std::span<const double> t) {
  if (t.empty()) throw StatisticsError("mean of an empty vector");
  double s = 0;
  for (double v : t) s += v;
  return s / static_cast<double>(t.size());
}

double standard_deviation(std::span<const double> t) {
  if (t.size() < 2) throw StatisticsError("standard deviation needs N >= 2, got " + std::to_string(t.size()));
  const double m = mean(t);
  double s = 0;
  for (double v : t) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(t.size() - 1));
}

double r_squared(std::span<const double> targets, std::span<const double> predictions) {
  check_paired(targets, predictions);
  const double m = mean(targets);
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    ss_res += (targets[i] - predictions[i]) * (targets[i] - predictions[i]);
    ss_tot += (targets[i] - m) * (targets[i] - m);
  }
  if (ss_tot == 0) throw StatisticsError("R^2 undefined for constant targets");
  return 1.0 - ss_res / ss_tot;
}

double mean_squared_error(std::span<const double> targets, std::span<const double> predictions) {
  check_paired(targets, predictions);
  double s = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) s += (targets[i] - predictions[i]) * (targets[i] - predictions[i]);
  return s / static_cast<double>(targets.size());
}

std::vector<double> log10_of(std::span<const double> v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) {
    if (!(x > 0)) throw StatisticsError("log10 of non-positive value");
    out.push_back(std::log10(x));
  }
  return out;
}

Histogram histogram(std::span<const double> v, std::size_t bins) {
  if (v.empty() || bins == 0) throw StatisticsError("histogram needs data and at least one bin");
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  Histogram h{*lo, *hi, std::vector<std::size_t>(bins, 0)};
  const double width = (h.upper - h.lower) / static_cast<double>(bins);
  for (double x : v) {
    std::size_t b = width > 0 ? static_cast<std::size_t>((x - h.lower) / width) : 0;
    h.counts[std::min(b, bins - 1)]++;
  }
  return h;
}

Summary summarize(std::span<const double> v) {
  Summary s;
  s.count = v.size();
  s.mean = mean(v);
  s.sigma = standard_deviation(v);
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

}  // namespace rockperm::stats
