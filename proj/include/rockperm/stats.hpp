#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rockperm::stats {

double mean(std::span<const double> t);

/// Sample standard deviation with the N-1 denominator. Throws StatisticsError for N < 2.
double standard_deviation(std::span<const double> t);

/// 1 - SS_res / SS_tot for targets t and predictions y.
double r_squared(std::span<const double> targets, std::span<const double> predictions);

double mean_squared_error(std::span<const double> targets, std::span<const double> predictions);

/// Element-wise log10; throws StatisticsError on non-positive entries.
std::vector<double> log10_of(std::span<const double> v);

struct Histogram {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max]; the maximum falls into the last bin.
Histogram histogram(std::span<const double> v, std::size_t bins);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double sigma = 0.0;
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(std::span<const double> v);

}  // namespace rockperm::stats
