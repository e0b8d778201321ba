#pragma once

#include "concentra/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>

namespace concentra::stats {

// The seven window statistics, in their canonical feature order.
struct StatVector {
  double mean = 0;
  double median = 0;
  double std = 0;
  double max = 0;
  double min = 0;
  double iqr = 0;
  double rms = 0;
};

constexpr int kStatCount = 7;
constexpr std::array<std::string_view, kStatCount> kStatNames = {
    "mean", "median", "std", "max", "min", "iqr", "rms",
};

inline double stat_by_index(const StatVector& s, int i) {
  switch (i) {
    case 0: return s.mean;
    case 1: return s.median;
    case 2: return s.std;
    case 3: return s.max;
    case 4: return s.min;
    case 5: return s.iqr;
    default: return s.rms;
  }
}

// Linear-interpolation quantile at position q*(n-1) on an ascending sequence.
template <typename Derived>
double quantile_sorted(const Eigen::DenseBase<Derived>& sorted, double q) {
  const Eigen::Index n = sorted.size();
  if (n == 1) return static_cast<double>(sorted(0));
  const double pos = q * static_cast<double>(n - 1);
  const auto lo = static_cast<Eigen::Index>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= n) return static_cast<double>(sorted(n - 1));
  return static_cast<double>(sorted(lo)) + frac * (static_cast<double>(sorted(lo + 1)) - static_cast<double>(sorted(lo)));
}

template <typename Derived>
double mean(const Eigen::DenseBase<Derived>& v) {
  return v.derived().template cast<double>().mean();
}

// Population standard deviation (divisor n).
template <typename Derived>
double stddev_pop(const Eigen::DenseBase<Derived>& v) {
  const auto& d = v.derived();
  const double m = mean(v);
  const double var = (d.template cast<double>().array() - m).square().sum() / static_cast<double>(d.size());
  return std::sqrt(std::max(var, 0.0));
}

template <typename Derived>
double rms(const Eigen::DenseBase<Derived>& v) {
  const auto& d = v.derived();
  return std::sqrt(d.template cast<double>().array().square().sum() / static_cast<double>(d.size()));
}

// All seven statistics of a non-empty, finite sequence.
// Throws ContractError on empty or non-finite input.
template <typename Derived>
StatVector extract_stats(const Eigen::DenseBase<Derived>& v) {
  const auto& d = v.derived();
  if (d.size() == 0) throw ContractError("extract_stats: empty input");
  if (!d.template cast<double>().allFinite()) throw ContractError("extract_stats: non-finite input");

  StatVector s;
  s.mean = mean(v);
  s.std = stddev_pop(v);
  s.rms = rms(v);
  s.max = static_cast<double>(d.maxCoeff());
  s.min = static_cast<double>(d.minCoeff());

  Vector sorted = d.template cast<double>();
  std::sort(sorted.data(), sorted.data() + sorted.size());
  s.median = quantile_sorted(sorted, 0.5);
  s.iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  return s;
}

// Five-number summary on an already materialized vector (analytics helpers).
struct FiveNumber {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

template <typename Derived>
FiveNumber five_number(const Eigen::DenseBase<Derived>& v) {
  Vector sorted = v.derived().template cast<double>();
  if (sorted.size() == 0) throw ContractError("five_number: empty input");
  std::sort(sorted.data(), sorted.data() + sorted.size());
  FiveNumber f;
  f.min = sorted(0);
  f.max = sorted(sorted.size() - 1);
  f.q1 = quantile_sorted(sorted, 0.25);
  f.median = quantile_sorted(sorted, 0.5);
  f.q3 = quantile_sorted(sorted, 0.75);
  return f;
}

// Pearson product-moment correlation. Lengths must match and be >= 2; returns
// false (undefined) when either variance is zero.
template <typename DerivedX, typename DerivedY>
bool pearson(const Eigen::DenseBase<DerivedX>& x, const Eigen::DenseBase<DerivedY>& y, double& r) {
  if (x.size() != y.size()) throw ContractError("pearson: length mismatch");
  if (x.size() < 2) throw ContractError("pearson: need at least 2 samples");
  const Eigen::ArrayXd xa = x.derived().template cast<double>().array() - mean(x);
  const Eigen::ArrayXd ya = y.derived().template cast<double>().array() - mean(y);
  const double sxx = (xa * xa).sum();
  const double syy = (ya * ya).sum();
  if (sxx <= 0.0 || syy <= 0.0) return false;
  r = (xa * ya).sum() / std::sqrt(sxx * syy);
  return true;
}

}  // namespace concentra::stats
