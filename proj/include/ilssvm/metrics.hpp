#pragma once

#include <span>
#include <vector>

#include "ilssvm/types.hpp"

namespace ilssvm {

struct MetricSummary {
  double mean = 0.0;
  double variance = 0.0;  // population (1/n)
  double std = 0.0;
  std::vector<double> per_run;
};

double mse(std::span<const double> a, std::span<const double> b);

// Pearson product-moment correlation. Throws InvalidArgument when either
// input is constant or shorter than 2.
double ppcc(std::span<const double> a, std::span<const double> b);

inline double mse(const Vector& a, const Vector& b) {
  return mse(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
             std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}
inline double ppcc(const Vector& a, const Vector& b) {
  return ppcc(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
              std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}

MetricSummary summarize(std::span<const double> values);

}  // namespace ilssvm
