#include "ilssvm/metrics.hpp"

#include <cmath>
#include <string>

#include "ilssvm/error.hpp"

namespace ilssvm {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size())
    throw InvalidArgument(std::string(what) + ": length mismatch (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  if (a.empty()) throw InvalidArgument(std::string(what) + ": empty input");
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double mse(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b, "mse");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

double ppcc(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b, "ppcc");
  if (a.size() < 2) throw InvalidArgument("ppcc: need at least 2 samples");
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double da = a[k] - ma;
    const double db = b[k] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw InvalidArgument("ppcc: correlation undefined for a constant input");
  const double r = sab / std::sqrt(saa * sbb);
  return std::fmax(-1.0, std::fmin(1.0, r));
}

MetricSummary summarize(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("summarize: empty list");
  MetricSummary s;
  s.per_run.assign(values.begin(), values.end());
  s.mean = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.variance = ss / static_cast<double>(values.size());
  s.std = std::sqrt(s.variance);
  return s;
}

}  // namespace ilssvm
