#include "ilssvm/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ilssvm {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.7g", v);
  return buf;
}

namespace {

constexpr const char* kColumns[] = {"MSE", "PPCC", "R_ID", "R_MSE", "R_SCC", "D_time"};
constexpr bool kHigherIsBetter[] = {false, true, false, false, true, false};

std::vector<const MetricSummary*> summaries(const EvalReport& r) {
  return {&r.mse, &r.ppcc, &r.r_id, &r.r_mse, &r.r_scc, &r.d_time};
}

}  // namespace

std::string benchmark_csv(const std::vector<BenchmarkResult>& results, const std::string& config_hash) {
  std::string out = "# config_hash=" + config_hash + "\n";
  out += "dataset,method,stat";
  for (const char* c : kColumns) out += std::string(",") + c;
  out += "\n";
  for (const auto& res : results) {
    for (const auto& m : res.methods) {
      const auto s = summaries(m.report);
      const char* stats[] = {"mean", "VAR", "STD"};
      for (int k = 0; k < 3; ++k) {
        out += res.dataset + "," + m.method + "," + stats[k];
        for (const auto* sum : s) {
          const double v = k == 0 ? sum->mean : k == 1 ? sum->variance : sum->std;
          out += "," + format_number(v);
        }
        out += "\n";
      }
    }
  }
  return out;
}

std::string benchmark_text(const std::vector<BenchmarkResult>& results, const std::string& config_hash) {
  std::string out = "config_hash " + config_hash + "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %-7s %-5s", "Dataset", "Method", "Stat");
  out += line;
  for (const char* c : kColumns) {
    std::snprintf(line, sizeof line, " %13s", c);
    out += line;
  }
  out += "\n";
  for (const auto& res : results) {
    std::vector<std::size_t> best(6, 0);
    for (std::size_t c = 0; c < 6; ++c) {
      for (std::size_t m = 1; m < res.methods.size(); ++m) {
        const double cand = summaries(res.methods[m].report)[c]->mean;
        const double cur = summaries(res.methods[best[c]].report)[c]->mean;
        if (kHigherIsBetter[c] ? cand > cur : cand < cur) best[c] = m;
      }
    }
    for (std::size_t m = 0; m < res.methods.size(); ++m) {
      const auto s = summaries(res.methods[m].report);
      const char* stats[] = {"mean", "VAR", "STD"};
      for (int k = 0; k < 3; ++k) {
        std::snprintf(line, sizeof line, "%-10s %-7s %-5s", m == 0 && k == 0 ? res.dataset.c_str() : "",
                      k == 0 ? res.methods[m].method.c_str() : "", stats[k]);
        out += line;
        for (std::size_t c = 0; c < 6; ++c) {
          const double v = k == 0 ? s[c]->mean : k == 1 ? s[c]->variance : s[c]->std;
          std::string cell = format_number(v);
          if (k == 0 && best[c] == m && res.methods.size() > 1) cell += "*";
          std::snprintf(line, sizeof line, " %13s", cell.c_str());
          out += line;
        }
        out += "\n";
      }
    }
  }
  return out;
}

std::string interp_fit_csv(const std::vector<InterpFitRow>& rows, const std::string& config_hash) {
  std::string out = "# config_hash=" + config_hash + "\n";
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.runs.size());
  out += "dataset";
  for (std::size_t i = 1; i <= width; ++i) out += "," + std::to_string(i);
  out += ",Average\n";
  for (const auto& r : rows) {
    out += r.dataset;
    for (std::size_t i = 0; i < width; ++i) out += "," + (i < r.runs.size() ? format_number(r.runs[i]) : "");
    out += "," + format_number(r.average) + "\n";
  }
  return out;
}

std::string bounds_csv(const std::vector<BoundRow>& rows, const std::string& config_hash) {
  std::string out = "# config_hash=" + config_hash + "\n";
  out += "m,delta,theta_star,sample_error,total_bound\n";
  for (const auto& r : rows) {
    out += format_number(r.m) + "," + format_number(r.delta) + "," + format_number(r.theta_star) + "," +
           format_number(r.sample_error) + "," + format_number(r.total) + "\n";
  }
  return out;
}

}  // namespace ilssvm
