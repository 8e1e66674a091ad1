#pragma once

#include <string>
#include <vector>

#include "ilssvm/bounds.hpp"
#include "ilssvm/experiment.hpp"

namespace ilssvm {

// Numbers in reports carry 7 significant digits.
std::string format_number(double v);

// dataset,method,stat,MSE,PPCC,R_ID,R_MSE,R_SCC,D_time with one mean, VAR and
// STD row per method. The first line is a "# config_hash=..." comment.
std::string benchmark_csv(const std::vector<BenchmarkResult>& results, const std::string& config_hash);

// Aligned text version; the best mean per column and dataset is marked with
// '*' (lowest for MSE, R_ID, R_MSE, D_time; highest for PPCC, R_SCC).
std::string benchmark_text(const std::vector<BenchmarkResult>& results, const std::string& config_hash);

// dataset,1..k,Average
std::string interp_fit_csv(const std::vector<InterpFitRow>& rows, const std::string& config_hash);

// m,delta,theta_star,sample_error,total_bound
std::string bounds_csv(const std::vector<BoundRow>& rows, const std::string& config_hash);

}  // namespace ilssvm
