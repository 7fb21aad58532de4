#pragma once

#include <string>
#include <vector>

#include "fedce/engine.hpp"
#include "fedce/theory_checks.hpp"

namespace fedce {

// CSV number format: '.' decimal, no thousands separators, 12 significant
// digits.
std::string format_number(double v);

// Little-endian binary checkpoint: 16-byte header (magic "FCPV", u32
// version, u64 dimension) followed by d float64 values.
void write_param_vector(const std::string& path, const ParamVector& w);
ParamVector read_param_vector(const std::string& path);

void write_rounds_csv(const std::string& path, const std::vector<RoundClientLog>& logs);

void write_contributions_json(const std::string& path, const RunResult& result);

void write_freerider_csv(const std::string& path, const std::vector<RoundClientLog>& logs);

void write_rho_trace_csv(const std::string& path, const std::vector<RhoTraceRow>& rows);

struct ConvergenceRow {
  int round = 0;
  std::string algorithm;
  uint64_t seed = 0;
  double mean_val_score = 0.0;
};
void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows);

}  // namespace fedce
