#pragma once
#include <apgda/problem_io.hpp>
#include <apgda/trace.hpp>
#include <string>
#include <vector>

namespace apgda {

inline const char* trace_csv_header = "t,g_value,stat_x,stat_y,wall_time,inner_iters,grad_calls,stat_y_reg";

std::uint64_t iterate_hash(const Vec<double>& theta, const Vec<double>& alpha);

// writes <path> and <path>.meta.json
void write_trace(const RunTrace<double>& trace, const std::string& path);
nlohmann::json trace_meta_json(const RunTrace<double>& trace);

std::vector<TraceRecord<double>> read_trace_csv(const std::string& path);

struct ValidationIssue
{
    std::size_t row;   // 1-based data row; 0 for header / file-level problems
    std::string message;
};

std::vector<ValidationIssue> validate_trace_csv(const std::string& path);

} // namespace apgda
