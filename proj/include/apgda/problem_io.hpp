#pragma once
#include <apgda/games.hpp>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace apgda {

inline constexpr int problem_schema_version = 1;

nlohmann::json problem_to_json(const ProblemData& data);
ProblemData problem_from_json(const nlohmann::json& j);

void save_problem(const ProblemData& data, const std::string& path);
ProblemData load_problem(const std::string& path);

std::uint64_t fnv1a(const std::string& bytes);
std::uint64_t problem_hash(const ProblemData& data);
std::string hex64(std::uint64_t v);

nlohmann::json constants_to_json(const ProblemConstants<double>& c);
ProblemConstants<double> constants_from_json(const nlohmann::json& j);

nlohmann::json vector_to_json(const Vec<double>& v);
Vec<double> vector_from_json(const nlohmann::json& j);

// exact text form of a double (round-trips)
std::string format_double(double v);

} // namespace apgda
