#include <apgda/trace_io.hpp>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace apgda {

using nlohmann::json;

std::uint64_t iterate_hash(const Vec<double>& theta, const Vec<double>& alpha)
{
    std::string bytes;
    bytes.resize(static_cast<std::size_t>(theta.size() + alpha.size()) * sizeof(double));
    std::memcpy(bytes.data(), theta.data(), static_cast<std::size_t>(theta.size()) * sizeof(double));
    std::memcpy(bytes.data() + static_cast<std::size_t>(theta.size()) * sizeof(double), alpha.data(),
                static_cast<std::size_t>(alpha.size()) * sizeof(double));
    return fnv1a(bytes);
}

json trace_meta_json(const RunTrace<double>& tr)
{
    json j;
    j["schema_version"] = 1;
    j["algorithm"] = tr.algorithm;
    j["columns"] = trace_csv_header;
    j["rows"] = tr.records.size();
    j["stop_reason"] = tr.stop_reason;
    j["converged"] = tr.converged;
    j["first_converged"] = tr.first_converged;
    j["tolerance"] = tr.tolerance;
    j["best_index"] = tr.best_index;
    j["grad_calls"] = tr.grad_calls;
    j["start_hash"] = hex64(iterate_hash(tr.start.theta, tr.start.alpha));
    j["metadata"] = tr.metadata;
    if (tr.best_index >= 0) {
        j["best"] = {{"theta", vector_to_json(tr.best.theta)}, {"alpha", vector_to_json(tr.best.alpha)}};
    }
    return j;
}

void write_trace(const RunTrace<double>& tr, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << trace_csv_header << '\n';
    for (const auto& r : tr.records) {
        out << r.t << ',' << format_double(r.g_value) << ',' << format_double(r.stat_x) << ','
            << format_double(r.stat_y) << ',' << format_double(r.wall_time) << ',' << r.inner_iters << ','
            << r.grad_calls << ',' << format_double(r.stat_y_reg) << '\n';
    }
    std::ofstream meta(path + ".meta.json");
    if (!meta) throw std::runtime_error("cannot write " + path + ".meta.json");
    meta << trace_meta_json(tr).dump(1) << '\n';
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_real(const std::string& s, double& v)
{
    if (s.empty()) return false;
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

bool parse_int(const std::string& s, std::int64_t& v)
{
    if (s.empty()) return false;
    char* end = nullptr;
    v = std::strtoll(s.c_str(), &end, 10);
    return end == s.c_str() + s.size();
}

std::string strip_cr(std::string s)
{
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

} // namespace

std::vector<ValidationIssue> validate_trace_csv(const std::string& path)
{
    std::vector<ValidationIssue> issues;
    std::ifstream in(path);
    if (!in) return {{0, "cannot open " + path}};
    std::string line;
    if (!std::getline(in, line)) return {{0, "empty file"}};
    if (strip_cr(line) != trace_csv_header) {
        issues.push_back({0, "header mismatch: expected '" + std::string(trace_csv_header) + "'"});
        return issues;
    }
    static const char* names[] = {"t", "g_value", "stat_x", "stat_y", "wall_time", "inner_iters", "grad_calls",
                                  "stat_y_reg"};
    std::size_t row = 0;
    std::int64_t prev_t = -1, prev_calls = -1;
    double prev_time = -1;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        ++row;
        if (line.empty()) {
            issues.push_back({row, "empty line"});
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != 8) {
            issues.push_back({row, "expected 8 fields, found " + std::to_string(cells.size())});
            continue;
        }
        std::int64_t t = 0, inner = 0, calls = 0;
        double v[8] = {};
        bool ok = true;
        for (int c = 0; c < 8; ++c) {
            const bool integer = c == 0 || c == 5 || c == 6;
            bool parsed;
            if (integer) {
                std::int64_t iv = 0;
                parsed = parse_int(cells[static_cast<std::size_t>(c)], iv);
                v[c] = static_cast<double>(iv);
                if (c == 0) t = iv;
                if (c == 5) inner = iv;
                if (c == 6) calls = iv;
            } else {
                parsed = parse_real(cells[static_cast<std::size_t>(c)], v[c]);
            }
            if (!parsed) {
                issues.push_back({row, std::string("column ") + names[c] + ": cannot parse '" +
                                           cells[static_cast<std::size_t>(c)] + "'"});
                ok = false;
            } else if (!std::isfinite(v[c])) {
                issues.push_back({row, std::string("column ") + names[c] + ": non-finite value"});
                ok = false;
            }
        }
        if (!ok) continue;
        if (t != prev_t + 1) issues.push_back({row, "t is not consecutive"});
        for (int c : {2, 3, 7}) {
            if (v[c] < 0) issues.push_back({row, std::string("column ") + names[c] + ": negative measure"});
        }
        if (inner < 0) issues.push_back({row, "inner_iters is negative"});
        if (calls < prev_calls) issues.push_back({row, "grad_calls decreased"});
        if (v[4] < prev_time) issues.push_back({row, "wall_time decreased"});
        prev_t = t;
        prev_calls = calls;
        prev_time = v[4];
    }
    if (row == 0) issues.push_back({0, "no data rows"});
    return issues;
}

std::vector<TraceRecord<double>> read_trace_csv(const std::string& path)
{
    const auto issues = validate_trace_csv(path);
    if (!issues.empty()) {
        throw std::invalid_argument(path + ": row " + std::to_string(issues.front().row) + ": " +
                                    issues.front().message);
    }
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    std::vector<TraceRecord<double>> out;
    while (std::getline(in, line)) {
        const auto c = split(strip_cr(line));
        TraceRecord<double> r;
        r.t = std::stoll(c[0]);
        r.g_value = std::strtod(c[1].c_str(), nullptr);
        r.stat_x = std::strtod(c[2].c_str(), nullptr);
        r.stat_y = std::strtod(c[3].c_str(), nullptr);
        r.wall_time = std::strtod(c[4].c_str(), nullptr);
        r.inner_iters = std::stoll(c[5]);
        r.grad_calls = std::stoll(c[6]);
        r.stat_y_reg = std::strtod(c[7].c_str(), nullptr);
        out.push_back(r);
    }
    return out;
}

} // namespace apgda
