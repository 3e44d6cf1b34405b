#include <apgda/problem_io.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace apgda {

using nlohmann::json;

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json constants_to_json(const ProblemConstants<double>& c)
{
    return {{"l11", c.l11},           {"l22", c.l22},     {"l12", c.l12},     {"sigma", c.sigma},
            {"radius_r", c.radius_r}, {"lp", c.lp},       {"delta_gap", c.delta_gap},
            {"d_gap", c.d_gap},       {"g_max", c.g_max}, {"radius_estimated", c.radius_estimated}};
}

ProblemConstants<double> constants_from_json(const json& j)
{
    ProblemConstants<double> c;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k == "radius_estimated") {
            c.radius_estimated = it->get<bool>();
            continue;
        }
        const double v = it->get<double>();
        if (k == "l11") c.l11 = v;
        else if (k == "l22") c.l22 = v;
        else if (k == "l12") c.l12 = v;
        else if (k == "sigma") c.sigma = v;
        else if (k == "radius_r") c.radius_r = v;
        else if (k == "lp") c.lp = v;
        else if (k == "delta_gap") c.delta_gap = v;
        else if (k == "d_gap") c.d_gap = v;
        else if (k == "g_max") c.g_max = v;
        else throw std::invalid_argument("constants: unknown key '" + k + "'");
    }
    c.validate();
    return c;
}

json vector_to_json(const Vec<double>& v)
{
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vec<double> vector_from_json(const json& j)
{
    const auto s = j.get<std::vector<double>>();
    return Eigen::Map<const Vec<double>>(s.data(), static_cast<Index>(s.size()));
}

namespace {

json matrix_to_json(const Mat<double>& m)
{
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index k = 0; k < m.cols(); ++k) data.push_back(m(i, k));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Mat<double> matrix_from_json(const json& j)
{
    const auto rows = j.at("rows").get<Index>();
    const auto cols = j.at("cols").get<Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || static_cast<Index>(data.size()) != rows * cols) {
        throw std::invalid_argument("matrix: data length does not match rows*cols");
    }
    Mat<double> m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index k = 0; k < cols; ++k) m(i, k) = data[static_cast<std::size_t>(i * cols + k)];
    if (!m.allFinite()) throw std::invalid_argument("matrix: non-finite entries");
    return m;
}

} // namespace

json problem_to_json(const ProblemData& d)
{
    json mats = json::object();
    for (const auto& [name, m] : d.matrices) mats[name] = matrix_to_json(m);
    return {{"schema_version", problem_schema_version},
            {"kind", d.kind},
            {"seed", d.seed},
            {"dims", {{"d_theta", d.d_theta}, {"d_alpha", d.d_alpha}}},
            {"params", d.params},
            {"constants", constants_to_json(d.constants)},
            {"matrices", mats}};
}

ProblemData problem_from_json(const json& j)
{
    static const std::vector<std::string> keys = {"schema_version", "kind", "seed", "dims",
                                                  "params", "constants", "matrices"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
            throw std::invalid_argument("problem file: unknown key '" + it.key() + "'");
        }
    }
    if (j.at("schema_version").get<int>() != problem_schema_version) {
        throw std::invalid_argument("problem file: unsupported schema_version");
    }
    ProblemData d;
    d.kind = j.at("kind").get<std::string>();
    d.seed = j.value("seed", std::uint64_t{0});
    d.d_theta = j.at("dims").at("d_theta").get<Index>();
    d.d_alpha = j.at("dims").at("d_alpha").get<Index>();
    if (j.contains("params")) d.params = j.at("params").get<std::map<std::string, double>>();
    d.constants = constants_from_json(j.at("constants"));
    if (j.contains("matrices")) {
        for (auto it = j.at("matrices").begin(); it != j.at("matrices").end(); ++it) {
            d.matrices[it.key()] = matrix_from_json(*it);
        }
    }
    return d;
}

void save_problem(const ProblemData& data, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << problem_to_json(data).dump(1) << '\n';
}

ProblemData load_problem(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read problem file " + path);
    try {
        json j;
        in >> j;
        return problem_from_json(j);
    } catch (const json::exception& e) {
        throw std::invalid_argument("problem file " + path + ": " + e.what());
    }
}

std::uint64_t problem_hash(const ProblemData& data)
{
    return fnv1a(problem_to_json(data).dump());
}

} // namespace apgda
