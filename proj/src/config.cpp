#include <apgda/config.hpp>
#include <apgda/problem_io.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>

namespace apgda {

using nlohmann::json;

namespace {

double as_real(const json& v, const std::string& key)
{
    if (!v.is_number()) throw std::invalid_argument("config key " + key + ": expected a number");
    return v.get<double>();
}

std::int64_t as_int(const json& v, const std::string& key)
{
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d == std::floor(d) && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
    }
    throw std::invalid_argument("config key " + key + ": expected an integer");
}

bool as_bool(const json& v, const std::string& key)
{
    if (!v.is_boolean()) throw std::invalid_argument("config key " + key + ": expected true or false");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& key)
{
    if (!v.is_string()) throw std::invalid_argument("config key " + key + ": expected a string");
    return v.get<std::string>();
}

std::vector<double> as_real_list(const json& v, const std::string& key)
{
    if (!v.is_array()) throw std::invalid_argument("config key " + key + ": expected a list of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_real(e, key));
    return out;
}

std::vector<std::string> as_string_list(const json& v, const std::string& key)
{
    if (v.is_string()) {
        // comma-separated shorthand
        std::vector<std::string> out;
        std::string s = v.get<std::string>(), cur;
        for (char ch : s + ",") {
            if (ch == ',') {
                if (!cur.empty()) out.push_back(cur);
                cur.clear();
            } else if (ch != ' ') {
                cur += ch;
            }
        }
        return out;
    }
    if (!v.is_array()) throw std::invalid_argument("config key " + key + ": expected a list of strings");
    std::vector<std::string> out;
    for (const auto& e : v) out.push_back(as_string(e, key));
    return out;
}

template <class T>
ConfigKey key_real(std::string name, T Config::*section, double T::*field)
{
    return {name, "real",
            [=](Config& c, const json& v) { (c.*section).*field = as_real(v, name); },
            [=](const Config& c) { return json((c.*section).*field); }};
}

template <class T>
ConfigKey key_int(std::string name, T Config::*section, std::int64_t T::*field)
{
    return {name, "int",
            [=](Config& c, const json& v) { (c.*section).*field = as_int(v, name); },
            [=](const Config& c) { return json((c.*section).*field); }};
}

template <class T>
ConfigKey key_seed(std::string name, T Config::*section, std::uint64_t T::*field)
{
    return {name, "int",
            [=](Config& c, const json& v) {
                const auto s = as_int(v, name);
                if (s < 0) throw std::invalid_argument("config key " + name + ": seed must be nonnegative");
                (c.*section).*field = static_cast<std::uint64_t>(s);
            },
            [=](const Config& c) { return json((c.*section).*field); }};
}

template <class T>
ConfigKey key_bool(std::string name, T Config::*section, bool T::*field)
{
    return {name, "bool",
            [=](Config& c, const json& v) { (c.*section).*field = as_bool(v, name); },
            [=](const Config& c) { return json((c.*section).*field); }};
}

template <class T>
ConfigKey key_string(std::string name, T Config::*section, std::string T::*field)
{
    return {name, "string",
            [=](Config& c, const json& v) { (c.*section).*field = as_string(v, name); },
            [=](const Config& c) { return json((c.*section).*field); }};
}

template <class T>
ConfigKey key_reals(std::string name, T Config::*section, std::vector<double> T::*field)
{
    return {name, "real_list",
            [=](Config& c, const json& v) { (c.*section).*field = as_real_list(v, name); },
            [=](const Config& c) { return json((c.*section).*field); }};
}

template <class T>
ConfigKey key_strings(std::string name, T Config::*section, std::vector<std::string> T::*field)
{
    return {name, "string_list",
            [=](Config& c, const json& v) { (c.*section).*field = as_string_list(v, name); },
            [=](const Config& c) { return json((c.*section).*field); }};
}

std::vector<ConfigKey> build_keys()
{
    using P = ProblemSpec;
    using S = SolverSection;
    using E = ExperimentSpec;
    constexpr auto p = &Config::problem;
    constexpr auto s = &Config::solver;
    constexpr auto e = &Config::experiment;
    return {
        key_string("problem.kind", p, &P::kind),
        key_string("problem.path", p, &P::path),
        key_seed("problem.seed", p, &P::seed),
        key_int("problem.d_theta", p, &P::d_theta),
        key_int("problem.d_alpha", p, &P::d_alpha),
        key_real("problem.sigma", p, &P::sigma),
        key_real("problem.tau", p, &P::tau),
        key_real("problem.radius", p, &P::radius),
        key_bool("problem.zero_linear", p, &P::zero_linear),
        key_bool("problem.bilinear", p, &P::bilinear),
        key_int("problem.m", p, &P::m),
        key_int("problem.n", p, &P::n),
        key_int("problem.sparsity", p, &P::sparsity),
        key_real("problem.xi", p, &P::xi),
        key_real("problem.delta", p, &P::delta),
        key_real("problem.noise_std", p, &P::noise_std),
        key_real("problem.a", p, &P::a),
        key_real("problem.c", p, &P::c),
        key_real("problem.half_width", p, &P::half_width),

        key_real("solver.epsilon", s, &S::epsilon),
        key_string("solver.regime", s, &S::regime),
        key_bool("solver.strict", s, &S::strict),
        key_string("solver.start", s, &S::start),
        key_reals("solver.theta0", s, &S::theta0),
        key_reals("solver.alpha0", s, &S::alpha0),
        key_real("solver.eta1", s, &S::eta1),
        key_real("solver.eta2", s, &S::eta2),
        key_int("solver.n_restart", s, &S::n_restart),
        key_int("solver.k_inner", s, &S::k_inner),
        key_int("solver.t_outer", s, &S::t_outer),
        key_real("solver.lambda", s, &S::lambda),
        key_reals("solver.alpha_hat", s, &S::alpha_hat),
        key_real("solver.delta_gap", s, &S::delta_gap),
        key_real("solver.d_gap", s, &S::d_gap),
        key_real("solver.g_max", s, &S::g_max),
        key_int("solver.max_iterations", s, &S::max_iterations),
        key_real("solver.max_seconds", s, &S::max_seconds),
        key_real("solver.tolerance", s, &S::tolerance),
        key_real("solver.inner_tolerance", s, &S::inner_tolerance),

        key_int("experiment.m", e, &E::m),
        key_int("experiment.n", e, &E::n),
        key_int("experiment.sparsity", e, &E::sparsity),
        key_real("experiment.xi", e, &E::xi),
        key_real("experiment.delta", e, &E::delta),
        key_real("experiment.noise_std", e, &E::noise_std),
        key_strings("experiment.algorithms", e, &E::algorithms),
        key_int("experiment.n_trials", e, &E::n_trials),
        key_real("experiment.threshold", e, &E::threshold),
        key_seed("experiment.seed0", e, &E::seed0),
        key_int("experiment.budget_iters", e, &E::budget_iters),
        key_real("experiment.budget_seconds", e, &E::budget_seconds),
        key_string("experiment.pa_outer_step", e, &E::pa_outer_step),
        key_real("experiment.pda_step_theta", e, &E::pda_step_theta),
        key_real("experiment.pda_step_alpha", e, &E::pda_step_alpha),
        key_string("experiment.pda_schedule", e, &E::pda_schedule),
        key_real("experiment.sda_step_theta", e, &E::sda_step_theta),
        key_real("experiment.sda_step_alpha", e, &E::sda_step_alpha),
        key_string("experiment.sda_schedule", e, &E::sda_schedule),
        key_int("experiment.workers", e, &E::workers),
        key_int("experiment.figure_trial", e, &E::figure_trial),
        key_int("experiment.figure_max_iterations", e, &E::figure_max_iterations),
        key_bool("experiment.keep_traces", e, &E::keep_traces),
    };
}

const ConfigKey& find_key(const std::string& name)
{
    const auto& keys = config_keys();
    auto it = std::find_if(keys.begin(), keys.end(), [&](const ConfigKey& k) { return k.name == name; });
    if (it == keys.end()) throw std::invalid_argument("unknown config key '" + name + "'");
    return *it;
}

} // namespace

const std::vector<ConfigKey>& config_keys()
{
    static const std::vector<ConfigKey> keys = build_keys();
    return keys;
}

void ExperimentSpec::validate() const
{
    if (n_trials < 1) throw std::invalid_argument("experiment: n_trials must be >= 1");
    if (!(threshold > 0)) throw std::invalid_argument("experiment: threshold must be positive");
    if (budget_iters < 1) throw std::invalid_argument("experiment: budget_iters must be >= 1");
    if (!(budget_seconds > 0)) throw std::invalid_argument("experiment: budget_seconds must be positive");
    if (algorithms.empty()) throw std::invalid_argument("experiment: algorithms must not be empty");
    for (const auto& a : algorithms) {
        if (a != "PA" && a != "SDA" && a != "PDA") throw std::invalid_argument("experiment: unknown algorithm '" + a + "'");
    }
    if (pa_outer_step != "matched" && pa_outer_step != "theory") {
        throw std::invalid_argument("experiment: pa_outer_step must be 'matched' or 'theory'");
    }
    parse_schedule(pda_schedule);
    parse_schedule(sda_schedule);
    if (workers < 0) throw std::invalid_argument("experiment: workers must be >= 0");
    if (figure_max_iterations < 0) throw std::invalid_argument("experiment: figure_max_iterations must be >= 0");
    if (!(xi > 0) || !(delta > 0) || !(noise_std >= 0)) {
        throw std::invalid_argument("experiment: need xi > 0, delta > 0 and noise_std >= 0");
    }
    if (m <= 0 || n <= 0 || sparsity <= 0 || sparsity > n) {
        throw std::invalid_argument("experiment: need m, n > 0 and 0 < sparsity <= n");
    }
}

Config config_from_json(const json& j)
{
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
    Config c;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& section = it.key();
        if (section == "schema_version") {
            if (!it->is_number_integer() || it->get<int>() != config_schema_version) {
                throw std::invalid_argument("config: unsupported schema_version");
            }
            continue;
        }
        if (section != "problem" && section != "solver" && section != "experiment") {
            throw std::invalid_argument("config: unknown section '" + section + "'");
        }
        if (!it->is_object()) throw std::invalid_argument("config: section '" + section + "' must be an object");
        for (auto kv = it->begin(); kv != it->end(); ++kv) {
            find_key(section + "." + kv.key()).set(c, *kv);
        }
    }
    if (!j.contains("schema_version")) throw std::invalid_argument("config: missing schema_version");
    return c;
}

json config_to_json(const Config& c)
{
    json j;
    j["schema_version"] = config_schema_version;
    for (const auto& k : config_keys()) {
        const auto dot = k.name.find('.');
        j[k.name.substr(0, dot)][k.name.substr(dot + 1)] = k.get(c);
    }
    return j;
}

Config load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("config file " + path + ": " + e.what());
    }
    return config_from_json(j);
}

void apply_override(Config& c, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw std::invalid_argument("override '" + assignment + "' must look like section.key=value");
    }
    const std::string name = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    const ConfigKey& key = find_key(name);
    json v;
    if (key.type == "string") {
        v = text;
    } else if (key.type == "string_list") {
        v = json::parse(text, nullptr, false);
        if (v.is_discarded() || !v.is_array()) v = text;
    } else {
        v = json::parse(text, nullptr, false);
        if (v.is_discarded()) throw std::invalid_argument("override " + name + ": cannot parse '" + text + "'");
    }
    key.set(c, v);
}

ProblemData make_problem_data(const ProblemSpec& s)
{
    if (s.kind == "quadratic") {
        QuadraticOptions o;
        o.tau = s.tau;
        o.radius = s.radius;
        o.zero_linear = s.zero_linear;
        o.bilinear = s.bilinear;
        return quadratic_game_data(s.d_theta, s.d_alpha, s.seed, s.sigma, o);
    }
    if (s.kind == "lasso_attack") return lasso_attack_data(s.m, s.n, s.sparsity, s.xi, s.delta, s.noise_std, s.seed);
    if (s.kind == "box_quadratic_1d") return box_quadratic_1d_data(s.a, s.c, s.sigma, s.half_width);
    if (s.kind == "appendix_1d") return appendix_1d_data();
    if (s.kind == "file") {
        if (s.path.empty()) throw std::invalid_argument("problem.kind = file needs problem.path");
        return load_problem(s.path);
    }
    throw std::invalid_argument("unknown problem kind '" + s.kind + "'");
}

} // namespace apgda
