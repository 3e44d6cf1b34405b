#pragma once
#include <apgda/baselines.hpp>
#include <apgda/games.hpp>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

namespace apgda {

inline constexpr int config_schema_version = 1;

struct ProblemSpec
{
    std::string kind = "quadratic";   // quadratic | lasso_attack | box_quadratic_1d | appendix_1d | file
    std::string path;                 // problem file when kind = file
    std::uint64_t seed = 0;
    // quadratic
    std::int64_t d_theta = 2;
    std::int64_t d_alpha = 2;
    double sigma = 1.0;
    double tau = 0.1;
    double radius = 1.0;
    bool zero_linear = false;
    bool bilinear = false;
    // lasso_attack
    std::int64_t m = 20;
    std::int64_t n = 100;
    std::int64_t sparsity = 5;
    double xi = 1.0;
    double delta = 0.1;
    double noise_std = 0.0316227766016838;
    // box_quadratic_1d
    double a = 1.0;
    double c = 1.0;
    double half_width = 1.0;
};

struct SolverSection
{
    double epsilon = 0.1;
    std::string regime = "auto";      // auto | strongly_concave | concave
    bool strict = false;
    std::string start = "center";     // center | random
    std::vector<double> theta0;       // explicit start, overrides `start`
    std::vector<double> alpha0;
    // explicit parameter overrides; 0 / negative means "derive"
    double eta1 = 0;
    double eta2 = 0;
    std::int64_t n_restart = 0;
    std::int64_t k_inner = 0;
    std::int64_t t_outer = 0;
    double lambda = -1;
    std::vector<double> alpha_hat;
    double delta_gap = 0;
    double d_gap = 0;
    double g_max = 0;
    // stopping
    std::int64_t max_iterations = 0;
    double max_seconds = 0;           // 0 means no time budget
    double tolerance = -1;
    double inner_tolerance = -1;
};

struct ExperimentSpec
{
    std::int64_t m = 20;
    std::int64_t n = 100;
    std::int64_t sparsity = 5;
    double xi = 1.0;
    double delta = 0.1;
    double noise_std = 0.0316227766016838;
    std::vector<std::string> algorithms = {"PA", "SDA", "PDA"};
    std::int64_t n_trials = 20;
    double threshold = 0.1;
    std::uint64_t seed0 = 0;
    std::int64_t budget_iters = 50000;
    double budget_seconds = 120.0;
    std::string pa_outer_step = "matched";   // matched | theory
    double pda_step_theta = 0;   // 0 means the documented default
    double pda_step_alpha = 0;
    std::string pda_schedule = "constant";
    double sda_step_theta = 0;
    double sda_step_alpha = 0;
    std::string sda_schedule = "inverse-sqrt";
    std::int64_t workers = 0;              // 0 means hardware concurrency
    std::int64_t figure_trial = 0;         // -1 disables figure data
    std::int64_t figure_max_iterations = 1000;
    bool keep_traces = false;              // keep traces in memory (library use)

    void validate() const;
};

struct Config
{
    ProblemSpec problem;
    SolverSection solver;
    ExperimentSpec experiment;
};

struct ConfigKey
{
    std::string name;   // section.key
    std::string type;   // real | int | bool | string | real_list | string_list
    std::function<void(Config&, const nlohmann::json&)> set;
    std::function<nlohmann::json(const Config&)> get;
};

const std::vector<ConfigKey>& config_keys();

Config config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const Config& c);
Config load_config(const std::string& path);
void apply_override(Config& c, const std::string& assignment);

ProblemData make_problem_data(const ProblemSpec& spec);

} // namespace apgda
