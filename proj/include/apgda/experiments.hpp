#pragma once
#include <apgda/run.hpp>
#include <map>
#include <string>
#include <vector>

namespace apgda {

struct TrialRecord
{
    std::int64_t trial = 0;
    std::uint64_t seed = 0;
    std::string algorithm;
    bool success = false;
    double time = 0;              // seconds to threshold (or elapsed at budget exhaustion), setup included
    double setup_time = 0;        // parameter derivation before the run
    std::int64_t iterations = 0;
    std::int64_t grad_calls = 0;
    double final_stat_x = 0;
    double final_stat_y = 0;
    std::string stop_reason;
    std::string start_hash;
    std::string problem_hash;
    std::string error;            // non-empty when the run raised
};

struct AlgorithmSummary
{
    std::string algorithm;
    std::int64_t trials = 0;
    std::int64_t successes = 0;
    double success_rate = 0;
    // over successful trials only; +inf when there are none
    double mean_time = 0;
    double std_time = 0;
    double mean_grad_calls = 0;
    double mean_iterations = 0;
    // failed trials charged their elapsed time
    double mean_time_censored = 0;
};

struct ExperimentResult
{
    std::vector<AlgorithmSummary> summaries;
    std::vector<TrialRecord> trials;   // ordered by (trial, algorithm order)
    std::map<std::string, std::string> environment;
    std::string spec_hash;
    nlohmann::json spec;
    std::string out_dir;
    // per trial, one trace per algorithm (only when keep_traces)
    std::vector<std::vector<RunTrace<double>>> traces;

    const AlgorithmSummary& summary(const std::string& algorithm) const;
};

nlohmann::json experiment_spec_json(const ExperimentSpec& spec);
std::string experiment_spec_hash(const ExperimentSpec& spec);

AlgorithmSummary summarize(const std::vector<TrialRecord>& trials, const std::string& algorithm);

struct TrialProblem
{
    ProblemData data;
    MinMaxProblem<double> problem;
    Iterate<double> start;
};

TrialProblem make_trial_problem(const ExperimentSpec& spec, std::int64_t trial);

RunTrace<double> run_algorithm(const ExperimentSpec& spec,
                               const std::string& algorithm,
                               const MinMaxProblem<double>& problem,
                               const Iterate<double>& start,
                               bool keep_iterates);

// out_root empty: nothing is written
ExperimentResult run_experiment(const ExperimentSpec& spec, const std::string& out_root);

// g along the stored iterates by high-accuracy inner solves; attacker sign for the LASSO game
std::vector<double> objective_along(const RunTrace<double>& trace, const MinMaxProblem<double>& problem);

void emit_figure_data(const std::vector<RunTrace<double>>& traces,
                      const MinMaxProblem<double>& problem,
                      const std::string& out_dir);

void write_experiment(const ExperimentResult& result, const std::string& dir);

} // namespace apgda
