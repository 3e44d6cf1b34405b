#include <apgda/experiments.hpp>
#include <apgda/problem_io.hpp>
#include <apgda/trace_io.hpp>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>
#include <unistd.h>

#ifndef APGDA_BUILD_ID
#define APGDA_BUILD_ID "unknown"
#endif

namespace apgda {

namespace fs = std::filesystem;
using nlohmann::json;

const AlgorithmSummary& ExperimentResult::summary(const std::string& algorithm) const
{
    for (const auto& s : summaries)
        if (s.algorithm == algorithm) return s;
    throw std::invalid_argument("no summary for algorithm " + algorithm);
}

json experiment_spec_json(const ExperimentSpec& spec)
{
    Config c;
    c.experiment = spec;
    json j = config_to_json(c).at("experiment");
    // execution-only knobs do not change results
    j.erase("workers");
    j.erase("keep_traces");
    j.erase("figure_trial");
    j.erase("figure_max_iterations");
    return j;
}

std::string experiment_spec_hash(const ExperimentSpec& spec)
{
    return hex64(fnv1a(experiment_spec_json(spec).dump()));
}

AlgorithmSummary summarize(const std::vector<TrialRecord>& trials, const std::string& algorithm)
{
    AlgorithmSummary s;
    s.algorithm = algorithm;
    double sum = 0, sum_calls = 0, sum_iters = 0, sum_all = 0;
    std::vector<double> times;
    for (const auto& t : trials) {
        if (t.algorithm != algorithm) continue;
        ++s.trials;
        sum_all += t.time;
        if (!t.success) continue;
        ++s.successes;
        times.push_back(t.time);
        sum += t.time;
        sum_calls += static_cast<double>(t.grad_calls);
        sum_iters += static_cast<double>(t.iterations);
    }
    const double inf = std::numeric_limits<double>::infinity();
    s.success_rate = s.trials > 0 ? static_cast<double>(s.successes) / static_cast<double>(s.trials) : 0.0;
    s.mean_time_censored = s.trials > 0 ? sum_all / static_cast<double>(s.trials) : inf;
    if (s.successes == 0) {
        s.mean_time = s.mean_grad_calls = s.mean_iterations = inf;
        s.std_time = 0;
        return s;
    }
    const double k = static_cast<double>(s.successes);
    s.mean_time = sum / k;
    s.mean_grad_calls = sum_calls / k;
    s.mean_iterations = sum_iters / k;
    double ss = 0;
    for (double t : times) ss += (t - s.mean_time) * (t - s.mean_time);
    s.std_time = s.successes > 1 ? std::sqrt(ss / (k - 1)) : 0.0;
    return s;
}

TrialProblem make_trial_problem(const ExperimentSpec& spec, std::int64_t trial)
{
    TrialProblem tp;
    const std::uint64_t seed = spec.seed0 + static_cast<std::uint64_t>(trial);
    tp.data = lasso_attack_data(spec.m, spec.n, spec.sparsity, spec.xi, spec.delta, spec.noise_std, seed);
    tp.problem = build_problem(tp.data);
    tp.start = lasso_start(tp.data, seed);
    return tp;
}

RunTrace<double> run_algorithm(const ExperimentSpec& spec,
                               const std::string& algorithm,
                               const MinMaxProblem<double>& problem,
                               const Iterate<double>& start,
                               bool keep_iterates)
{
    StoppingRule stop;
    stop.tolerance = spec.threshold;
    stop.max_iterations = spec.budget_iters;
    stop.max_seconds = spec.budget_seconds;
    stop.keep_iterates = keep_iterates;
    stop.keep_limit = static_cast<std::size_t>(std::max<std::int64_t>(spec.figure_max_iterations, 0));
    const auto& c = problem.constants;

    RunTrace<double> tr;
    double setup_seconds = 0;
    if (algorithm == "PA") {
        // epsilon with epsilon^2 = threshold
        const double eps = std::min(std::sqrt(spec.threshold), 0.999);
        const auto t0 = std::chrono::steady_clock::now();
        ProblemConstants<double> k = c;
        if (!k.gaps_known()) k = estimate_gaps(problem, start.theta, start.alpha, concave_lambda(k, eps), start.alpha);
        SolverParams<double> p = derive_params_concave(k, eps, start.alpha);
        setup_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (spec.pa_outer_step == "matched") {
            p.eta2 = spec.pda_step_theta > 0 ? spec.pda_step_theta : 1.0 / c.l11;
            p.enforce_step_bounds = false;
        }
        tr = solve(problem, start.theta, start.alpha, p, stop);
        tr.metadata["pa_outer_step"] = spec.pa_outer_step;
    } else if (algorithm == "PDA") {
        auto bp = default_pda_params(c, spec.budget_iters);
        if (spec.pda_step_theta > 0) bp.step_theta = spec.pda_step_theta;
        if (spec.pda_step_alpha > 0) bp.step_alpha = spec.pda_step_alpha;
        bp.step_schedule = parse_schedule(spec.pda_schedule);
        tr = run_pda(problem, start.theta, start.alpha, bp, stop);
    } else if (algorithm == "SDA") {
        auto bp = default_sda_params(c, spec.budget_iters);
        if (spec.sda_step_theta > 0) bp.step_theta = spec.sda_step_theta;
        if (spec.sda_step_alpha > 0) bp.step_alpha = spec.sda_step_alpha;
        bp.step_schedule = parse_schedule(spec.sda_schedule);
        tr = run_sda(problem, start.theta, start.alpha, bp, stop);
    } else {
        throw std::invalid_argument("unknown algorithm '" + algorithm + "'");
    }
    tr.metadata["problem_hash"] = hex64(problem.hash);
    tr.metadata["problem_kind"] = problem.kind;
    tr.metadata["setup_seconds"] = format_double(setup_seconds);
    return tr;
}

namespace {

std::map<std::string, std::string> environment_info()
{
    char host[256] = {0};
    if (gethostname(host, sizeof host - 1) != 0) std::snprintf(host, sizeof host, "unknown");
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return {{"host", host},
            {"timestamp", stamp},
            {"build_id", APGDA_BUILD_ID},
            {"compiler", __VERSION__},
            {"hardware_threads", std::to_string(std::thread::hardware_concurrency())}};
}

std::string trial_dir(const std::string& root, std::int64_t i)
{
    return (fs::path(root) / ("trial-" + std::to_string(i))).string();
}

} // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const std::string& out_root)
{
    spec.validate();
    ExperimentResult res;
    res.spec_hash = experiment_spec_hash(spec);
    res.spec = experiment_spec_json(spec);
    res.environment = environment_info();
    if (!out_root.empty()) {
        res.out_dir = (fs::path(out_root) / res.spec_hash).string();
        fs::create_directories(res.out_dir);
    }

    const auto n_trials = static_cast<std::size_t>(spec.n_trials);
    const std::size_t n_alg = spec.algorithms.size();
    std::vector<std::vector<TrialRecord>> per_trial(n_trials);
    std::vector<std::vector<RunTrace<double>>> traces(n_trials);

    auto run_trial = [&](std::size_t i) {
        const auto trial = static_cast<std::int64_t>(i);
        const std::uint64_t seed = spec.seed0 + i;
        std::vector<TrialRecord> recs;
        std::vector<RunTrace<double>> trs;
        std::string dir;
        if (!res.out_dir.empty()) {
            dir = trial_dir(res.out_dir, trial);
            fs::create_directories(dir);
        }
        TrialProblem tp;
        std::string setup_error;
        try {
            tp = make_trial_problem(spec, trial);
            if (!dir.empty()) save_problem(tp.data, (fs::path(dir) / "problem.json").string());
        } catch (const std::exception& e) {
            setup_error = e.what();
        }
        const bool figure = trial == spec.figure_trial;
        for (const auto& alg : spec.algorithms) {
            TrialRecord r;
            r.trial = trial;
            r.seed = seed;
            r.algorithm = alg;
            if (!setup_error.empty()) {
                r.error = setup_error;
                r.time = std::numeric_limits<double>::infinity();
                recs.push_back(r);
                continue;
            }
            r.problem_hash = hex64(tp.problem.hash);
            r.start_hash = hex64(iterate_hash(tp.start.theta, tp.start.alpha));
            try {
                const bool keep = figure || spec.keep_traces;
                RunTrace<double> tr = run_algorithm(spec, alg, tp.problem, tp.start, keep);
                tr.metadata["trial"] = std::to_string(trial);
                tr.metadata["seed"] = std::to_string(seed);
                r.success = tr.converged;
                r.setup_time = std::stod(tr.metadata.at("setup_seconds"));
                r.time = tr.total_time() + r.setup_time;
                r.iterations = static_cast<std::int64_t>(tr.records.size());
                r.grad_calls = tr.total_grad_calls();
                if (!tr.records.empty()) {
                    r.final_stat_x = tr.records.back().stat_x;
                    r.final_stat_y = tr.records.back().stat_y;
                }
                r.stop_reason = tr.stop_reason;
                if (hex64(iterate_hash(tr.start.theta, tr.start.alpha)) != r.start_hash) {
                    throw std::logic_error("start point mismatch between algorithms");
                }
                if (!dir.empty()) write_trace(tr, (fs::path(dir) / (alg + ".csv")).string());
                trs.push_back(std::move(tr));
            } catch (const std::exception& e) {
                r.error = e.what();
                r.success = false;
            }
            recs.push_back(r);
        }
        if (figure && !dir.empty() && trs.size() == n_alg) {
            emit_figure_data(trs, tp.problem, res.out_dir);
        }
        per_trial[i] = std::move(recs);
        if (spec.keep_traces) traces[i] = std::move(trs);
    };

    std::size_t workers = spec.workers > 0 ? static_cast<std::size_t>(spec.workers)
                                           : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n_trials);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::mutex err_mu;
    std::string fatal;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n_trials; i = next++) {
                try {
                    run_trial(i);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    fatal = e.what();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (!fatal.empty()) throw std::runtime_error("experiment: " + fatal);

    for (auto& v : per_trial)
        for (auto& r : v) res.trials.push_back(std::move(r));
    for (const auto& alg : spec.algorithms) res.summaries.push_back(summarize(res.trials, alg));
    if (spec.keep_traces) res.traces = std::move(traces);
    if (!res.out_dir.empty()) write_experiment(res, res.out_dir);
    return res;
}

std::vector<double> objective_along(const RunTrace<double>& trace, const MinMaxProblem<double>& problem)
{
    const double sign = problem.kind == "lasso_attack" ? -1.0 : 1.0;
    std::vector<double> out;
    Vec<double> warm = trace.start.alpha;
    for (const auto& it : trace.iterates) {
        const auto s = maximize_inner(problem, it.theta, warm);
        out.push_back(sign * s.value);
        warm = s.alpha;
    }
    return out;
}

void emit_figure_data(const std::vector<RunTrace<double>>& traces,
                      const MinMaxProblem<double>& problem,
                      const std::string& out_dir)
{
    if (traces.empty()) throw std::invalid_argument("emit_figure_data: no traces");
    const std::string want = hex64(problem.hash);
    for (const auto& t : traces) {
        auto it = t.metadata.find("problem_hash");
        if (it == t.metadata.end() || it->second != want) {
            throw std::invalid_argument("emit_figure_data: trace '" + t.algorithm + "' belongs to a different problem");
        }
    }
    std::vector<std::vector<double>> g;
    std::size_t rows = 0;
    for (const auto& t : traces) {
        g.push_back(objective_along(t, problem));
        rows = std::max(rows, std::min(t.records.size(), t.iterates.size()));
    }
    fs::create_directories(out_dir);
    std::ofstream obj(fs::path(out_dir) / "figure_objective.csv");
    std::ofstream st(fs::path(out_dir) / "figure_stationarity.csv");
    if (!obj || !st) throw std::runtime_error("emit_figure_data: cannot write to " + out_dir);
    obj << "iteration";
    st << "iteration";
    for (const auto& t : traces) {
        obj << ",g_" << t.algorithm;
        st << ",stat_x_" << t.algorithm << ",stat_y_" << t.algorithm;
    }
    obj << '\n';
    st << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        obj << r;
        st << r;
        for (std::size_t a = 0; a < traces.size(); ++a) {
            obj << ',';
            if (r < g[a].size()) obj << format_double(g[a][r]);
            st << ',';
            if (r < std::min(traces[a].records.size(), traces[a].iterates.size())) {
                st << format_double(traces[a].records[r].stat_x) << ',' << format_double(traces[a].records[r].stat_y);
            } else {
                st << ',';
            }
        }
        obj << '\n';
        st << '\n';
    }
}

void write_experiment(const ExperimentResult& res, const std::string& dir)
{
    fs::create_directories(dir);
    std::ofstream tr(fs::path(dir) / "trials.csv");
    tr << "trial,seed,algorithm,success,time,setup_time,iterations,grad_calls,final_stat_x,final_stat_y,stop_reason,start_hash,"
          "problem_hash,error\n";
    for (const auto& r : res.trials) {
        std::string err = r.error;
        for (char& ch : err)
            if (ch == ',' || ch == '\n') ch = ';';
        tr << r.trial << ',' << r.seed << ',' << r.algorithm << ',' << (r.success ? 1 : 0) << ','
           << format_double(r.time) << ',' << format_double(r.setup_time) << ',' << r.iterations << ',' << r.grad_calls << ','
           << format_double(r.final_stat_x) << ',' << format_double(r.final_stat_y) << ',' << r.stop_reason << ','
           << r.start_hash << ',' << r.problem_hash << ',' << err << '\n';
    }
    std::ofstream su(fs::path(dir) / "summary.csv");
    su << "algorithm,trials,successes,success_rate,mean_time,std_time,mean_time_censored,mean_grad_calls,"
          "mean_iterations\n";
    for (const auto& s : res.summaries) {
        su << s.algorithm << ',' << s.trials << ',' << s.successes << ',' << format_double(s.success_rate) << ','
           << format_double(s.mean_time) << ',' << format_double(s.std_time) << ','
           << format_double(s.mean_time_censored) << ',' << format_double(s.mean_grad_calls) << ','
           << format_double(s.mean_iterations) << '\n';
    }
    json meta;
    meta["schema_version"] = 1;
    meta["spec_hash"] = res.spec_hash;
    meta["spec"] = res.spec;
    meta["environment"] = res.environment;
    meta["failure_policy"] =
        "mean_time, std_time, mean_grad_calls and mean_iterations are over successful trials only (inf when none); "
        "mean_time_censored charges failed trials their elapsed time; success_rate counts all trials";
    meta["time_unit"] = "seconds";
    std::ofstream m(fs::path(dir) / "meta.json");
    m << meta.dump(1) << '\n';
}

} // namespace apgda
