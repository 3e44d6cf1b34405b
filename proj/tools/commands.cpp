#include <commands.hpp>

#include <apgda/experiments.hpp>
#include <apgda/problem_io.hpp>
#include <apgda/run.hpp>
#include <apgda/trace_io.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace apgda::cli {

namespace fs = std::filesystem;

namespace {

struct Common
{
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    int verbosity = 0;
};

std::string default_out_dir()
{
    const char* env = std::getenv("APGDA_OUT_DIR");
    return env && *env ? env : "results";
}

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Config load(const Common& c)
{
    Config cfg;
    if (!c.config_path.empty()) cfg = load_config(c.config_path);
    for (const auto& o : c.overrides) apply_override(cfg, o);
    return cfg;
}

void add_common(CLI::App* sub, Common& c)
{
    auto* opt = sub->add_option("--config", c.config_path, "JSON config file (schema_version 1); built-in defaults otherwise");
    opt->check(CLI::ExistingFile);
    sub->add_option("--set", c.overrides, "override a config key: section.key=value (repeatable)");
    sub->add_option("--out", c.out_dir, "output directory (default: $APGDA_OUT_DIR or ./results)");
    sub->add_flag("-v,--verbose", c.verbosity, "more output");
}

std::string out_dir_of(const Common& c)
{
    return c.out_dir.empty() ? default_out_dir() : c.out_dir;
}

Iterate<double> read_point(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read point file " + path);
    Iterate<double> p;
    bool has_t = false, has_a = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tag, cell;
        std::getline(ss, tag, ',');
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v)) {
                throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": bad value '" + cell + "'");
            }
            vals.push_back(v);
        }
        Vec<double> v = Eigen::Map<const Vec<double>>(vals.data(), static_cast<Index>(vals.size()));
        if (tag == "theta") {
            p.theta = v;
            has_t = true;
        } else if (tag == "alpha") {
            p.alpha = v;
            has_a = true;
        } else {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected 'theta' or 'alpha'");
        }
    }
    if (!has_t || !has_a) throw std::invalid_argument(path + ": needs a theta line and an alpha line");
    return p;
}

int run_generate(const Common& c, std::ostream& out)
{
    const Config cfg = load(c);
    const ProblemData data = make_problem_data(cfg.problem);
    const std::string dir = out_dir_of(c);
    fs::create_directories(dir);
    const std::string path = (fs::path(dir) / "problem.json").string();
    save_problem(data, path);
    out << "generated " << data.kind << " problem dims=(" << data.d_theta << "," << data.d_alpha
        << ") seed=" << data.seed << " hash=" << hex64(problem_hash(data)) << " -> " << path << '\n';
    return ok;
}

int run_solve(const Common& c, const std::string& problem_file, std::ostream& out)
{
    Config cfg = load(c);
    if (!problem_file.empty()) {
        cfg.problem.kind = "file";
        cfg.problem.path = problem_file;
    }
    const SolveSetup su = prepare_solve(cfg);
    if (c.verbosity > 0) {
        out << "regime=" << su.regime << " eta1=" << num(su.params.eta1) << " eta2=" << num(su.params.eta2)
            << " N=" << su.params.n_restart << " K=" << su.params.k_inner << " T=" << su.params.t_outer
            << " lambda=" << num(su.params.lambda) << '\n';
    }
    const RunTrace<double> tr = run_setup(su);
    const std::string dir = out_dir_of(c);
    fs::create_directories(dir);
    const std::string path = (fs::path(dir) / "trace.csv").string();
    write_trace(tr, path);
    const auto& b = tr.best_record();
    const double eps = su.params.epsilon;
    const bool verdict = b.stat_x <= eps * eps && b.stat_y <= eps * eps;
    out << "PA best t=" << b.t << " stat_x=" << num(b.stat_x) << " stat_y=" << num(b.stat_y) << " epsilon=" << num(eps)
        << " eps_fne=" << (verdict ? "true" : "false") << " iterations=" << tr.records.size()
        << " grad_calls=" << tr.total_grad_calls() << " stop=" << tr.stop_reason << " -> " << path << '\n';
    return ok;
}

int run_measure(const Common& c, const std::string& point_file, const std::string& problem_file, double epsilon,
                std::ostream& out)
{
    Config cfg = load(c);
    if (!problem_file.empty()) {
        cfg.problem.kind = "file";
        cfg.problem.path = problem_file;
    }
    const ProblemData data = make_problem_data(cfg.problem);
    const MinMaxProblem<double> problem = build_problem(data);
    const Iterate<double> pt = read_point(point_file);
    const double eps = epsilon > 0 ? epsilon : cfg.solver.epsilon;
    const auto r = stationarity_report(problem, pt.theta, pt.alpha, eps);
    out << "stat_x=" << num(r.stat_x) << " stat_y=" << num(r.stat_y) << " type1_theta=" << num(r.type1_theta)
        << " type1_alpha=" << num(r.type1_alpha) << " epsilon=" << num(eps)
        << " eps_fne=" << (r.epsilon_fne ? "true" : "false") << '\n';
    return ok;
}

int run_experiment_cmd(const Common& c, std::ostream& out)
{
    const Config cfg = load(c);
    const auto res = run_experiment(cfg.experiment, out_dir_of(c));
    for (const auto& s : res.summaries) {
        out << s.algorithm << ": success=" << s.successes << "/" << s.trials << " mean_time=" << num(s.mean_time)
            << "s std_time=" << num(s.std_time) << "s mean_grad_calls=" << num(s.mean_grad_calls) << '\n';
    }
    out << "results -> " << res.out_dir << '\n';
    return ok;
}

int run_validate(const std::string& path, std::ostream& out, std::ostream& err)
{
    const auto issues = validate_trace_csv(path);
    if (issues.empty()) {
        out << "ok: " << path << '\n';
        return ok;
    }
    for (const auto& i : issues) {
        err << path << ": ";
        if (i.row > 0) err << "row " << i.row << ": ";
        err << i.message << '\n';
    }
    return validation_error;
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Multi-step accelerated proximal gradient descent-ascent: solver, measures and experiments", "apgda"};
    app.require_subcommand(1);
    app.footer("Exit codes: 0 success, 1 validation error, 2 numerical failure.\n"
               "Environment: APGDA_OUT_DIR sets the default output directory.");

    // one per subcommand: CLI11 resets flags bound to a shared variable
    Common c_gen, c_sol, c_mea, c_exp;
    std::string problem_file, point_file, trace_file, algorithms;
    double epsilon = -1, threshold = -1, budget_seconds = -1;
    std::int64_t seed = -1, trials = -1, budget_iters = -1;
    bool strict = false;

    auto* gen = app.add_subcommand("generate", "generate a problem instance and write problem.json");
    add_common(gen, c_gen);
    gen->add_option("--seed", seed, "problem seed");

    auto* sol = app.add_subcommand("solve", "run the multi-step accelerated solver; writes trace.csv");
    add_common(sol, c_sol);
    sol->add_option("--problem", problem_file, "problem file (overrides the problem section)")->check(CLI::ExistingFile);
    sol->add_option("--epsilon", epsilon, "target accuracy in (0,1)");
    sol->add_option("--seed", seed, "problem seed");
    sol->add_option("--budget-iters", budget_iters, "outer iteration budget");
    sol->add_option("--budget-seconds", budget_seconds, "wall-time budget");
    sol->add_flag("--strict-theory", strict, "use the full derived K and T");

    auto* mea = app.add_subcommand("measure", "stationarity report at a point");
    add_common(mea, c_mea);
    mea->add_option("--point", point_file, "CSV with lines 'theta,v1,...' and 'alpha,v1,...'")
        ->required()
        ->check(CLI::ExistingFile);
    mea->add_option("--problem", problem_file, "problem file")->check(CLI::ExistingFile);
    mea->add_option("--epsilon", epsilon, "accuracy for the verdict");

    auto* exp = app.add_subcommand("experiment", "LASSO-attack comparison of PA, SDA and PDA");
    add_common(exp, c_exp);
    exp->add_option("--algorithms", algorithms, "comma-separated subset of PA,SDA,PDA");
    exp->add_option("--trials", trials, "number of trials");
    exp->add_option("--threshold", threshold, "threshold on both measures");
    exp->add_option("--seed", seed, "seed of trial 0");
    exp->add_option("--budget-iters", budget_iters, "iteration budget per run");
    exp->add_option("--budget-seconds", budget_seconds, "wall-time budget per run");

    auto* val = app.add_subcommand("validate", "check a trace CSV against the schema");
    val->add_option("trace", trace_file, "trace CSV")->required();

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code != 0) err << app.help();
        return code == 0 ? ok : validation_error;
    }

    // flags become overrides so the config file stays the single source
    Common& common = *gen ? c_gen : *sol ? c_sol : *mea ? c_mea : c_exp;
    auto push = [&](const std::string& k, const std::string& v) { common.overrides.push_back(k + "=" + v); };
    try {
        if (*gen) {
            if (seed >= 0) push("problem.seed", std::to_string(seed));
            return run_generate(common, out);
        }
        if (*sol) {
            if (epsilon > 0) push("solver.epsilon", format_double(epsilon));
            if (seed >= 0) push("problem.seed", std::to_string(seed));
            if (budget_iters > 0) push("solver.max_iterations", std::to_string(budget_iters));
            if (budget_seconds > 0) push("solver.max_seconds", format_double(budget_seconds));
            if (strict) push("solver.strict", "true");
            return run_solve(common, problem_file, out);
        }
        if (*mea) return run_measure(common, point_file, problem_file, epsilon, out);
        if (*exp) {
            if (!algorithms.empty()) push("experiment.algorithms", algorithms);
            if (trials > 0) push("experiment.n_trials", std::to_string(trials));
            if (threshold > 0) push("experiment.threshold", format_double(threshold));
            if (seed >= 0) push("experiment.seed0", std::to_string(seed));
            if (budget_iters > 0) push("experiment.budget_iters", std::to_string(budget_iters));
            if (budget_seconds > 0) push("experiment.budget_seconds", format_double(budget_seconds));
            return run_experiment_cmd(common, out);
        }
        if (*val) return run_validate(trace_file, out, err);
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return numerical_failure;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return validation_error;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return validation_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return validation_error;
    }
    return validation_error;
}

int dispatch(int argc, char** argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return dispatch(args, std::cout, std::cerr);
}

} // namespace apgda::cli
