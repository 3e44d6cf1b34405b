#include <apgda/problem_io.hpp>
#include <apgda/run.hpp>

namespace apgda {

namespace {

Vec<double> to_vec(const std::vector<double>& v)
{
    return Eigen::Map<const Vec<double>>(v.data(), static_cast<Index>(v.size()));
}

} // namespace

Iterate<double> lasso_start(const ProblemData& data, std::uint64_t seed)
{
    if (data.kind != "lasso_attack") throw std::invalid_argument("lasso_start: not a LASSO attack problem");
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const Vec<double> a_hat = flatten_row_major(data.matrix("A_hat"));
    Iterate<double> s;
    s.theta = a_hat + rng.in_ball<double>(a_hat.size(), std::sqrt(data.param("delta")));
    s.alpha = 0.1 * rng.normal_vector(data.d_alpha);
    return s;
}

Iterate<double> start_point(const Config& cfg, const ProblemData& data, const MinMaxProblem<double>& problem)
{
    const auto& s = cfg.solver;
    Iterate<double> it;
    if (s.start == "center") {
        it.theta = problem.project_theta(problem.theta_center);
        it.alpha = problem.project_alpha(problem.alpha_center);
    } else if (s.start == "random") {
        if (data.kind == "lasso_attack") {
            it = lasso_start(data, cfg.problem.seed);
        } else {
            Rng rng(cfg.problem.seed ^ 0x51ab7ULL);
            const double r = problem.constants.radius_r;
            it.theta = problem.project_theta(problem.theta_center + rng.in_ball<double>(problem.d_theta, r));
            it.alpha = problem.project_alpha(problem.alpha_center + rng.in_ball<double>(problem.d_alpha, r));
        }
    } else {
        throw std::invalid_argument("solver.start must be 'center' or 'random'");
    }
    if (!s.theta0.empty()) it.theta = to_vec(s.theta0);
    if (!s.alpha0.empty()) it.alpha = to_vec(s.alpha0);
    problem.check_point(it.theta, it.alpha);
    return it;
}

SolverParams<double> configure_params(const SolverSection& s,
                                      const MinMaxProblem<double>& problem,
                                      const Vec<double>& theta0,
                                      const Vec<double>& alpha0,
                                      std::string& regime)
{
    regime = s.regime;
    if (regime == "auto") regime = problem.constants.sigma > 0 ? "strongly_concave" : "concave";
    if (regime != "strongly_concave" && regime != "concave") {
        throw std::invalid_argument("solver.regime must be auto, strongly_concave or concave");
    }
    const double eps = s.epsilon;
    ProblemConstants<double> c = problem.constants;
    if (s.delta_gap > 0) c.delta_gap = s.delta_gap;
    if (s.d_gap > 0) c.d_gap = s.d_gap;
    if (s.g_max > 0) c.g_max = s.g_max;

    Vec<double> alpha_hat = s.alpha_hat.empty() ? alpha0 : to_vec(s.alpha_hat);
    SolverParams<double> p;
    if (regime == "strongly_concave") {
        if (!c.gaps_known()) c = estimate_gaps(problem, theta0, alpha0);
        p = derive_params_strongly_concave(c, eps);
    } else {
        if (!c.gaps_known()) c = estimate_gaps(problem, theta0, alpha0, concave_lambda(c, eps), alpha_hat);
        p = derive_params_concave(c, eps, alpha_hat);
    }
    bool steps_overridden = false;
    if (s.eta1 > 0) {
        p.eta1 = s.eta1;
        steps_overridden = true;
    }
    if (s.eta2 > 0) {
        p.eta2 = s.eta2;
        steps_overridden = true;
    }
    if (s.lambda >= 0) {
        p.lambda = s.lambda;
        if (p.lambda > 0 && p.alpha_hat.size() != problem.d_alpha) p.alpha_hat = alpha_hat;
    }
    if (s.n_restart > 0) p.n_restart = s.n_restart;
    if (s.k_inner > 0) p.k_inner = s.k_inner;
    // keep K a multiple of N
    p.k_inner = p.n_restart * ((std::max(p.k_inner, p.n_restart) + p.n_restart - 1) / p.n_restart);
    if (s.t_outer > 0) p.t_outer = s.t_outer;
    p.enforce_step_bounds = !steps_overridden;
    p.validate(problem.d_alpha);
    return p;
}

StoppingRule configure_stop(const SolverSection& s)
{
    StoppingRule st = s.strict ? StoppingRule::strict_theory() : StoppingRule{};
    st.max_iterations = s.max_iterations;
    if (s.max_seconds > 0) st.max_seconds = s.max_seconds;
    st.tolerance = s.tolerance;
    st.inner_tolerance = s.inner_tolerance;
    return st;
}

SolveSetup prepare_solve(const Config& cfg, const ProblemData& data)
{
    SolveSetup su;
    su.data = data;
    su.problem = build_problem(data);
    const auto start = start_point(cfg, su.data, su.problem);
    su.theta0 = start.theta;
    su.alpha0 = start.alpha;
    su.params = configure_params(cfg.solver, su.problem, su.theta0, su.alpha0, su.regime);
    su.stop = configure_stop(cfg.solver);
    return su;
}

SolveSetup prepare_solve(const Config& cfg)
{
    return prepare_solve(cfg, make_problem_data(cfg.problem));
}

RunTrace<double> run_setup(const SolveSetup& su)
{
    RunTrace<double> tr = solve(su.problem, su.theta0, su.alpha0, su.params, su.stop);
    tr.metadata["problem_hash"] = hex64(su.problem.hash);
    tr.metadata["problem_kind"] = su.problem.kind;
    tr.metadata["problem_seed"] = std::to_string(su.data.seed);
    tr.metadata["regime"] = su.regime;
    return tr;
}

} // namespace apgda
