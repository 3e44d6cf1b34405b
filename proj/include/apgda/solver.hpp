#pragma once
#include <apgda/trace.hpp>
#include <algorithm>
#include <optional>
#include <sstream>

namespace apgda {

template <class Scalar>
struct SolverParams
{
    Scalar eta1 = 0;
    Scalar eta2 = 0;
    std::int64_t n_restart = 1;
    std::int64_t k_inner = 1;
    std::int64_t t_outer = 1;
    Scalar lambda = 0;
    Scalar epsilon = 0;
    Vec<Scalar> alpha_hat;
    ProblemConstants<Scalar> constants;   // what the parameters were derived from
    Scalar l_g = 0;
    // false when eta2/eta1 are deliberately overridden past the theory bounds
    bool enforce_step_bounds = true;

    Scalar lipschitz_g() const
    {
        const Scalar mu = std::max(constants.sigma, lambda);
        return mu > 0 ? constants.l11 + constants.l12 * constants.l12 / mu : std::numeric_limits<Scalar>::infinity();
    }

    void validate(Index d_alpha) const
    {
        if (!(eta1 > 0) || !(eta2 > 0)) throw std::invalid_argument("SolverParams: step sizes must be positive");
        if (n_restart < 1) throw std::invalid_argument("SolverParams: n_restart must be >= 1");
        if (k_inner < n_restart || k_inner % n_restart != 0) {
            throw std::invalid_argument("SolverParams: k_inner must be a positive multiple of n_restart");
        }
        if (t_outer < 1) throw std::invalid_argument("SolverParams: t_outer must be >= 1");
        if (!(lambda >= 0)) throw std::invalid_argument("SolverParams: lambda must be nonnegative");
        if (lambda > 0 && alpha_hat.size() != d_alpha) {
            throw std::invalid_argument("SolverParams: alpha_hat has wrong dimension");
        }
        if (enforce_step_bounds) {
            const Scalar tol = 1 + Scalar(1e-12);
            if (eta1 * (constants.l22 + lambda) > tol) {
                throw std::invalid_argument("SolverParams: eta1 * (L22 + lambda) exceeds 1");
            }
            const Scalar lg = lipschitz_g();
            if (std::isfinite(static_cast<double>(lg)) && eta2 * lg > tol) {
                throw std::invalid_argument("SolverParams: eta2 * L_g exceeds 1");
            }
        }
    }

    std::map<std::string, std::string> describe() const
    {
        auto str = [](auto v) {
            std::ostringstream os;
            os.precision(17);
            os << v;
            return os.str();
        };
        return {{"eta1", str(eta1)},
                {"eta2", str(eta2)},
                {"n_restart", str(n_restart)},
                {"k_inner", str(k_inner)},
                {"t_outer", str(t_outer)},
                {"lambda", str(lambda)},
                {"epsilon", str(epsilon)},
                {"l_g", str(l_g)},
                {"l11", str(constants.l11)},
                {"l22", str(constants.l22)},
                {"l12", str(constants.l12)},
                {"sigma", str(constants.sigma)},
                {"radius_r", str(constants.radius_r)},
                {"lp", str(constants.lp)},
                {"delta_gap", str(constants.delta_gap)},
                {"d_gap", str(constants.d_gap)},
                {"g_max", str(constants.g_max)},
                {"radius_estimated", constants.radius_estimated ? "true" : "false"},
                {"enforce_step_bounds", enforce_step_bounds ? "true" : "false"}};
    }
};

namespace detail {

inline std::int64_t ceil_count(double x)
{
    if (std::isnan(x)) throw std::invalid_argument("parameter derivation produced NaN");
    const double c = std::ceil(x - 1e-9);
    if (c < 1) return 1;
    if (c > 1e18) return static_cast<std::int64_t>(1e18);
    return static_cast<std::int64_t>(c);
}

inline void check_epsilon(double epsilon)
{
    if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("epsilon must lie in (0, 1)");
}

template <class Scalar>
void check_gaps(const ProblemConstants<Scalar>& c)
{
    if (!c.gaps_known()) {
        throw std::invalid_argument("constants: delta_gap, d_gap and g_max must be positive (estimate them first)");
    }
}

// N, K from the restarted-acceleration analysis; mu is sigma or lambda
inline std::pair<std::int64_t, std::int64_t>
restart_schedule(double l22_eff, double mu, double c, double log_eps, double delta_gap)
{
    const double kappa = l22_eff / mu;
    const std::int64_t n = ceil_count(std::sqrt(8 * kappa) - 1);
    const double nk = 2 * std::sqrt(8 * kappa) * (c + 2 * log_eps + 0.5 * std::log(2 * delta_gap / mu));
    const std::int64_t blocks = ceil_count(nk / static_cast<double>(n));
    return {n, n * blocks};
}

} // namespace detail

template <class Scalar>
SolverParams<Scalar> derive_params_strongly_concave(const ProblemConstants<Scalar>& constants, Scalar epsilon)
{
    constants.validate();
    if (!(constants.sigma > 0)) throw std::invalid_argument("derive_params_strongly_concave: sigma must be positive");
    detail::check_epsilon(epsilon);
    detail::check_gaps(constants);
    const double l11 = constants.l11, l22 = constants.l22, l12 = constants.l12, s = constants.sigma;
    const double r = constants.radius_r, eps = epsilon;
    const double lg = l11 + l12 * l12 / s;
    const double c = std::max(2 * std::log(2.0) + std::log(lg * l12 * r),
                              std::log(l22) + std::log(2 * l22 * r + constants.g_max + constants.lp + r));

    SolverParams<Scalar> p;
    p.constants = constants;
    p.epsilon = epsilon;
    p.lambda = 0;
    p.l_g = static_cast<Scalar>(lg);
    p.eta1 = Scalar(1) / constants.l22;
    p.eta2 = static_cast<Scalar>(1 / lg);
    std::tie(p.n_restart, p.k_inner) = detail::restart_schedule(l22, s, c, std::log(1 / eps), constants.delta_gap);
    p.t_outer = detail::ceil_count(4 * lg * constants.d_gap / (eps * eps));
    return p;
}

template <class Scalar>
Scalar concave_lambda(const ProblemConstants<Scalar>& constants, Scalar epsilon)
{
    return std::min<Scalar>(constants.l22, epsilon / (2 * std::sqrt(Scalar(2)) * constants.radius_r));
}

template <class Scalar>
SolverParams<Scalar> derive_params_concave(const ProblemConstants<Scalar>& constants,
                                           Scalar epsilon,
                                           const Vec<Scalar>& alpha_hat)
{
    constants.validate();
    detail::check_epsilon(epsilon);
    detail::check_gaps(constants);
    if (!(constants.l22 > 0)) throw std::invalid_argument("derive_params_concave: l22 must be positive");
    const double lam = concave_lambda(constants, epsilon);
    const double l11 = constants.l11, l22 = constants.l22, l12 = constants.l12;
    const double r = constants.radius_r, eps = epsilon;
    const double lg = l11 + l12 * l12 / lam;
    const double gmax = constants.g_max + lam * r;
    const double c = std::max(2 * std::log(2.0) + std::log(lg * l12 * r),
                              std::log(l22 + lam) + std::log(2 * (l22 + lam) * r + gmax + constants.lp + r));

    SolverParams<Scalar> p;
    p.constants = constants;
    p.epsilon = epsilon;
    p.lambda = static_cast<Scalar>(lam);
    p.alpha_hat = alpha_hat;
    p.l_g = static_cast<Scalar>(lg);
    p.eta1 = static_cast<Scalar>(1 / (l22 + lam));
    p.eta2 = static_cast<Scalar>(1 / lg);
    std::tie(p.n_restart, p.k_inner) =
        detail::restart_schedule(l22 + lam, lam, c, std::log(2 / eps), constants.delta_gap);
    p.t_outer = detail::ceil_count(8 * lg * constants.d_gap / (eps * eps));
    return p;
}

template <class Scalar>
Scalar momentum_next(Scalar beta)
{
    return (1 + std::sqrt(1 + 4 * beta * beta)) / 2;
}

template <class Scalar>
struct InnerControl
{
    Scalar exit_tolerance = -1;   // > 0 enables the block-boundary exit on the regularized Y measure
    std::int64_t steps = 0;
    std::int64_t grad_calls = 0;
    bool exited_early = false;
};

template <class Scalar>
Vec<Scalar> inner_accelerated_ascent(const MinMaxProblem<Scalar>& problem,
                                     const Vec<Scalar>& theta,
                                     const Vec<Scalar>& alpha_start,
                                     const SolverParams<Scalar>& params,
                                     InnerControl<Scalar>& ctl)
{
    using Vector = Vec<Scalar>;
    problem.check_point(theta, alpha_start);
    params.validate(problem.d_alpha);
    const Scalar eta1 = params.eta1;
    const Scalar lam = params.lambda;
    auto grad = [&](const Vector& a) {
        Vector g = problem.grad_h_alpha(theta, a);
        if (lam > 0) g -= lam * (a - params.alpha_hat);
        ++ctl.grad_calls;
        return g;
    };

    const std::int64_t n = params.n_restart;
    const std::int64_t blocks = params.k_inner / n;
    Vector x = alpha_start;
    std::optional<Vector> cached;
    for (std::int64_t k = 0; k < blocks; ++k) {
        Vector x_prev = x;
        Vector y = x;
        Scalar beta = 1;
        for (std::int64_t j = 1; j <= n; ++j) {
            Vector g = (j == 1 && cached) ? std::move(*cached) : grad(y);
            cached.reset();
            Vector x_new;
            if (g.allFinite()) x_new = problem.prox_p(y + eta1 * g, eta1);
            if (!g.allFinite() || !x_new.allFinite()) {
                throw NumericalError("inner_accelerated_ascent: non-finite iterate at block " + std::to_string(k) +
                                     ", step " + std::to_string(j));
            }
            const Scalar beta_next = momentum_next(beta);
            y = x_new + ((beta - 1) / beta_next) * (x_new - x_prev);
            x_prev = std::move(x_new);
            beta = beta_next;
            ++ctl.steps;
        }
        x = x_prev;
        if (ctl.exit_tolerance > 0 && k + 1 < blocks) {
            Vector g = grad(x);
            if (detail::stat_y_from_gradient(problem, x, g, problem.constants.l22 + lam) <= ctl.exit_tolerance) {
                ctl.exited_early = true;
                break;
            }
            cached = std::move(g);
        }
    }
    return x;
}

template <class Scalar>
Vec<Scalar> inner_accelerated_ascent(const MinMaxProblem<Scalar>& problem,
                                     const Vec<Scalar>& theta,
                                     const Vec<Scalar>& alpha_start,
                                     const SolverParams<Scalar>& params)
{
    InnerControl<Scalar> ctl;
    return inner_accelerated_ascent(problem, theta, alpha_start, params, ctl);
}

template <class Scalar>
struct InnerSolution
{
    Vec<Scalar> alpha;
    Scalar value = 0;         // h_lambda(theta, alpha) - p(alpha)
    Scalar residual = 0;      // L * ||prox-gradient step||
    std::int64_t iterations = 0;
};

/*
 * High-accuracy maximization of h(theta, .) - lambda/2 ||. - alpha_hat||^2 - p(.)
 * by FISTA with gradient-based adaptive restart.
 */
template <class Scalar>
InnerSolution<Scalar> maximize_inner(const MinMaxProblem<Scalar>& problem,
                                     const Vec<Scalar>& theta,
                                     const Vec<Scalar>& alpha_start,
                                     Scalar lambda = 0,
                                     const Vec<Scalar>& alpha_hat = Vec<Scalar>(),
                                     Scalar tol = Scalar(1e-11),
                                     std::int64_t max_iter = 200000)
{
    using Vector = Vec<Scalar>;
    problem.check_point(theta, alpha_start);
    const Scalar l = problem.constants.l22 + lambda;
    if (!(l > 0)) throw std::invalid_argument("maximize_inner: l22 + lambda must be positive");
    auto grad = [&](const Vector& a) {
        Vector g = problem.grad_h_alpha(theta, a);
        if (lambda > 0) g -= lambda * (a - alpha_hat);
        return g;
    };
    Vector x = alpha_start;
    Vector y = x;
    Scalar t = 1;
    InnerSolution<Scalar> out;
    for (std::int64_t it = 0; it < max_iter; ++it) {
        const Vector gy = grad(y);
        Vector x_new = problem.prox_p(y + gy / l, Scalar(1) / l);
        if (!x_new.allFinite()) throw NumericalError("maximize_inner: non-finite iterate");
        const Vector dx = x_new - x;
        out.iterations = it + 1;
        // residual at y: how far one prox-gradient step moves
        const Scalar res = l * (x_new - y).norm();
        const Scalar scale = std::max<Scalar>(1, gy.norm());
        if (res <= tol * scale) {
            x = std::move(x_new);
            out.residual = res;
            break;
        }
        // ascent: restart when the step opposes the last move
        if ((x_new - y).dot(dx) < 0) {
            y = x_new;
            t = 1;
        } else {
            const Scalar t_next = (1 + std::sqrt(1 + 4 * t * t)) / 2;
            y = x_new + ((t - 1) / t_next) * dx;
            t = t_next;
        }
        x = std::move(x_new);
        out.residual = res;
    }
    out.alpha = x;
    out.value = problem.h_value(theta, x) - problem.p_value(x);
    if (lambda > 0) out.value -= lambda / 2 * (x - alpha_hat).squaredNorm();
    return out;
}

// g(theta) and its Danskin gradient for strongly concave (or regularized) games
template <class Scalar>
struct MaxFunctionValue
{
    Scalar value;
    Vec<Scalar> gradient;
    Vec<Scalar> alpha_star;
};

template <class Scalar>
MaxFunctionValue<Scalar> max_function(const MinMaxProblem<Scalar>& problem,
                                      const Vec<Scalar>& theta,
                                      const Vec<Scalar>& alpha_start,
                                      Scalar lambda = 0,
                                      const Vec<Scalar>& alpha_hat = Vec<Scalar>(),
                                      Scalar tol = Scalar(1e-11))
{
    auto s = maximize_inner(problem, theta, alpha_start, lambda, alpha_hat, tol);
    Vec<Scalar> g = problem.grad_h_theta(theta, s.alpha);
    return {s.value, std::move(g), std::move(s.alpha)};
}

/*
 * Fill delta_gap, d_gap and g_max when they are not positive.
 * Delta: inner gap at theta0 (and along a short pilot run).
 * D: decrease of g + q over the pilot run of prox-gradient steps on g.
 * g_max: largest ||grad_alpha h(theta0, .)|| over alpha0 and samples in the R-ball.
 */
template <class Scalar>
ProblemConstants<Scalar> estimate_gaps(const MinMaxProblem<Scalar>& problem,
                                       const Vec<Scalar>& theta0,
                                       const Vec<Scalar>& alpha0,
                                       Scalar lambda = 0,
                                       const Vec<Scalar>& alpha_hat = Vec<Scalar>(),
                                       int pilot_steps = 20,
                                       std::uint64_t seed = 0x5eed)
{
    ProblemConstants<Scalar> c = problem.constants;
    const Scalar floor_gap = Scalar(1e-12);
    auto fval = [&](const Vec<Scalar>& t, const Vec<Scalar>& a) {
        Scalar v = problem.h_value(t, a) - problem.p_value(a);
        if (lambda > 0) v -= lambda / 2 * (a - alpha_hat).squaredNorm();
        return v;
    };

    if (!(c.g_max > 0)) {
        Rng rng(seed);
        Scalar gm = problem.grad_h_alpha(theta0, alpha0).norm();
        const Vec<Scalar> center =
            problem.alpha_center.size() == problem.d_alpha ? problem.alpha_center : Vec<Scalar>::Zero(problem.d_alpha);
        for (int i = 0; i < 64; ++i) {
            const Vec<Scalar> a = problem.project_alpha(center + rng.in_ball<Scalar>(problem.d_alpha, c.radius_r));
            gm = std::max<Scalar>(gm, problem.grad_h_alpha(theta0, a).norm());
        }
        c.g_max = std::max(gm, floor_gap);
    }

    if (!(c.delta_gap > 0) || !(c.d_gap > 0)) {
        const Scalar mu = std::max(c.sigma, lambda);
        const Scalar lg = mu > 0 ? c.l11 + c.l12 * c.l12 / mu : c.l11;
        const Scalar step = lg > 0 ? Scalar(1) / lg : Scalar(1);
        auto s = maximize_inner(problem, theta0, alpha0, lambda, alpha_hat);
        Scalar delta = s.value - fval(theta0, alpha0);
        const Scalar start_obj = s.value + problem.q_value(theta0);
        Scalar best_obj = start_obj;
        Vec<Scalar> theta = theta0;
        Vec<Scalar> a_prev = s.alpha;
        for (int k = 0; k < pilot_steps; ++k) {
            theta = problem.prox_q(theta - step * problem.grad_h_theta(theta, a_prev), step);
            auto sk = maximize_inner(problem, theta, a_prev, lambda, alpha_hat);
            delta = std::max(delta, sk.value - fval(theta, a_prev));
            best_obj = std::min(best_obj, sk.value + problem.q_value(theta));
            a_prev = sk.alpha;
        }
        if (!(c.delta_gap > 0)) c.delta_gap = std::max(delta, floor_gap);
        if (!(c.d_gap > 0)) c.d_gap = std::max(start_obj - best_obj, floor_gap);
    }
    return c;
}

template <class Scalar>
RunTrace<Scalar> solve(const MinMaxProblem<Scalar>& problem,
                       const Vec<Scalar>& theta0,
                       const Vec<Scalar>& alpha0,
                       const SolverParams<Scalar>& params,
                       const StoppingRule& stop = StoppingRule{})
{
    problem.validate();
    problem.check_point(theta0, alpha0);
    params.validate(problem.d_alpha);
    require_finite(theta0, "theta0");
    require_finite(alpha0, "alpha0");

    const double tol = stop.tolerance >= 0 ? stop.tolerance : static_cast<double>(params.epsilon * params.epsilon);
    std::int64_t limit = params.t_outer;
    if (stop.max_iterations > 0) limit = stop.strict ? std::min(limit, stop.max_iterations) : stop.max_iterations;

    std::optional<MinMaxProblem<Scalar>> reg;
    if (params.lambda > 0) reg = regularize(problem, params.lambda, params.alpha_hat);

    detail::TraceBuilder<Scalar> tb(problem, reg ? &*reg : nullptr, "PA", stop, tol, theta0, alpha0);
    tb.trace().metadata = params.describe();
    tb.trace().metadata["strict"] = stop.strict ? "true" : "false";

    Vec<Scalar> theta = theta0;
    Vec<Scalar> alpha = alpha0;
    const Scalar gamma2 = Scalar(1) / params.eta2;
    std::int64_t grad_calls = 0;
    detail::Stopwatch clock;
    std::string reason = "iteration_limit";
    for (std::int64_t t = 0; t < limit; ++t) {
        clock.start();
        InnerControl<Scalar> ctl;
        if (!stop.strict) {
            ctl.exit_tolerance =
                static_cast<Scalar>(stop.inner_tolerance >= 0 ? stop.inner_tolerance : tol / 4);
        }
        Vec<Scalar> alpha_next = inner_accelerated_ascent(problem, theta, alpha, params, ctl);
        grad_calls += ctl.grad_calls;
        clock.stop();

        if (tb.record(t, theta, alpha_next, clock.seconds(), ctl.steps, grad_calls)) {
            reason = "tolerance";
            break;
        }

        clock.start();
        theta = rho_theta(problem, theta, alpha_next, gamma2);
        ++grad_calls;
        alpha = std::move(alpha_next);
        clock.stop();
        if (clock.seconds() > stop.max_seconds) {
            reason = "time_limit";
            break;
        }
    }
    return tb.finish(reason, grad_calls);
}

/*
 * Concave games: regularize around alpha_hat = alpha0 and run the solver on
 * f_lambda; measures in the trace are those of the original game.
 */
template <class Scalar>
RunTrace<Scalar> solve_concave(const MinMaxProblem<Scalar>& problem,
                               const Vec<Scalar>& theta0,
                               const Vec<Scalar>& alpha0,
                               Scalar epsilon,
                               const StoppingRule& stop = StoppingRule{})
{
    problem.validate();
    problem.check_point(theta0, alpha0);
    detail::check_epsilon(epsilon);
    ProblemConstants<Scalar> c = problem.constants;
    if (!c.gaps_known()) c = estimate_gaps(problem, theta0, alpha0, concave_lambda(c, epsilon), alpha0);
    const SolverParams<Scalar> params = derive_params_concave(c, epsilon, alpha0);
    return solve(problem, theta0, alpha0, params, stop);
}

template <class Scalar>
RunTrace<Scalar> solve_strongly_concave(const MinMaxProblem<Scalar>& problem,
                                        const Vec<Scalar>& theta0,
                                        const Vec<Scalar>& alpha0,
                                        Scalar epsilon,
                                        const StoppingRule& stop = StoppingRule{})
{
    problem.validate();
    problem.check_point(theta0, alpha0);
    ProblemConstants<Scalar> c = problem.constants;
    if (!c.gaps_known()) c = estimate_gaps(problem, theta0, alpha0);
    return solve(problem, theta0, alpha0, derive_params_strongly_concave(c, epsilon), stop);
}

} // namespace apgda
