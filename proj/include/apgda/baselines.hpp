#pragma once
#include <apgda/solver.hpp>

namespace apgda {

enum class StepSchedule { constant, inverse_sqrt };

inline std::string to_string(StepSchedule s)
{
    return s == StepSchedule::constant ? "constant" : "inverse-sqrt";
}

inline StepSchedule parse_schedule(const std::string& s)
{
    if (s == "constant") return StepSchedule::constant;
    if (s == "inverse-sqrt" || s == "inverse_sqrt") return StepSchedule::inverse_sqrt;
    throw std::invalid_argument("unknown step schedule '" + s + "'");
}

template <class Scalar>
struct BaselineParams
{
    Scalar step_theta = 0;
    Scalar step_alpha = 0;
    std::int64_t t_max = 1;
    StepSchedule step_schedule = StepSchedule::constant;

    void validate() const
    {
        if (!(step_theta > 0) || !(step_alpha > 0)) throw std::invalid_argument("BaselineParams: steps must be positive");
        if (t_max < 1) throw std::invalid_argument("BaselineParams: t_max must be >= 1");
    }

    Scalar factor(std::int64_t t) const
    {
        return step_schedule == StepSchedule::constant ? Scalar(1) : Scalar(1) / std::sqrt(Scalar(t + 1));
    }
};

template <class Scalar>
BaselineParams<Scalar> default_pda_params(const ProblemConstants<Scalar>& c, std::int64_t t_max)
{
    BaselineParams<Scalar> p;
    p.step_alpha = Scalar(1) / c.l22;
    p.step_theta = Scalar(1) / c.l11;
    p.t_max = t_max;
    p.step_schedule = StepSchedule::constant;
    return p;
}

template <class Scalar>
BaselineParams<Scalar> default_sda_params(const ProblemConstants<Scalar>& c, std::int64_t t_max)
{
    BaselineParams<Scalar> p;
    p.step_alpha = p.step_theta = Scalar(1) / std::max(c.l11, c.l22);
    p.t_max = t_max;
    p.step_schedule = StepSchedule::inverse_sqrt;
    return p;
}

namespace detail {

inline std::string precise(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

template <class Scalar, class AlphaStep, class ThetaStep>
RunTrace<Scalar> run_baseline(const char* name,
                              const MinMaxProblem<Scalar>& problem,
                              const Vec<Scalar>& theta0,
                              const Vec<Scalar>& alpha0,
                              const BaselineParams<Scalar>& params,
                              const StoppingRule& stop,
                              AlphaStep alpha_step,
                              ThetaStep theta_step)
{
    problem.validate();
    problem.check_point(theta0, alpha0);
    params.validate();
    require_finite(theta0, "theta0");
    require_finite(alpha0, "alpha0");
    const std::int64_t limit = stop.max_iterations > 0 ? stop.max_iterations : params.t_max;
    const double tol = stop.tolerance;

    TraceBuilder<Scalar> tb(problem, nullptr, name, stop, tol, theta0, alpha0);
    auto& md = tb.trace().metadata;
    md["step_theta"] = precise(params.step_theta);
    md["step_alpha"] = precise(params.step_alpha);
    md["t_max"] = std::to_string(params.t_max);
    md["step_schedule"] = to_string(params.step_schedule);

    Vec<Scalar> theta = theta0;
    Vec<Scalar> alpha = alpha0;
    std::int64_t grad_calls = 0;
    Stopwatch clock;
    std::string reason = "iteration_limit";
    for (std::int64_t t = 0; t < limit; ++t) {
        const Scalar f = params.factor(t);
        clock.start();
        Vec<Scalar> alpha_next = alpha_step(theta, alpha, params.step_alpha * f);
        ++grad_calls;
        clock.stop();
        if (tb.record(t, theta, alpha_next, clock.seconds(), 1, grad_calls)) {
            reason = "tolerance";
            break;
        }
        clock.start();
        theta = theta_step(theta, alpha_next, params.step_theta * f);
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

} // namespace detail

// alternating projected subgradient steps; the l1 subgradient at 0 is 0
template <class Scalar>
RunTrace<Scalar> run_sda(const MinMaxProblem<Scalar>& problem,
                         const Vec<Scalar>& theta0,
                         const Vec<Scalar>& alpha0,
                         const BaselineParams<Scalar>& params,
                         const StoppingRule& stop = StoppingRule{})
{
    auto a_step = [&](const Vec<Scalar>& th, const Vec<Scalar>& a, Scalar s) {
        return problem.project_alpha(a + s * (problem.grad_h_alpha(th, a) - problem.sub_p(a)));
    };
    auto t_step = [&](const Vec<Scalar>& th, const Vec<Scalar>& a, Scalar s) {
        return problem.project_theta(th - s * (problem.grad_h_theta(th, a) + problem.sub_q(th)));
    };
    return detail::run_baseline("SDA", problem, theta0, alpha0, params, stop, a_step, t_step);
}

// one proximal ascent step in alpha, then one proximal descent step in theta
template <class Scalar>
RunTrace<Scalar> run_pda(const MinMaxProblem<Scalar>& problem,
                         const Vec<Scalar>& theta0,
                         const Vec<Scalar>& alpha0,
                         const BaselineParams<Scalar>& params,
                         const StoppingRule& stop = StoppingRule{})
{
    auto a_step = [&](const Vec<Scalar>& th, const Vec<Scalar>& a, Scalar s) {
        return rho_alpha(problem, th, a, Scalar(1) / s);
    };
    auto t_step = [&](const Vec<Scalar>& th, const Vec<Scalar>& a, Scalar s) {
        return rho_theta(problem, th, a, Scalar(1) / s);
    };
    return detail::run_baseline("PDA", problem, theta0, alpha0, params, stop, a_step, t_step);
}

} // namespace apgda
