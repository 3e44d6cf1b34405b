#pragma once
#include <apgda/prox.hpp>
#include <utility>

namespace apgda {

template <class Scalar>
struct StationarityReport
{
    Scalar stat_x = 0;
    Scalar stat_y = 0;
    Scalar type1_theta = 0;
    Scalar type1_alpha = 0;
    Scalar epsilon = 0;
    bool epsilon_fne = false;
    // constants the measures were computed with
    Scalar l11_used = 0;
    Scalar l22_used = 0;
};

namespace detail {

inline constexpr double measure_clip_tol = 1e-10;

template <class Scalar>
Scalar clip_measure(Scalar v, const char* what)
{
    require_finite_scalar(v, what);
    if (v > 0) return v;
    if (v >= -Scalar(measure_clip_tol)) return Scalar(0);
    throw NumericalError(std::string(what) + " is negative (" + std::to_string(static_cast<double>(v)) +
                         "); prox oracle or constant is wrong");
}

template <class Scalar>
Scalar positive_constant(Scalar l, const char* what)
{
    if (!(l > 0)) throw std::invalid_argument(std::string(what) + " must be positive to compute the measure");
    return l;
}

template <class Scalar>
struct ProxPoint
{
    Vec<Scalar> point;
    Scalar value;   // subproblem value at point
};

// min over t of <g, t - theta> + q(t) - q(theta) + l/2 ||t - theta||^2
template <class Scalar>
ProxPoint<Scalar> theta_subproblem(const MinMaxProblem<Scalar>& problem,
                                   const Vec<Scalar>& theta,
                                   const Vec<Scalar>& g,
                                   Scalar l)
{
    Vec<Scalar> tp = problem.prox_q(theta - g / l, Scalar(1) / l);
    const Vec<Scalar> d = tp - theta;
    const Scalar v = g.dot(d) + (problem.q_value(tp) - problem.q_value(theta)) + l / 2 * d.squaredNorm();
    return {std::move(tp), v};
}

// max over a of <g, a - alpha> - p(a) + p(alpha) - l/2 ||a - alpha||^2
template <class Scalar>
ProxPoint<Scalar> alpha_subproblem(const MinMaxProblem<Scalar>& problem,
                                   const Vec<Scalar>& alpha,
                                   const Vec<Scalar>& g,
                                   Scalar l)
{
    Vec<Scalar> ap = problem.prox_p(alpha + g / l, Scalar(1) / l);
    const Vec<Scalar> d = ap - alpha;
    const Scalar v = g.dot(d) - (problem.p_value(ap) - problem.p_value(alpha)) - l / 2 * d.squaredNorm();
    return {std::move(ap), v};
}

template <class Scalar>
Scalar stat_y_from_gradient(const MinMaxProblem<Scalar>& problem,
                            const Vec<Scalar>& alpha,
                            const Vec<Scalar>& g,
                            Scalar l22)
{
    return clip_measure(2 * l22 * alpha_subproblem(problem, alpha, g, l22).value, "stat_y");
}

} // namespace detail

template <class Scalar>
Scalar measure_x(const MinMaxProblem<Scalar>& problem,
                 const Vec<Scalar>& theta_bar,
                 const Vec<Scalar>& alpha_bar,
                 Scalar l11)
{
    problem.check_point(theta_bar, alpha_bar);
    detail::positive_constant(l11, "l11");
    const auto sp = detail::theta_subproblem(problem, theta_bar, problem.grad_h_theta(theta_bar, alpha_bar), l11);
    return detail::clip_measure(-2 * l11 * sp.value, "stat_x");
}

template <class Scalar>
Scalar measure_x(const MinMaxProblem<Scalar>& problem, const Vec<Scalar>& theta_bar, const Vec<Scalar>& alpha_bar)
{
    return measure_x(problem, theta_bar, alpha_bar, problem.constants.l11);
}

template <class Scalar>
Scalar measure_y(const MinMaxProblem<Scalar>& problem,
                 const Vec<Scalar>& theta_bar,
                 const Vec<Scalar>& alpha_bar,
                 Scalar l22)
{
    problem.check_point(theta_bar, alpha_bar);
    detail::positive_constant(l22, "l22");
    return detail::stat_y_from_gradient(problem, alpha_bar, problem.grad_h_alpha(theta_bar, alpha_bar), l22);
}

template <class Scalar>
Scalar measure_y(const MinMaxProblem<Scalar>& problem, const Vec<Scalar>& theta_bar, const Vec<Scalar>& alpha_bar)
{
    return measure_y(problem, theta_bar, alpha_bar, problem.constants.l22);
}

// (L11 * ||theta+ - theta||, L22 * ||alpha+ - alpha||)
template <class Scalar>
std::pair<Scalar, Scalar> measure_type1(const MinMaxProblem<Scalar>& problem,
                                        const Vec<Scalar>& theta_bar,
                                        const Vec<Scalar>& alpha_bar)
{
    problem.check_point(theta_bar, alpha_bar);
    const Scalar l11 = detail::positive_constant(problem.constants.l11, "l11");
    const Scalar l22 = detail::positive_constant(problem.constants.l22, "l22");
    const auto st = detail::theta_subproblem(problem, theta_bar, problem.grad_h_theta(theta_bar, alpha_bar), l11);
    const auto sa = detail::alpha_subproblem(problem, alpha_bar, problem.grad_h_alpha(theta_bar, alpha_bar), l22);
    const Scalar rt = l11 * (st.point - theta_bar).norm();
    const Scalar ra = l22 * (sa.point - alpha_bar).norm();
    require_finite_scalar(rt, "type1_theta");
    require_finite_scalar(ra, "type1_alpha");
    return {rt, ra};
}

template <class Scalar>
StationarityReport<Scalar> stationarity_report(const MinMaxProblem<Scalar>& problem,
                                               const Vec<Scalar>& theta_bar,
                                               const Vec<Scalar>& alpha_bar,
                                               Scalar epsilon)
{
    StationarityReport<Scalar> r;
    r.stat_x = measure_x(problem, theta_bar, alpha_bar);
    r.stat_y = measure_y(problem, theta_bar, alpha_bar);
    std::tie(r.type1_theta, r.type1_alpha) = measure_type1(problem, theta_bar, alpha_bar);
    r.epsilon = epsilon;
    r.epsilon_fne = r.stat_x <= epsilon * epsilon && r.stat_y <= epsilon * epsilon;
    r.l11_used = problem.constants.l11;
    r.l22_used = problem.constants.l22;
    return r;
}

} // namespace apgda
