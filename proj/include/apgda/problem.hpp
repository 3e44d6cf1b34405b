#pragma once
#include <apgda/types.hpp>
#include <cstdint>
#include <functional>
#include <string>

namespace apgda {

template <class Scalar>
struct ProblemConstants
{
    Scalar l11 = 0;
    Scalar l22 = 0;
    Scalar l12 = 0;
    Scalar sigma = 0;       // 0 means merely concave in alpha
    Scalar radius_r = 1;
    Scalar lp = 0;
    Scalar delta_gap = 0;   // <= 0 means "estimate before use"
    Scalar d_gap = 0;
    Scalar g_max = 0;
    bool radius_estimated = false;

    void validate() const
    {
        if (!(l11 >= 0) || !(l22 >= 0) || !(l12 >= 0) || !(sigma >= 0) || !(lp >= 0)) {
            throw std::invalid_argument("ProblemConstants: Lipschitz constants and sigma must be nonnegative");
        }
        if (!(radius_r > 0)) {
            throw std::invalid_argument("ProblemConstants: radius_r must be positive");
        }
        if (sigma > 0 && sigma > l22 * (1 + 1e-12)) {
            throw std::invalid_argument("ProblemConstants: sigma must not exceed l22");
        }
    }

    bool gaps_known() const { return delta_gap > 0 && d_gap > 0 && g_max > 0; }
};

template <class Scalar>
struct Iterate
{
    Vec<Scalar> theta;
    Vec<Scalar> alpha;
};

/*
 * Oracle bundle for f(theta, alpha) = h(theta, alpha) - p(alpha) + q(theta),
 * minimized over theta and maximized over alpha.
 * prox_p / prox_q are fused with the projections onto the feasible sets.
 */
template <class Scalar>
struct MinMaxProblem
{
    using Vector = Vec<Scalar>;
    using PairFn = std::function<Vector(const Vector&, const Vector&)>;
    using ValueFn = std::function<Scalar(const Vector&, const Vector&)>;
    using UnaryValueFn = std::function<Scalar(const Vector&)>;
    using ProxFn = std::function<Vector(const Vector&, Scalar)>;
    using MapFn = std::function<Vector(const Vector&)>;

    PairFn grad_h_theta;
    PairFn grad_h_alpha;
    ValueFn h_value;
    UnaryValueFn p_value;
    UnaryValueFn q_value;
    ProxFn prox_p;
    ProxFn prox_q;
    MapFn project_theta;
    MapFn project_alpha;
    // optional; an empty function means the zero subgradient
    MapFn subgrad_p;
    MapFn subgrad_q;

    ProblemConstants<Scalar> constants;
    Index d_theta = 0;
    Index d_alpha = 0;

    // centers of the balls hosting the feasible sets (used for sampling)
    Vector theta_center;
    Vector alpha_center;

    std::string kind;
    std::uint64_t hash = 0;

    void validate() const
    {
        if (d_theta <= 0 || d_alpha <= 0) {
            throw std::invalid_argument("MinMaxProblem: dimensions must be positive");
        }
        if (!grad_h_theta || !grad_h_alpha || !h_value || !p_value || !q_value ||
            !prox_p || !prox_q || !project_theta || !project_alpha) {
            throw std::invalid_argument("MinMaxProblem: missing oracle");
        }
        constants.validate();
    }

    void check_point(const Vector& theta, const Vector& alpha) const
    {
        if (theta.size() != d_theta || alpha.size() != d_alpha) {
            throw std::invalid_argument(
                "dimension mismatch: expected (" + std::to_string(d_theta) + "," +
                std::to_string(d_alpha) + "), got (" + std::to_string(theta.size()) + "," +
                std::to_string(alpha.size()) + ")");
        }
    }

    Vector sub_p(const Vector& alpha) const
    {
        return subgrad_p ? subgrad_p(alpha) : Vector::Zero(alpha.size());
    }

    Vector sub_q(const Vector& theta) const
    {
        return subgrad_q ? subgrad_q(theta) : Vector::Zero(theta.size());
    }
};

template <class Scalar>
Scalar evaluate_f(const MinMaxProblem<Scalar>& problem,
                  const Vec<Scalar>& theta,
                  const Vec<Scalar>& alpha)
{
    problem.check_point(theta, alpha);
    const Scalar v = problem.h_value(theta, alpha) - problem.p_value(alpha) + problem.q_value(theta);
    require_finite_scalar(v, "evaluate_f");
    return v;
}

/*
 * f_lambda = f - (lambda/2)||alpha - alpha_hat||^2.
 * Curvature constants shift by lambda; everything else is shared.
 */
template <class Scalar>
MinMaxProblem<Scalar> regularize(const MinMaxProblem<Scalar>& problem,
                                 Scalar lambda,
                                 const Vec<Scalar>& alpha_hat)
{
    if (!(lambda >= 0)) throw std::invalid_argument("regularize: lambda must be nonnegative");
    if (alpha_hat.size() != problem.d_alpha) {
        throw std::invalid_argument("regularize: alpha_hat has wrong dimension");
    }
    if (lambda == 0) return problem;
    MinMaxProblem<Scalar> out = problem;
    auto ga = problem.grad_h_alpha;
    auto hv = problem.h_value;
    out.grad_h_alpha = [ga, lambda, alpha_hat](const Vec<Scalar>& t, const Vec<Scalar>& a) {
        Vec<Scalar> g = ga(t, a);
        g -= lambda * (a - alpha_hat);
        return g;
    };
    out.h_value = [hv, lambda, alpha_hat](const Vec<Scalar>& t, const Vec<Scalar>& a) {
        return hv(t, a) - lambda / 2 * (a - alpha_hat).squaredNorm();
    };
    out.constants.l22 = problem.constants.l22 + lambda;
    out.constants.sigma = problem.constants.sigma + lambda;
    out.kind = problem.kind + "+reg";
    return out;
}

} // namespace apgda
