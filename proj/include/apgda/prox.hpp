#pragma once
#include <apgda/problem.hpp>
#include <algorithm>

namespace apgda {

template <class Scalar>
struct ProxStep
{
    Vec<Scalar> center;
    Scalar gamma;   // quadratic weight, 1/step

    ProxStep(Vec<Scalar> c, Scalar g) : center(std::move(c)), gamma(g)
    {
        if (!(gamma > 0)) throw std::invalid_argument("ProxStep: gamma must be positive");
    }

    Scalar step() const { return Scalar(1) / gamma; }
};

template <class Derived>
Vec<typename Derived::Scalar> soft_threshold(const Eigen::MatrixBase<Derived>& x,
                                             typename Derived::Scalar tau)
{
    using Scalar = typename Derived::Scalar;
    if (!(tau >= 0)) throw std::invalid_argument("soft_threshold: tau must be nonnegative");
    require_finite(x, "soft_threshold input");
    return x.unaryExpr([tau](Scalar v) {
        const Scalar m = std::abs(v) - tau;
        return m > 0 ? (v > 0 ? m : -m) : Scalar(0);
    });
}

// radius bounds the squared distance: {y : ||y - center||^2 <= radius}
template <class Scalar>
Vec<Scalar> project_ball(const Vec<Scalar>& x, const Vec<Scalar>& center, Scalar radius)
{
    if (!(radius > 0)) throw std::invalid_argument("project_ball: radius must be positive");
    if (x.size() != center.size()) throw std::invalid_argument("project_ball: dimension mismatch");
    const Scalar d2 = (x - center).squaredNorm();
    if (d2 <= radius) return x;
    return center + (x - center) * (std::sqrt(radius) / std::sqrt(d2));
}

// ball of Euclidean radius r around the origin
template <class Scalar>
Vec<Scalar> project_norm_ball(const Vec<Scalar>& x, Scalar r)
{
    if (!(r > 0)) throw std::invalid_argument("project_norm_ball: radius must be positive");
    const Scalar n = x.norm();
    if (n <= r) return x;
    return x * (r / n);
}

// Frobenius ball around a matrix stored flattened; same squared-radius convention.
template <class Scalar>
Vec<Scalar> project_frobenius_ball(const Vec<Scalar>& a, const Vec<Scalar>& a_hat, Scalar radius)
{
    return project_ball<Scalar>(a, a_hat, radius);
}

// bounds may be infinite
template <class Scalar>
Vec<Scalar> project_box(const Vec<Scalar>& x, const Vec<Scalar>& lo, const Vec<Scalar>& hi)
{
    if (x.size() != lo.size() || x.size() != hi.size()) {
        throw std::invalid_argument("project_box: dimension mismatch");
    }
    if ((lo.array() > hi.array()).any()) throw std::invalid_argument("project_box: lo > hi");
    return x.cwiseMax(lo).cwiseMin(hi);
}

// prox of tau*||.||_1 + indicator(box)
template <class Scalar>
Vec<Scalar> prox_l1_box(const Vec<Scalar>& x, Scalar tau, const Vec<Scalar>& lo, const Vec<Scalar>& hi)
{
    return project_box<Scalar>(soft_threshold(x, tau), lo, hi);
}

// prox of tau*||.||_1 + indicator(||y|| <= r); exact for a ball centered at the origin
template <class Scalar>
Vec<Scalar> prox_l1_ball(const Vec<Scalar>& x, Scalar tau, Scalar r)
{
    return project_norm_ball<Scalar>(soft_threshold(x, tau), r);
}

template <class Scalar>
Vec<Scalar> sign_subgradient(const Vec<Scalar>& x, Scalar tau)
{
    return x.unaryExpr([tau](Scalar v) { return v > 0 ? tau : (v < 0 ? -tau : Scalar(0)); });
}

/*
 * rho_alpha: argmax <grad_alpha h, a - alpha> - gamma1/2 ||a - alpha||^2 - p(a)
 */
template <class Scalar>
Vec<Scalar> rho_alpha(const MinMaxProblem<Scalar>& problem,
                      const Vec<Scalar>& theta,
                      const Vec<Scalar>& alpha,
                      Scalar gamma1)
{
    problem.check_point(theta, alpha);
    const ProxStep<Scalar> s(alpha + problem.grad_h_alpha(theta, alpha) / gamma1, gamma1);
    Vec<Scalar> out = problem.prox_p(s.center, s.step());
    require_finite(out, "rho_alpha");
    return out;
}

/*
 * rho_theta: argmin <grad_theta h, t - theta> + gamma2/2 ||t - theta||^2 + q(t)
 */
template <class Scalar>
Vec<Scalar> rho_theta(const MinMaxProblem<Scalar>& problem,
                      const Vec<Scalar>& theta,
                      const Vec<Scalar>& alpha,
                      Scalar gamma2)
{
    problem.check_point(theta, alpha);
    const ProxStep<Scalar> s(theta - problem.grad_h_theta(theta, alpha) / gamma2, gamma2);
    Vec<Scalar> out = problem.prox_q(s.center, s.step());
    require_finite(out, "rho_theta");
    return out;
}

} // namespace apgda
