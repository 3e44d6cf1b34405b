#pragma once
// Independent reference computations used only by tests.
#include <apgda/games.hpp>
#include <cmath>
#include <functional>
#include <vector>

// concrete vectors for template deduction in calls
inline Eigen::VectorXd zeros(Eigen::Index n) { return Eigen::VectorXd::Zero(n); }
inline Eigen::VectorXd constant(Eigen::Index n, double v) { return Eigen::VectorXd::Constant(n, v); }

namespace oracle {

using Vd = Eigen::VectorXd;
using Md = Eigen::MatrixXd;

// golden-section minimization of a unimodal function on [lo, hi]
inline double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-13)
{
    const double g = (std::sqrt(5.0) - 1) / 2;
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol * (1 + std::abs(a) + std::abs(b))) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return (a + b) / 2;
}

// brute-force minimum over a (2k+1)^2 grid of a box; returns the minimizing point
inline Vd grid_min_2d(const std::function<double(const Vd&)>& f, const Vd& lo, const Vd& hi, int points = 401)
{
    Vd best = lo;
    double fb = std::numeric_limits<double>::infinity();
    Vd z(2);
    for (int i = 0; i < points; ++i) {
        z[0] = lo[0] + (hi[0] - lo[0]) * i / (points - 1);
        for (int j = 0; j < points; ++j) {
            z[1] = lo[1] + (hi[1] - lo[1]) * j / (points - 1);
            const double v = f(z);
            if (v < fb) {
                fb = v;
                best = z;
            }
        }
    }
    return best;
}

// min 1/2 x'Hx - c'x + tau ||x||_1 by cyclic coordinate descent
inline Vd lasso_cd(const Md& h, const Vd& c, double tau, double tol = 1e-12, int max_sweeps = 1000000)
{
    Vd x = Vd::Zero(c.size());
    Vd hx = Vd::Zero(c.size());
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double change = 0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double r = c[i] - (hx[i] - h(i, i) * x[i]);
            const double xi = (r > tau ? r - tau : (r < -tau ? r + tau : 0.0)) / h(i, i);
            const double d = xi - x[i];
            if (d != 0) {
                hx += h.col(i) * d;
                x[i] = xi;
                change = std::max(change, std::abs(d));
            }
        }
        if (change < tol) break;
    }
    return x;
}

inline double lasso_objective(const Md& h, const Vd& c, double tau, const Vd& x)
{
    return 0.5 * x.dot(h * x) - c.dot(x) + tau * x.lpNorm<1>();
}

// central finite-difference gradient
inline Vd fd_gradient(const std::function<double(const Vd&)>& f, const Vd& x, double step)
{
    Vd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Vd a = x, b = x;
        a[i] += step;
        b[i] -= step;
        g[i] = (f(a) - f(b)) / (2 * step);
    }
    return g;
}

// quadratic game h written out with explicit loops
inline double quadratic_h_loops(const apgda::ProblemData& d, const Vd& t, const Vd& a)
{
    const Md& q = d.matrix("Q");
    const Md& c = d.matrix("C");
    const Md& b = d.matrix("b");
    const double sigma = d.param("sigma");
    double v = 0;
    for (Eigen::Index i = 0; i < t.size(); ++i)
        for (Eigen::Index j = 0; j < t.size(); ++j) v += t[i] * q(i, j) * t[j];
    for (Eigen::Index i = 0; i < t.size(); ++i)
        for (Eigen::Index j = 0; j < a.size(); ++j) v += t[i] * c(i, j) * a[j];
    for (Eigen::Index j = 0; j < a.size(); ++j) v += -0.5 * sigma * a[j] * a[j] + b(j, 0) * a[j];
    return v;
}

// Welford running mean / sample standard deviation
struct Streaming
{
    long n = 0;
    double mean = 0, m2 = 0;
    void push(double x)
    {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double stddev() const { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0; }
};

// a point uniformly inside the Euclidean ball, with std::mt19937 (independent from the library Rng)
inline Vd ball_point(std::mt19937_64& g, Eigen::Index n, double r)
{
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud;
    Vd v(n);
    for (auto& e : v) e = nd(g);
    return v.normalized() * r * std::pow(ud(g), 1.0 / static_cast<double>(n));
}

} // namespace oracle
