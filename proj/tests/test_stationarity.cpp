#include <doctest.h>
#include <oracles.hpp>

#include <apgda/games.hpp>
#include <apgda/stationarity.hpp>

#include <random>

using namespace apgda;
using Vd = Eigen::VectorXd;

namespace {

Vd s1(double x) { return constant(1, x); }

// quadratic game on a box [-1, 1]^2 with l1 term, for grid oracles
MinMaxProblem<double> box_game(std::uint64_t seed)
{
    auto d = quadratic_game_data(2, 2, seed, 0.7);
    auto p = build_problem(d);
    const Vd lo = constant(2, -1), hi = constant(2, 1);
    const double tau = d.param("tau");
    p.prox_p = [lo, hi, tau](const Vd& x, double s) { return prox_l1_box<double>(x, tau * s, lo, hi); };
    p.prox_q = [lo, hi](const Vd& x, double) { return project_box<double>(x, lo, hi); };
    return p;
}

} // namespace

TEST_SUITE("stationarity") {

TEST_CASE("appendix example: type-1 = eps, type-2 = 2 eps + eps^2")
{
    const auto p = build_problem(appendix_1d_data());
    for (double eps : {0.01, 0.1, 0.5}) {
        const auto [t1, a1] = measure_type1(p, s1(1 + eps), s1(0));
        CHECK(std::abs(t1 - eps) <= 1e-12);
        CHECK(a1 == 0.0);
        CHECK(std::abs(measure_x(p, s1(1 + eps), s1(0)) - (2 * eps + eps * eps)) <= 1e-12);
        CHECK(measure_y(p, s1(1 + eps), s1(0)) == 0.0);
    }
}

TEST_CASE("measures vanish at an exact equilibrium")
{
    const auto p = build_problem(box_quadratic_1d_data(1.0, 1.0, 1.0));
    const auto r = stationarity_report(p, s1(0), s1(0), 0.1);
    CHECK(r.stat_x == 0.0);
    CHECK(r.stat_y == 0.0);
    CHECK(r.type1_theta == 0.0);
    CHECK(r.type1_alpha == 0.0);
    CHECK(r.epsilon_fne);
    CHECK(r.l11_used == 1.0);
}

TEST_CASE("shrinkage kills the gradient at the kink")
{
    // h = -a^2/2 + a, p = |a|, alpha = 0, L22 = 1
    MinMaxProblem<double> p = build_problem(appendix_1d_data());
    p.grad_h_alpha = [](const Vd&, const Vd& a) -> Vd { return Vd::Ones(1) - a; };
    p.h_value = [](const Vd& t, const Vd& a) { return 0.5 * t.squaredNorm() - 0.5 * a.squaredNorm() + a.sum(); };
    p.p_value = [](const Vd& a) { return a.lpNorm<1>(); };
    p.prox_p = [](const Vd& x, double s) { return soft_threshold(x, s); };
    CHECK(measure_y(p, s1(1), s1(0)) == 0.0);
    CHECK(measure_type1(p, s1(1), s1(0)).second == 0.0);
    // with a smaller l1 weight the point is not stationary
    p.p_value = [](const Vd& a) { return 0.5 * a.lpNorm<1>(); };
    p.prox_p = [](const Vd& x, double s) { return soft_threshold(x, 0.5 * s); };
    CHECK(measure_y(p, s1(1), s1(0)) > 0.0);
}

TEST_CASE("measures match grid oracles in two dimensions")
{
    std::mt19937_64 g(12);
    std::uniform_real_distribution<double> ud(-1, 1);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto p = box_game(seed);
        Vd t(2), a(2);
        t << ud(g), ud(g);
        a << ud(g), ud(g);
        const double l11 = p.constants.l11, l22 = p.constants.l22;
        const Vd gt = p.grad_h_theta(t, a), ga = p.grad_h_alpha(t, a);
        auto sub_x = [&](const Vd& y) { return gt.dot(y - t) + l11 / 2 * (y - t).squaredNorm(); };
        auto sub_y = [&](const Vd& y) {
            return -(ga.dot(y - a) - p.p_value(y) + p.p_value(a) - l22 / 2 * (y - a).squaredNorm());
        };
        const Vd lo = constant(2, -1), hi = constant(2, 1);
        const double gx = -2 * l11 * sub_x(oracle::grid_min_2d(sub_x, lo, hi));
        const double gy = -2 * l22 * sub_y(oracle::grid_min_2d(sub_y, lo, hi));
        CHECK(std::abs(measure_x(p, t, a) - gx) <= 1e-3);
        CHECK(std::abs(measure_y(p, t, a) - gy) <= 1e-3);
        // exact solution is at least as good as any grid point
        CHECK(measure_x(p, t, a) >= gx - 1e-12);
        CHECK(measure_y(p, t, a) >= gy - 1e-12);
    }
}

TEST_CASE("type-1 residual equals the gradient norm without constraints")
{
    auto p = build_problem(box_quadratic_1d_data(2.0, 0.5, 1.0, 1e6));
    p.constants.l11 = 1.0;
    const Vd t = s1(0.3), a = s1(-0.2);
    CHECK(measure_type1(p, t, a).first == doctest::Approx(std::abs(p.grad_h_theta(t, a)[0])).epsilon(1e-14));
    CHECK(measure_type1(p, t, a).second == doctest::Approx(std::abs(p.grad_h_alpha(t, a)[0])).epsilon(1e-14));
}

TEST_CASE("implication inequality on random composite instances")
{
    std::mt19937_64 g(2024);
    std::uniform_int_distribution<int> dim(1, 5);
    int violations = 0;
    for (int k = 0; k < 1000; ++k) {
        const auto p = make_quadratic_game(dim(g), dim(g), static_cast<std::uint64_t>(k), k % 3 == 0 ? 0.0 : 0.5);
        const Vd t = oracle::ball_point(g, p.d_theta, 1.0), a = oracle::ball_point(g, p.d_alpha, 1.0);
        const auto [r1t, r1a] = measure_type1(p, t, a);
        const double dx = measure_x(p, t, a), dy = measure_y(p, t, a);
        if (r1t > std::sqrt(std::max(dx, 0.0)) + 1e-10) ++violations;
        if (r1a > std::sqrt(std::max(dy, 0.0)) + 1e-10) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("measures ignore constant shifts of p and q")
{
    const auto p = make_quadratic_game(3, 2, 4, 0.5);
    auto shifted = p;
    shifted.p_value = [pv = p.p_value](const Vd& a) { return pv(a) + 7.0; };
    shifted.q_value = [qv = p.q_value](const Vd& t) { return qv(t) - 3.0; };
    std::mt19937_64 g(3);
    for (int k = 0; k < 20; ++k) {
        const Vd t = oracle::ball_point(g, 3, 1.0), a = oracle::ball_point(g, 2, 1.0);
        CHECK(measure_x(shifted, t, a) == doctest::Approx(measure_x(p, t, a)).epsilon(1e-12));
        CHECK(measure_y(shifted, t, a) == doctest::Approx(measure_y(p, t, a)).epsilon(1e-12));
    }
}

TEST_CASE("negative measures are clipped or rejected")
{
    CHECK(detail::clip_measure(-1e-14, "m") == 0.0);
    CHECK(detail::clip_measure(0.5, "m") == 0.5);
    CHECK_THROWS_AS(detail::clip_measure(-1e-6, "m"), NumericalError);
    CHECK_THROWS_AS(detail::clip_measure(std::nan(""), "m"), NumericalError);

    // a wrong prox (moves uphill) produces a clearly negative measure
    auto p = build_problem(box_quadratic_1d_data(1.0, 0.0, 1.0, 10.0));
    p.prox_q = [](const Vd& x, double) { return Vd(x.array() + 5.0); };
    CHECK_THROWS_AS(measure_x(p, s1(0), s1(0)), NumericalError);

    auto z = build_problem(appendix_1d_data());
    z.constants.l11 = 0;
    CHECK_THROWS_AS(measure_x(z, s1(1), s1(0)), std::invalid_argument);
}

}
