#include <apgda/games.hpp>
#include <apgda/problem_io.hpp>
#include <cmath>
#include <limits>

namespace apgda {

const Mat<double>& ProblemData::matrix(const std::string& name) const
{
    auto it = matrices.find(name);
    if (it == matrices.end()) throw std::invalid_argument("problem data has no matrix '" + name + "'");
    return it->second;
}

double ProblemData::param(const std::string& name) const
{
    auto it = params.find(name);
    if (it == params.end()) throw std::invalid_argument("problem data has no parameter '" + name + "'");
    return it->second;
}

double spectral_norm(const Mat<double>& m, int iterations)
{
    if (m.size() == 0) return 0.0;
    const Mat<double> g = m.transpose() * m;
    Vec<double> v = Vec<double>::Ones(g.cols()) / std::sqrt(static_cast<double>(g.cols()));
    double lambda = 0.0;
    for (int i = 0; i < iterations; ++i) {
        Vec<double> w = g * v;
        const double nw = w.norm();
        if (nw == 0.0) {
            // start vector in the null space; perturb deterministically
            v = Vec<double>::LinSpaced(g.cols(), 1.0, 2.0).normalized();
            w = g * v;
            if (w.norm() == 0.0) return 0.0;
            continue;
        }
        lambda = v.dot(w);
        v = w / nw;
    }
    lambda = std::max(lambda, v.dot(g * v));
    return std::sqrt(std::max(lambda, 0.0));
}

ProblemData quadratic_game_data(Index d_theta, Index d_alpha, std::uint64_t seed, double sigma,
                                const QuadraticOptions& opts)
{
    if (d_theta <= 0 || d_alpha <= 0) throw std::invalid_argument("quadratic game: dims must be positive");
    if (!(sigma >= 0)) throw std::invalid_argument("quadratic game: sigma must be nonnegative");
    if (!(opts.tau >= 0)) throw std::invalid_argument("quadratic game: tau must be nonnegative");
    if (!(opts.radius > 0)) throw std::invalid_argument("quadratic game: radius must be positive");

    Rng rng(seed);
    ProblemData d;
    d.kind = "quadratic";
    d.seed = seed;
    d.d_theta = d_theta;
    d.d_alpha = d_alpha;
    d.params = {{"sigma", sigma}, {"tau", opts.tau}, {"radius", opts.radius},
                {"zero_linear", opts.zero_linear ? 1.0 : 0.0}, {"bilinear", opts.bilinear ? 1.0 : 0.0}};

    const Mat<double> g = rng.normal_matrix(d_theta, d_theta);
    Mat<double> q = (g + g.transpose()) / (2.0 * std::sqrt(static_cast<double>(d_theta)));
    if (opts.bilinear) q.setZero();
    const Mat<double> c = rng.normal_matrix(d_theta, d_alpha) / std::sqrt(static_cast<double>(d_alpha));
    Vec<double> b = 0.5 * rng.normal_vector(d_alpha);
    if (opts.zero_linear || opts.bilinear) b.setZero();
    d.matrices["Q"] = q;
    d.matrices["C"] = c;
    d.matrices["b"] = b;

    auto& k = d.constants;
    k.l12 = spectral_norm(c);
    k.l11 = 2.0 * spectral_norm(q);
    if (!(k.l11 > 0)) k.l11 = k.l12 > 0 ? k.l12 : 1.0;
    k.sigma = sigma;
    k.l22 = sigma > 0 ? sigma : (k.l12 > 0 ? k.l12 : 1.0);
    k.radius_r = opts.radius;
    k.lp = opts.tau * std::sqrt(static_cast<double>(d_alpha));
    return d;
}

ProblemData lasso_attack_data(Index m, Index n, Index sparsity, double xi, double delta, double noise_std,
                              std::uint64_t seed)
{
    if (m <= 0 || n <= 0) throw std::invalid_argument("lasso attack: m and n must be positive");
    if (sparsity <= 0 || sparsity > n) throw std::invalid_argument("lasso attack: sparsity must lie in [1, n]");
    if (!(xi > 0)) throw std::invalid_argument("lasso attack: xi must be positive");
    if (!(delta > 0)) throw std::invalid_argument("lasso attack: delta must be positive");
    if (!(noise_std >= 0)) throw std::invalid_argument("lasso attack: noise_std must be nonnegative");

    Rng rng(seed);
    ProblemData d;
    d.kind = "lasso_attack";
    d.seed = seed;
    d.d_theta = m * n;
    d.d_alpha = n;
    d.params = {{"m", static_cast<double>(m)}, {"n", static_cast<double>(n)},
                {"sparsity", static_cast<double>(sparsity)}, {"xi", xi}, {"delta", delta},
                {"noise_std", noise_std}};

    // support: partial Fisher-Yates over 0..n-1
    std::vector<Index> idx(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    Vec<double> x_star = Vec<double>::Zero(n);
    for (Index i = 0; i < sparsity; ++i) {
        const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    for (Index i = 0; i < sparsity; ++i) x_star[idx[static_cast<std::size_t>(i)]] = rng.normal();
    const Mat<double> a = rng.normal_matrix(m, n);
    const Vec<double> e = noise_std * rng.normal_vector(m);
    const Vec<double> b = a * x_star + e;
    d.matrices["A_hat"] = a;
    d.matrices["b"] = b;
    d.matrices["x_star"] = x_star;
    d.matrices["noise"] = e;

    const double a_norm = spectral_norm(a);
    const double sa = a_norm + std::sqrt(delta);
    const Mat<double> gram = a * a.transpose() + xi * Mat<double>::Identity(m, m);
    const Vec<double> x_ridge = a.transpose() * gram.ldlt().solve(b);
    const double r_alpha = 2.0 * x_ridge.norm();
    d.params["r_alpha"] = r_alpha;

    auto& k = d.constants;
    k.l11 = 2.0 * r_alpha * r_alpha;
    k.l22 = 2.0 * sa * sa;
    k.l12 = 4.0 * sa * r_alpha + 2.0 * b.norm();
    k.sigma = 0.0;
    k.radius_r = std::max(std::sqrt(delta), r_alpha);
    k.lp = xi * std::sqrt(static_cast<double>(n));
    k.radius_estimated = true;
    return d;
}

ProblemData box_quadratic_1d_data(double a, double c, double sigma, double half_width)
{
    if (!(sigma >= 0)) throw std::invalid_argument("box quadratic: sigma must be nonnegative");
    if (!(half_width > 0)) throw std::invalid_argument("box quadratic: half_width must be positive");
    ProblemData d;
    d.kind = "box_quadratic_1d";
    d.d_theta = 1;
    d.d_alpha = 1;
    d.params = {{"a", a}, {"c", c}, {"sigma", sigma}, {"half_width", half_width}};
    auto& k = d.constants;
    k.l11 = std::abs(a);
    k.l12 = std::abs(c);
    k.sigma = sigma;
    k.l22 = sigma > 0 ? sigma : (k.l12 > 0 ? k.l12 : 1.0);
    if (!(k.l11 > 0)) k.l11 = k.l12 > 0 ? k.l12 : 1.0;
    k.radius_r = half_width;
    k.lp = 0.0;
    return d;
}

ProblemData appendix_1d_data()
{
    ProblemData d;
    d.kind = "appendix_1d";
    d.d_theta = 1;
    d.d_alpha = 1;
    auto& k = d.constants;
    k.l11 = 1.0;
    k.l22 = 1.0;
    k.l12 = 0.0;
    k.sigma = 1.0;
    k.radius_r = 1.0;
    k.lp = 0.0;
    return d;
}

namespace {

using Vd = Vec<double>;

MinMaxProblem<double> build_quadratic(const ProblemData& d)
{
    const Mat<double> q = d.matrix("Q");
    const Mat<double> c = d.matrix("C");
    const Vd b = d.matrix("b").col(0);
    const double sigma = d.param("sigma");
    const double tau = d.param("tau");
    const double r = d.param("radius");

    MinMaxProblem<double> p;
    p.grad_h_theta = [q, c](const Vd& t, const Vd& a) -> Vd { return 2.0 * (q * t) + c * a; };
    p.grad_h_alpha = [c, b, sigma](const Vd& t, const Vd& a) -> Vd {
        return c.transpose() * t - sigma * a + b;
    };
    p.h_value = [q, c, b, sigma](const Vd& t, const Vd& a) {
        return t.dot(q * t) + t.dot(c * a) - 0.5 * sigma * a.squaredNorm() + b.dot(a);
    };
    p.p_value = [tau](const Vd& a) { return tau * a.lpNorm<1>(); };
    p.q_value = [](const Vd&) { return 0.0; };
    p.prox_p = [tau, r](const Vd& x, double step) { return prox_l1_ball<double>(x, tau * step, r); };
    p.prox_q = [r](const Vd& x, double) { return project_norm_ball<double>(x, r); };
    p.project_theta = [r](const Vd& x) { return project_norm_ball<double>(x, r); };
    p.project_alpha = [r](const Vd& x) { return project_norm_ball<double>(x, r); };
    p.subgrad_p = [tau](const Vd& a) { return sign_subgradient<double>(a, tau); };
    return p;
}

MinMaxProblem<double> build_lasso(const ProblemData& d)
{
    const Index m = static_cast<Index>(d.param("m"));
    const Index n = static_cast<Index>(d.param("n"));
    const double xi = d.param("xi");
    const double delta = d.param("delta");
    const Vd a_hat = flatten_row_major(d.matrix("A_hat"));
    const Vd b = d.matrix("b").col(0);
    using CMap = Eigen::Map<const RowMat>;

    MinMaxProblem<double> p;
    p.grad_h_theta = [m, n, b](const Vd& t, const Vd& x) -> Vd {
        const Vd r = CMap(t.data(), m, n) * x - b;
        RowMat g = -2.0 * r * x.transpose();
        return Eigen::Map<const Vd>(g.data(), g.size());
    };
    p.grad_h_alpha = [m, n, b](const Vd& t, const Vd& x) -> Vd {
        const CMap a(t.data(), m, n);
        return -2.0 * (a.transpose() * (a * x - b));
    };
    p.h_value = [m, n, b](const Vd& t, const Vd& x) { return -(CMap(t.data(), m, n) * x - b).squaredNorm(); };
    p.p_value = [xi](const Vd& x) { return xi * x.lpNorm<1>(); };
    p.q_value = [a_hat, delta](const Vd& t) {
        return (t - a_hat).squaredNorm() <= delta * (1.0 + 1e-9) ? 0.0 : std::numeric_limits<double>::infinity();
    };
    p.prox_p = [xi](const Vd& x, double step) { return soft_threshold(x, xi * step); };
    p.prox_q = [a_hat, delta](const Vd& t, double) { return project_frobenius_ball<double>(t, a_hat, delta); };
    p.project_theta = [a_hat, delta](const Vd& t) { return project_frobenius_ball<double>(t, a_hat, delta); };
    p.project_alpha = [](const Vd& x) { return x; };
    p.subgrad_p = [xi](const Vd& x) { return sign_subgradient<double>(x, xi); };
    p.theta_center = a_hat;
    return p;
}

MinMaxProblem<double> build_box_quadratic(const ProblemData& d)
{
    const double a = d.param("a");
    const double c = d.param("c");
    const double sigma = d.param("sigma");
    const double w = d.param("half_width");
    const Vd lo = Vd::Constant(1, -w);
    const Vd hi = Vd::Constant(1, w);
    MinMaxProblem<double> p;
    p.grad_h_theta = [a, c](const Vd& t, const Vd& al) -> Vd { return a * t + c * al; };
    p.grad_h_alpha = [c, sigma](const Vd& t, const Vd& al) -> Vd { return c * t - sigma * al; };
    p.h_value = [a, c, sigma](const Vd& t, const Vd& al) {
        return 0.5 * a * t.squaredNorm() + c * t.dot(al) - 0.5 * sigma * al.squaredNorm();
    };
    p.p_value = [](const Vd&) { return 0.0; };
    p.q_value = [](const Vd&) { return 0.0; };
    p.prox_p = [lo, hi](const Vd& x, double) { return project_box<double>(x, lo, hi); };
    p.prox_q = [lo, hi](const Vd& x, double) { return project_box<double>(x, lo, hi); };
    p.project_theta = [lo, hi](const Vd& x) { return project_box<double>(x, lo, hi); };
    p.project_alpha = [lo, hi](const Vd& x) { return project_box<double>(x, lo, hi); };
    return p;
}

MinMaxProblem<double> build_appendix(const ProblemData&)
{
    const Vd lo = Vd::Constant(1, 1.0);
    const Vd hi = Vd::Constant(1, std::numeric_limits<double>::infinity());
    MinMaxProblem<double> p;
    p.grad_h_theta = [](const Vd& t, const Vd&) -> Vd { return t; };
    p.grad_h_alpha = [](const Vd&, const Vd& al) -> Vd { return -al; };
    p.h_value = [](const Vd& t, const Vd& al) { return 0.5 * t.squaredNorm() - 0.5 * al.squaredNorm(); };
    p.p_value = [](const Vd&) { return 0.0; };
    p.q_value = [](const Vd& t) { return t[0] >= 1.0 ? 0.0 : std::numeric_limits<double>::infinity(); };
    p.prox_p = [](const Vd& x, double) { return x; };
    p.prox_q = [lo, hi](const Vd& x, double) { return project_box<double>(x, lo, hi); };
    p.project_theta = [lo, hi](const Vd& x) { return project_box<double>(x, lo, hi); };
    p.project_alpha = [](const Vd& x) { return x; };
    return p;
}

} // namespace

MinMaxProblem<double> build_problem(const ProblemData& data)
{
    MinMaxProblem<double> p;
    if (data.kind == "quadratic") {
        p = build_quadratic(data);
    } else if (data.kind == "lasso_attack") {
        p = build_lasso(data);
    } else if (data.kind == "box_quadratic_1d") {
        p = build_box_quadratic(data);
    } else if (data.kind == "appendix_1d") {
        p = build_appendix(data);
    } else {
        throw std::invalid_argument("unknown problem kind '" + data.kind + "'");
    }
    p.kind = data.kind;
    p.d_theta = data.d_theta;
    p.d_alpha = data.d_alpha;
    p.constants = data.constants;
    if (p.theta_center.size() != p.d_theta) p.theta_center = Vd::Zero(p.d_theta);
    if (p.alpha_center.size() != p.d_alpha) p.alpha_center = Vd::Zero(p.d_alpha);
    p.hash = problem_hash(data);
    p.validate();
    return p;
}

double lasso_value(const ProblemData& data, const Vec<double>& theta, const Vec<double>& x)
{
    if (data.kind != "lasso_attack") throw std::invalid_argument("lasso_value: not a LASSO attack problem");
    const Index m = static_cast<Index>(data.param("m"));
    const Index n = static_cast<Index>(data.param("n"));
    const Eigen::Map<const RowMat> a(theta.data(), m, n);
    return (a * x - data.matrix("b").col(0)).squaredNorm() + data.param("xi") * x.lpNorm<1>();
}

} // namespace apgda
