// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <oracles.hpp>

#include <apgda/experiments.hpp>
#include <apgda/stationarity.hpp>
#include <apgda/trace_io.hpp>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace apgda;
using Vd = Eigen::VectorXd;
using Md = Eigen::MatrixXd;
namespace fs = std::filesystem;

namespace {

struct Outcome
{
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(const std::string& id, const std::string& title, double limit_s, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_s > 0 && s > limit_s) {
        o.pass = false;
        o.detail += " [runtime limit exceeded]";
    }
    if (!o.pass) ++failures;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2fs", s);
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " (" << buf << ") "
              << o.detail << std::endl;
}

// informational line, never gates
void note(const std::string& id, const std::string& text)
{
    std::cout << "INFO criterion " << id << ": " << text << std::endl;
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::uint64_t bits(double v)
{
    std::uint64_t b;
    std::memcpy(&b, &v, sizeof b);
    return b;
}

bool same_bits(const Vd& a, const Vd& b)
{
    if (a.size() != b.size()) return false;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (bits(a[i]) != bits(b[i])) return false;
    return true;
}

bool same_run(const RunTrace<double>& a, const RunTrace<double>& b)
{
    if (a.records.size() != b.records.size() || a.iterates.size() != b.iterates.size()) return false;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        const auto &x = a.records[i], &y = b.records[i];
        if (bits(x.g_value) != bits(y.g_value) || bits(x.stat_x) != bits(y.stat_x) || bits(x.stat_y) != bits(y.stat_y) ||
            bits(x.stat_y_reg) != bits(y.stat_y_reg) || x.grad_calls != y.grad_calls || x.inner_iters != y.inner_iters) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.iterates.size(); ++i) {
        if (!same_bits(a.iterates[i].theta, b.iterates[i].theta) || !same_bits(a.iterates[i].alpha, b.iterates[i].alpha)) {
            return false;
        }
    }
    return same_bits(a.last.theta, b.last.theta) && same_bits(a.last.alpha, b.last.alpha);
}

// ---------------------------------------------------------------- 1

Outcome appendix_gap()
{
    const auto p = build_problem(appendix_1d_data());
    Outcome o;
    double worst = 0;
    for (double eps : {0.01, 0.1, 0.5}) {
        const Vd z = Vd::Constant(1, 1 + eps), a = Vd::Zero(1);
        const auto r = stationarity_report(p, z, a, eps);
        const double e1 = std::abs(r.type1_theta - eps);
        const double e2 = std::abs(r.stat_x - (2 * eps + eps * eps));
        worst = std::max({worst, e1, e2});
        o.detail += "eps=" + fmt(eps) + ": type1=" + fmt(r.type1_theta) + " D=" + fmt(r.stat_x) + "; ";
    }
    o.pass = worst <= 1e-12;
    o.detail += "max error " + fmt(worst);
    return o;
}

// ---------------------------------------------------------------- 2

Outcome implication()
{
    std::mt19937_64 g(2024);
    std::uniform_int_distribution<int> dim(1, 5);
    std::uniform_real_distribution<double> u(0, 1);
    int violations = 0, instances = 0;
    double worst = -1e300;
    for (int k = 0; k < 1000; ++k) {
        QuadraticOptions opt;
        opt.tau = 2 * u(g);
        opt.radius = 0.2 + 2 * u(g);
        opt.zero_linear = k % 5 == 0;
        const double sigma = k % 3 == 0 ? 0.0 : 0.05 + 3 * u(g);
        const auto p = make_quadratic_game(dim(g), dim(g), 1000 + static_cast<std::uint64_t>(k), sigma, opt);
        // interior, boundary and near-boundary points
        const double rt = opt.radius * (k % 4 == 0 ? 1.0 : u(g)), ra = opt.radius * (k % 4 == 1 ? 1.0 : u(g));
        const Vd t = p.project_theta(oracle::ball_point(g, p.d_theta, rt));
        const Vd a = p.project_alpha(oracle::ball_point(g, p.d_alpha, ra));
        const auto r = stationarity_report(p, t, a, 0.1);
        ++instances;
        const double vt = r.type1_theta - std::sqrt(r.stat_x), va = r.type1_alpha - std::sqrt(r.stat_y);
        worst = std::max({worst, vt, va});
        if (vt > 1e-10 || va > 1e-10) ++violations;
    }
    return {violations == 0, std::to_string(instances) + " instances, violations=" + std::to_string(violations) +
                                 ", max(type1 - sqrt(D))=" + fmt(worst)};
}

// ---------------------------------------------------------------- 3

MinMaxProblem<double> composite_as_game(const Md& h, const Vd& c, double tau)
{
    MinMaxProblem<double> p;
    p.d_theta = 1;
    p.d_alpha = c.size();
    p.grad_h_theta = [](const Vd&, const Vd&) -> Vd { return Vd::Zero(1); };
    p.grad_h_alpha = [h, c](const Vd&, const Vd& a) -> Vd { return c - h * a; };
    p.h_value = [h, c](const Vd&, const Vd& a) { return c.dot(a) - 0.5 * a.dot(h * a); };
    p.p_value = [tau](const Vd& a) { return tau * a.lpNorm<1>(); };
    p.q_value = [](const Vd&) { return 0.0; };
    p.prox_p = [tau](const Vd& x, double s) { return soft_threshold(x, tau * s); };
    p.prox_q = [](const Vd& x, double) { return x; };
    p.project_theta = [](const Vd& x) { return x; };
    p.project_alpha = [](const Vd& x) { return x; };
    return p;
}

Outcome restart_rate()
{
    std::mt19937_64 g(77);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> u(0, 1);
    double worst_ratio = 0;
    int bad = 0;
    for (int inst = 0; inst < 20; ++inst) {
        const int d = 10;
        const double kappa = std::pow(10.0, std::log10(2.0) + (3 - std::log10(2.0)) * inst / 19.0);
        const Md q = Eigen::HouseholderQR<Md>(Md::NullaryExpr(d, d, [&]() { return nd(g); })).householderQ();
        Vd eig(d);
        const double mu = 0.5 + u(g);
        for (int i = 0; i < d; ++i) eig[i] = mu * std::pow(kappa, static_cast<double>(i) / (d - 1));
        const Md h = q * eig.asDiagonal() * q.transpose();
        const Vd c = Vd::NullaryExpr(d, [&]() { return 3 * nd(g); });
        const double tau = 0.1 + u(g);
        auto p = composite_as_game(h, c, tau);
        p.constants.l22 = eig.maxCoeff();
        p.constants.sigma = eig.minCoeff();
        p.constants.l11 = 1;

        const Vd star = oracle::lasso_cd(h, c, tau, 1e-12);
        const double fstar = oracle::lasso_objective(h, c, tau, star);
        SolverParams<double> sp;
        sp.eta1 = 1 / p.constants.l22;
        sp.eta2 = 1;
        sp.n_restart = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::ceil(std::sqrt(8 * p.constants.l22 / p.constants.sigma) - 1 - 1e-9)));
        sp.k_inner = 4 * sp.n_restart;
        sp.enforce_step_bounds = false;
        const Vd x0 = Vd::NullaryExpr(d, [&]() { return 2 * nd(g); });
        const Vd xk = inner_accelerated_ascent(p, Vd(Vd::Zero(1)), x0, sp);
        const double gap0 = oracle::lasso_objective(h, c, tau, x0) - fstar;
        const double gapk = oracle::lasso_objective(h, c, tau, xk) - fstar;
        const double ratio = gapk / gap0;
        worst_ratio = std::max(worst_ratio, ratio);
        if (gapk > 1.05 * gap0 / 16) ++bad;
    }
    return {bad == 0, "20 instances, kappa in [2, 1e3], worst gap ratio " + fmt(worst_ratio) + " (bound " +
                          fmt(1.05 / 16) + "), violations=" + std::to_string(bad)};
}

// ---------------------------------------------------------------- 4

Outcome danskin()
{
    const auto p = make_quadratic_game(4, 3, 404, 1.0);
    std::mt19937_64 g(404);
    const Vd a0 = Vd::Zero(3);
    auto gval = [&](const Vd& t) { return maximize_inner(p, t, a0, 0.0, Vd(), 1e-14).value; };
    double worst_rel = 0;
    for (int k = 0; k < 20; ++k) {
        const Vd t = oracle::ball_point(g, 4, 0.9);
        const Vd grad = max_function(p, t, a0, 0.0, Vd(), 1e-14).gradient;
        const Vd fd = oracle::fd_gradient(gval, t, 1e-5);
        worst_rel = std::max(worst_rel, (fd - grad).norm() / std::max(grad.norm(), 1e-12));
    }
    const double lg = p.constants.l11 + p.constants.l12 * p.constants.l12 / p.constants.sigma;
    double worst_ratio = 0;
    for (int k = 0; k < 1000; ++k) {
        const Vd t1 = oracle::ball_point(g, 4, 1.0);
        const Vd t2 = k % 2 == 0 ? oracle::ball_point(g, 4, 1.0) : Vd(t1 + 1e-3 * oracle::ball_point(g, 4, 1.0));
        const double dist = (t1 - t2).norm();
        if (dist == 0) continue;
        const Vd g1 = max_function(p, t1, a0, 0.0, Vd(), 1e-14).gradient;
        const Vd g2 = max_function(p, t2, a0, 0.0, Vd(), 1e-14).gradient;
        worst_ratio = std::max(worst_ratio, (g1 - g2).norm() / dist);
    }
    return {worst_rel <= 1e-4 && worst_ratio <= lg,
            "max rel FD error " + fmt(worst_rel) + ", max Lipschitz ratio " + fmt(worst_ratio) + " <= L_g=" + fmt(lg)};
}

// ---------------------------------------------------------------- 5

struct SaddleRun
{
    RunTrace<double> trace;
    std::int64_t t_outer = 0;
};

SaddleRun strongly_concave_saddle(double a)
{
    const auto p = build_problem(box_quadratic_1d_data(a, 1.0, 1.0));
    const Vd t0 = Vd::Constant(1, 0.7), a0 = Vd::Constant(1, -0.4);
    auto c = estimate_gaps(p, t0, a0);
    const auto params = derive_params_strongly_concave(c, 0.1);
    StoppingRule st = StoppingRule::strict_theory();
    st.keep_iterates = true;
    return {solve(p, t0, a0, params, st), params.t_outer};
}

Outcome saddle_check(const SaddleRun& r, bool diagonal)
{
    const auto& tr = r.trace;
    const double e2 = 0.01;
    bool found = false;
    for (const auto& rec : tr.records) found = found || (rec.stat_x <= e2 && rec.stat_y <= e2);
    const double th = tr.best.theta[0], al = tr.best.alpha[0];
    const double dist = diagonal ? std::abs(th - al) / std::sqrt(2.0) : std::hypot(th, al);
    Outcome o;
    o.pass = found && dist <= 1e-2 && static_cast<std::int64_t>(tr.records.size()) == r.t_outer;
    o.detail = "T=" + std::to_string(r.t_outer) + " K=" + tr.metadata.at("k_inner") + ", eps-FNE iterate " +
               (found ? "found" : "not found") + ", best (" + fmt(th) + ", " + fmt(al) + ") at distance " + fmt(dist) +
               (diagonal ? " from the FNE set {theta = alpha}" : " from (0,0)");
    return o;
}

// ---------------------------------------------------------------- 6

RunTrace<double> bilinear_run()
{
    const auto p = make_quadratic_game(2, 2, 6, 0.0, QuadraticOptions{0.1, 1.0, true, true});
    const Vd t0 = (Vd(2) << 0.6, -0.3).finished(), a0 = Vd::Zero(2);
    StoppingRule st = StoppingRule::strict_theory();
    st.keep_iterates = true;
    return solve_concave(p, t0, a0, 0.2, st);
}

Outcome bilinear_check(const RunTrace<double>& tr)
{
    const auto p = make_quadratic_game(2, 2, 6, 0.0, QuadraticOptions{0.1, 1.0, true, true});
    const double e2 = 0.04;
    const double lambda = std::stod(tr.metadata.at("lambda"));
    const double l22 = p.constants.l22, r = p.constants.radius_r;
    const double slack = 2 * ((l22 + lambda) / l22) * lambda * lambda * r * r;
    std::int64_t first = -1;
    int ineq_bad = 0;
    double worst_margin = -1e300;
    for (const auto& rec : tr.records) {
        if (first < 0 && rec.stat_x <= e2 && rec.stat_y <= e2) first = rec.t;
        const double margin = rec.stat_y - (2 * rec.stat_y_reg + slack);
        worst_margin = std::max(worst_margin, margin);
        if (margin > 1e-12) ++ineq_bad;
    }
    const auto t_outer = std::stoll(tr.metadata.at("t_outer"));
    Outcome o;
    o.pass = first >= 0 && first < t_outer && ineq_bad == 0 && static_cast<std::int64_t>(tr.records.size()) == t_outer;
    o.detail = "lambda=" + fmt(lambda) + " T=" + std::to_string(t_outer) + " K=" + tr.metadata.at("k_inner") +
               ", first eps-FNE of the original game at t=" + std::to_string(first) + ", proof inequality violations=" +
               std::to_string(ineq_bad) + " (max Y0 - rhs = " + fmt(worst_margin) + ")";
    return o;
}

// ---------------------------------------------------------------- 7, 8

ExperimentSpec lasso_spec()
{
    ExperimentSpec s;   // m=20 n=100 sparsity=5 xi=1 delta=0.1 threshold=0.1, 20 trials
    s.figure_trial = 0;
    s.figure_max_iterations = 1000;
    return s;
}

Outcome lasso_check(const ExperimentResult& res)
{
    const auto& pa = res.summary("PA");
    const auto& pda = res.summary("PDA");
    const auto& sda = res.summary("SDA");
    const double inf = std::numeric_limits<double>::infinity();
    std::map<std::int64_t, std::map<std::string, double>> calls;
    for (const auto& t : res.trials) {
        calls[t.trial][t.algorithm] = t.success ? static_cast<double>(t.grad_calls) : inf;
    }
    int beat_pda = 0, beat_sda = 0;
    for (auto& [trial, m] : calls) {
        if (m["PA"] < m["PDA"]) ++beat_pda;
        if (m["PA"] < m["SDA"]) ++beat_sda;
    }
    const int n = static_cast<int>(calls.size());
    // trials PA and PDA both solve, with and without PA setup
    std::map<std::int64_t, std::map<std::string, const TrialRecord*>> recs;
    for (const auto& t : res.trials) recs[t.trial][t.algorithm] = &t;
    int both = 0;
    double pa_t = 0, pa_solve = 0, pda_t = 0;
    for (auto& [trial, m] : recs) {
        if (!m["PA"] || !m["PDA"] || !m["PA"]->success || !m["PDA"]->success) continue;
        ++both;
        pa_t += m["PA"]->time;
        pa_solve += m["PA"]->time - m["PA"]->setup_time;
        pda_t += m["PDA"]->time;
    }
    if (both > 0) {
        note("7", "trials solved by PA and PDA: " + std::to_string(both) + ", mean time PA=" + fmt(pa_t / both) +
                      "s (without setup " + fmt(pa_solve / both) + "s) PDA=" + fmt(pda_t / both) + "s");
    }
    const bool order = pa.mean_time < pda.mean_time && pda.mean_time < sda.mean_time;
    Outcome o;
    o.pass = pa.successes == pa.trials && beat_pda >= 0.8 * n && beat_sda == n && order;
    std::ostringstream d;
    d << "PA success " << pa.successes << "/" << pa.trials << ", PDA " << pda.successes << "/" << pda.trials << ", SDA "
      << sda.successes << "/" << sda.trials << "; PA fewer calls than PDA in " << beat_pda << "/" << n
      << ", than SDA in " << beat_sda << "/" << n << "; mean time-to-threshold PA=" << fmt(pa.mean_time)
      << "s PDA=" << fmt(pda.mean_time) << "s SDA=" << fmt(sda.mean_time) << "s (ordering "
      << (order ? "holds" : "violated") << ")";
    o.detail = d.str();
    return o;
}

struct PaReruns
{
    std::vector<RunTrace<double>> traces;
    std::vector<TrialProblem> problems;
};

PaReruns rerun_pa(const ExperimentSpec& spec)
{
    PaReruns r;
    for (std::int64_t i = 0; i < spec.n_trials; ++i) {
        auto tp = make_trial_problem(spec, i);
        auto s = spec;
        s.figure_max_iterations = 1000000;
        r.traces.push_back(run_algorithm(s, "PA", tp.problem, tp.start, true));
        r.problems.push_back(std::move(tp));
    }
    return r;
}

Outcome monotone_objective(const PaReruns& r)
{
    int bad_trials = 0;
    double worst = 0;
    std::size_t points = 0;
    for (std::size_t i = 0; i < r.traces.size(); ++i) {
        const auto g = objective_along(r.traces[i], r.problems[i].problem);
        points += g.size();
        bool ok = true;
        for (std::size_t k = 1; k < g.size(); ++k) {
            const double drop = (g[k - 1] - g[k]) / std::max(1.0, std::abs(g[k - 1]));
            worst = std::max(worst, drop);
            if (drop > 1e-6) ok = false;
        }
        if (!ok) ++bad_trials;
    }
    return {bad_trials == 0, std::to_string(r.traces.size()) + " PA runs, " + std::to_string(points) +
                                 " iterates, largest relative decrease " + fmt(worst) + ", trials with a decrease=" +
                                 std::to_string(bad_trials)};
}

bool same_trials(const ExperimentResult& a, const ExperimentResult& b)
{
    if (a.trials.size() != b.trials.size()) return false;
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        const auto &x = a.trials[i], &y = b.trials[i];
        if (x.algorithm != y.algorithm || x.success != y.success || x.iterations != y.iterations ||
            x.grad_calls != y.grad_calls || bits(x.final_stat_x) != bits(y.final_stat_x) ||
            bits(x.final_stat_y) != bits(y.final_stat_y) || x.start_hash != y.start_hash ||
            x.problem_hash != y.problem_hash) {
            return false;
        }
    }
    return true;
}

// measure columns of every written trace, run 1 against run 2
bool same_trace_files(const std::string& d1, const std::string& d2, std::size_t& files)
{
    files = 0;
    for (const auto& e : fs::recursive_directory_iterator(d1)) {
        if (e.path().extension() != ".csv" || e.path().parent_path().filename().string().rfind("trial-", 0) != 0) continue;
        const auto rel = fs::relative(e.path(), d1);
        const auto a = read_trace_csv(e.path().string());
        const auto b = read_trace_csv((fs::path(d2) / rel).string());
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (bits(a[i].g_value) != bits(b[i].g_value) || bits(a[i].stat_x) != bits(b[i].stat_x) ||
                bits(a[i].stat_y) != bits(b[i].stat_y) || a[i].grad_calls != b[i].grad_calls) {
                return false;
            }
        }
        ++files;
    }
    return files > 0;
}

} // namespace

int main(int argc, char** argv)
{
    const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance-results");
    std::cout << "acceptance checks; experiment output under " << out.string() << std::endl;

    report("1", "appendix counterexample, type-1 residual and type-2 measure", 1, appendix_gap);
    report("2", "implication inequality on 1000 random composite instances", 10, implication);
    report("3", "restarted acceleration halves the gap every N steps", 30, restart_rate);
    report("4", "Danskin gradient and its Lipschitz constant", 60, danskin);

    SaddleRun lit1, cor1;
    report("5a", "strict solve on the literal 1-D game reaches an eps-FNE near the FNE set", 60, [&] {
        lit1 = strongly_concave_saddle(-1.0);
        return saddle_check(lit1, true);
    });
    report("5b", "strict solve on the sign-corrected 1-D game reaches an eps-FNE near (0,0)", 60, [&] {
        cor1 = strongly_concave_saddle(1.0);
        return saddle_check(cor1, false);
    });
    if (!lit1.trace.records.empty()) {
        note("5", "literal game best iterate distance to (0,0) = " +
                      fmt(std::hypot(lit1.trace.best.theta[0], lit1.trace.best.alpha[0])) +
                      " (every diagonal point is an FNE of that game)");
    }

    RunTrace<double> bil1;
    report("6", "regularized solve on a bilinear game", 120, [&] {
        bil1 = bilinear_run();
        return bilinear_check(bil1);
    });

    const ExperimentSpec spec = lasso_spec();
    ExperimentResult exp1;
    report("7", "LASSO attack, PA vs SDA vs PDA over 20 shared-start trials", 600, [&] {
        exp1 = run_experiment(spec, (out / "run1").string());
        for (const auto& s : exp1.summaries) {
            note("7", s.algorithm + ": success " + std::to_string(s.successes) + "/" + std::to_string(s.trials) +
                          " mean_time=" + fmt(s.mean_time) + "s std=" + fmt(s.std_time) +
                          "s censored_mean=" + fmt(s.mean_time_censored) + "s mean_calls=" + fmt(s.mean_grad_calls));
        }
        return lasso_check(exp1);
    });

    PaReruns pa1;
    report("8", "LASSO objective along PA iterates is nondecreasing", 0, [&] {
        pa1 = rerun_pa(spec);
        return monotone_objective(pa1);
    });

    report("9", "determinism of criteria 5-7", 0, [&] {
        Outcome o;
        const bool s5 = same_run(lit1.trace, strongly_concave_saddle(-1.0).trace) &&
                        same_run(cor1.trace, strongly_concave_saddle(1.0).trace);
        const bool s6 = same_run(bil1, bilinear_run());
        const auto exp2 = run_experiment(spec, (out / "run2").string());
        std::size_t files = 0;
        const bool s7 = same_trials(exp1, exp2) && same_trace_files(exp1.out_dir, exp2.out_dir, files);
        bool s7pa = pa1.traces.size() == static_cast<std::size_t>(spec.n_trials);
        for (std::size_t i = 0; s7pa && i < pa1.traces.size(); ++i) {
            auto tp = make_trial_problem(spec, static_cast<std::int64_t>(i));
            auto s = spec;
            s.figure_max_iterations = 1000000;
            s7pa = same_run(pa1.traces[i], run_algorithm(s, "PA", tp.problem, tp.start, true));
        }
        o.pass = s5 && s6 && s7 && s7pa;
        o.detail = std::string("criterion 5 runs ") + (s5 ? "identical" : "DIFFER") + ", criterion 6 run " +
                   (s6 ? "identical" : "DIFFER") + ", experiment records and " + std::to_string(files) + " traces " +
                   (s7 ? "identical" : "DIFFER") + ", PA iterates " + (s7pa ? "identical" : "DIFFER");
        return o;
    });

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
