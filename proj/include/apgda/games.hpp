#pragma once
#include <apgda/prox.hpp>
#include <map>
#include <string>

namespace apgda {

/*
 * Everything needed to rebuild a problem exactly: generator kind and
 * parameters, seed, dense matrices and constants. Oracles are rebuilt
 * from the stored matrices, never re-generated.
 */
struct ProblemData
{
    std::string kind;
    std::map<std::string, double> params;
    std::uint64_t seed = 0;
    Index d_theta = 0;
    Index d_alpha = 0;
    std::map<std::string, Mat<double>> matrices;
    ProblemConstants<double> constants;

    const Mat<double>& matrix(const std::string& name) const;
    double param(const std::string& name) const;
};

struct QuadraticOptions
{
    double tau = 0.1;        // weight of p = tau * ||alpha||_1
    double radius = 1.0;     // Euclidean radius of both feasible balls
    bool zero_linear = false;
    bool bilinear = false;   // Q = 0
};

ProblemData quadratic_game_data(Index d_theta, Index d_alpha, std::uint64_t seed, double sigma,
                                const QuadraticOptions& opts = {});

ProblemData lasso_attack_data(Index m, Index n, Index sparsity, double xi, double delta, double noise_std,
                              std::uint64_t seed);

// h = a/2 theta^2 + c theta alpha - sigma/2 alpha^2 on [-w, w]^2, p = q = 0
ProblemData box_quadratic_1d_data(double a, double c, double sigma, double half_width = 1.0);

// min_z z^2/2 s.t. z >= 1 as the theta player; alpha is a passive -alpha^2/2 term
ProblemData appendix_1d_data();

MinMaxProblem<double> build_problem(const ProblemData& data);

// spectral norm by power iteration on M^T M
double spectral_norm(const Mat<double>& m, int iterations = 1000);

inline MinMaxProblem<double> make_quadratic_game(Index d_theta, Index d_alpha, std::uint64_t seed, double sigma,
                                                 const QuadraticOptions& opts = {})
{
    return build_problem(quadratic_game_data(d_theta, d_alpha, seed, sigma, opts));
}

inline MinMaxProblem<double> make_lasso_attack(Index m, Index n, Index sparsity, double xi, double delta,
                                               double noise_std, std::uint64_t seed)
{
    return build_problem(lasso_attack_data(m, n, sparsity, xi, delta, noise_std, seed));
}

// reshape helpers for the LASSO game: theta stores A row-major
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Vec<double> flatten_row_major(const Mat<double>& a)
{
    RowMat r = a;
    return Eigen::Map<const Vec<double>>(r.data(), r.size());
}

inline Mat<double> unflatten_row_major(const Vec<double>& v, Index rows, Index cols)
{
    if (v.size() != rows * cols) throw std::invalid_argument("unflatten_row_major: size mismatch");
    return Eigen::Map<const RowMat>(v.data(), rows, cols);
}

// LASSO objective min_x ||A x - b||^2 + xi ||x||_1 (the attacker's g)
double lasso_value(const ProblemData& data, const Vec<double>& theta, const Vec<double>& x);

} // namespace apgda
