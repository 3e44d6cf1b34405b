#pragma once
#include <apgda/config.hpp>
#include <apgda/solver.hpp>

namespace apgda {

struct SolveSetup
{
    ProblemData data;
    MinMaxProblem<double> problem;
    Vec<double> theta0;
    Vec<double> alpha0;
    SolverParams<double> params;
    StoppingRule stop;
    std::string regime;   // strongly_concave | concave
};

// A0 = A_hat + uniform point of the Frobenius ball, x0 = 0.1 N(0, I)
Iterate<double> lasso_start(const ProblemData& data, std::uint64_t seed);

Iterate<double> start_point(const Config& cfg, const ProblemData& data, const MinMaxProblem<double>& problem);

SolverParams<double> configure_params(const SolverSection& s,
                                      const MinMaxProblem<double>& problem,
                                      const Vec<double>& theta0,
                                      const Vec<double>& alpha0,
                                      std::string& regime);

StoppingRule configure_stop(const SolverSection& s);

SolveSetup prepare_solve(const Config& cfg);
SolveSetup prepare_solve(const Config& cfg, const ProblemData& data);

RunTrace<double> run_setup(const SolveSetup& setup);

} // namespace apgda
