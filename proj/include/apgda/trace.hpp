#pragma once
#include <apgda/stationarity.hpp>
#include <chrono>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace apgda {

template <class Scalar>
struct TraceRecord
{
    std::int64_t t = 0;
    Scalar g_value = 0;      // attained inner objective f(theta_t, alpha_{t+1})
    Scalar stat_x = 0;
    Scalar stat_y = 0;
    Scalar stat_y_reg = 0;   // measure on the regularized game (= stat_y when lambda = 0)
    double wall_time = 0;    // cumulative algorithm seconds
    std::int64_t inner_iters = 0;
    std::int64_t grad_calls = 0;   // cumulative
};

struct StoppingRule
{
    bool strict = false;               // full K inner steps, no inner exit
    bool stop_at_tolerance = true;
    double tolerance = -1;             // on stat_x and stat_y; < 0 means epsilon^2
    double inner_tolerance = -1;       // < 0 means tolerance / 4
    std::int64_t max_iterations = 0;   // 0 means the algorithm's own limit
    double max_seconds = std::numeric_limits<double>::infinity();
    bool keep_iterates = false;
    std::size_t keep_limit = 100000;

    static StoppingRule strict_theory()
    {
        StoppingRule s;
        s.strict = true;
        s.stop_at_tolerance = false;
        return s;
    }
};

template <class Scalar>
struct RunTrace
{
    std::string algorithm;
    std::vector<TraceRecord<Scalar>> records;
    // (theta_t, alpha_{t+1}) per record when keep_iterates is set
    std::vector<Iterate<Scalar>> iterates;
    Iterate<Scalar> start;
    Iterate<Scalar> best;       // candidate minimizing max(stat_x, stat_y)
    Iterate<Scalar> last;       // last recorded candidate
    std::int64_t best_index = -1;
    bool converged = false;
    std::int64_t first_converged = -1;
    double tolerance = 0;
    std::string stop_reason;
    std::map<std::string, std::string> metadata;

    const TraceRecord<Scalar>& best_record() const { return records.at(static_cast<std::size_t>(best_index)); }

    // all algorithmic gradient calls, including steps after the last record
    std::int64_t grad_calls = 0;

    std::int64_t total_grad_calls() const { return grad_calls; }

    double total_time() const { return records.empty() ? 0.0 : records.back().wall_time; }
};

namespace detail {

class Stopwatch
{
public:
    void start() { t0_ = clock::now(); running_ = true; }
    void stop()
    {
        if (running_) acc_ += std::chrono::duration<double>(clock::now() - t0_).count();
        running_ = false;
    }
    double seconds() const
    {
        return running_ ? acc_ + std::chrono::duration<double>(clock::now() - t0_).count() : acc_;
    }

private:
    using clock = std::chrono::steady_clock;
    clock::time_point t0_{};
    double acc_ = 0;
    bool running_ = false;
};

/*
 * Shared bookkeeping for the outer loops of all three algorithms.
 * record() is called with the candidate (theta_t, alpha_{t+1}) and the clock paused.
 */
template <class Scalar>
class TraceBuilder
{
public:
    TraceBuilder(const MinMaxProblem<Scalar>& problem,
                 const MinMaxProblem<Scalar>* regularized,
                 std::string algorithm,
                 const StoppingRule& stop,
                 double tolerance,
                 const Vec<Scalar>& theta0,
                 const Vec<Scalar>& alpha0)
        : problem_(problem), reg_(regularized), stop_(stop)
    {
        trace_.algorithm = std::move(algorithm);
        trace_.tolerance = tolerance;
        trace_.start = {theta0, alpha0};
    }

    // returns true when the run should stop at this candidate
    bool record(std::int64_t t,
                const Vec<Scalar>& theta,
                const Vec<Scalar>& alpha,
                double wall_time,
                std::int64_t inner_iters,
                std::int64_t grad_calls)
    {
        if (!theta.allFinite() || !alpha.allFinite()) {
            throw NumericalError(trace_.algorithm + ": non-finite iterate at outer iteration " + std::to_string(t));
        }
        TraceRecord<Scalar> r;
        r.t = t;
        r.g_value = evaluate_f(problem_, theta, alpha);
        r.stat_x = measure_x(problem_, theta, alpha);
        r.stat_y = measure_y(problem_, theta, alpha);
        r.stat_y_reg = reg_ ? measure_y(*reg_, theta, alpha) : r.stat_y;
        r.wall_time = wall_time;
        r.inner_iters = inner_iters;
        r.grad_calls = grad_calls;
        trace_.records.push_back(r);
        if (stop_.keep_iterates && trace_.iterates.size() < stop_.keep_limit) {
            trace_.iterates.push_back({theta, alpha});
        }
        const Scalar worst = std::max(r.stat_x, r.stat_y);
        if (trace_.best_index < 0 || worst < best_worst_) {
            best_worst_ = worst;
            trace_.best_index = static_cast<std::int64_t>(trace_.records.size()) - 1;
            trace_.best = {theta, alpha};
        }
        trace_.last = {theta, alpha};
        const bool hit = trace_.tolerance > 0 && r.stat_x <= trace_.tolerance && r.stat_y <= trace_.tolerance;
        if (hit && !trace_.converged) {
            trace_.converged = true;
            trace_.first_converged = t;
        }
        return hit && stop_.stop_at_tolerance;
    }

    RunTrace<Scalar> finish(std::string reason, std::int64_t grad_calls)
    {
        trace_.stop_reason = std::move(reason);
        trace_.grad_calls = grad_calls;
        return std::move(trace_);
    }

    RunTrace<Scalar>& trace() { return trace_; }

private:
    const MinMaxProblem<Scalar>& problem_;
    const MinMaxProblem<Scalar>* reg_;
    StoppingRule stop_;
    RunTrace<Scalar> trace_;
    Scalar best_worst_ = 0;
};

} // namespace detail
} // namespace apgda
