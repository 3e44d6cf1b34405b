#pragma once
#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace apgda {

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

// Raised when an iterate or oracle output stops being finite.
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

template <class Derived>
inline bool all_finite(const Eigen::MatrixBase<Derived>& x)
{
    return x.allFinite();
}

template <class Derived>
inline void require_finite(const Eigen::MatrixBase<Derived>& x, const std::string& what)
{
    if (!x.allFinite()) {
        throw NumericalError("non-finite values in " + what);
    }
}

template <class Scalar>
inline void require_finite_scalar(Scalar v, const std::string& what)
{
    if (!std::isfinite(static_cast<double>(v))) {
        throw NumericalError("non-finite value in " + what);
    }
}

/*
 * Seedable generator with platform-independent output.
 * The engine is mt19937_64; uniform and normal draws are derived here
 * because the standard distributions are implementation-defined.
 */
class Rng
{
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // uniform on [0, 1) with 53 random bits
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // uniform integer in [0, n) by rejection
    std::uint64_t below(std::uint64_t n)
    {
        if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    template <class Scalar = double>
    Vec<Scalar> normal_vector(Index n)
    {
        Vec<Scalar> v(n);
        for (Index i = 0; i < n; ++i) v[i] = static_cast<Scalar>(normal());
        return v;
    }

    template <class Scalar = double>
    Mat<Scalar> normal_matrix(Index rows, Index cols)
    {
        Mat<Scalar> m(rows, cols);
        // row-major fill so stored matrices match generation order
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < cols; ++j) m(i, j) = static_cast<Scalar>(normal());
        return m;
    }

    // uniform point in the Euclidean ball of the given radius
    template <class Scalar = double>
    Vec<Scalar> in_ball(Index n, double radius)
    {
        Vec<Scalar> d = normal_vector<Scalar>(n);
        const double nd = static_cast<double>(d.norm());
        if (nd == 0.0) return Vec<Scalar>::Zero(n);
        const double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(n));
        return d * static_cast<Scalar>(r / nd);
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace apgda
