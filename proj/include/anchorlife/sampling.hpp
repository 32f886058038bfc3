#pragma once

#include "anchorlife/nls.hpp"
#include "anchorlife/regress.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace anchorlife
{

/// SplitMix64 step; used to derive independent stream seeds from one user seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seedable generator with a platform-independent output sequence.
///
/// std::mt19937_64 output is fixed by the standard; the normal deviates come
/// from Box-Muller over 53-bit uniforms instead of std::normal_distribution,
/// whose algorithm is implementation-defined.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : engine_(splitmix64(seed ^ splitmix64(stream))) {}

    /// Uniform on the open interval (0, 1).
    double uniform()
    {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal()
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double theta = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Draws from N(mean, covariance), one draw per row. Deterministic in `seed`.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
sample_params(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& mean,
              const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& covariance, int n_draws,
              std::uint64_t seed)
{
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index k = mean.size();
    if (covariance.rows() != k || covariance.cols() != k)
        throw Error(ErrorCode::LengthMismatch, "covariance does not match parameter count");
    if (n_draws < 1)
        throw Error(ErrorCode::InvalidValue, "n_draws must be at least 1");

    Matrix draws = mean.transpose().replicate(n_draws, 1);
    const Scalar trace = covariance.trace();
    if (!(trace > Scalar(0)))
        return draws;

    Matrix factor;
    Eigen::LLT<Matrix> llt(covariance);
    if (llt.info() == Eigen::Success)
        factor = llt.matrixL();
    else
    {
        const Matrix jittered = covariance + Scalar(1e-12) * trace * Matrix::Identity(k, k);
        Eigen::LLT<Matrix> retry(jittered);
        if (retry.info() == Eigen::Success)
            factor = retry.matrixL();
        else
        {
            // Indefinite from round-off: clip negative eigenvalues.
            Eigen::SelfAdjointEigenSolver<Matrix> eig(covariance);
            const auto values = eig.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt();
            factor = eig.eigenvectors() * values.asDiagonal();
        }
    }

    Rng rng(seed);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z(k);
    for (int d = 0; d < n_draws; ++d)
    {
        for (Eigen::Index j = 0; j < k; ++j)
            z(j) = Scalar(rng.normal());
        draws.row(d) += (factor * z).transpose();
    }
    return draws;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sample_params(const LinearFit<Scalar>& fit, int n_draws,
                                                                    std::uint64_t seed)
{
    return sample_params<Scalar>(fit.params(), fit.covariance, n_draws, seed);
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sample_params(const NLSFit<Scalar>& fit, int n_draws,
                                                                    std::uint64_t seed)
{
    return sample_params<Scalar>(fit.params, fit.covariance, n_draws, seed);
}

} // namespace anchorlife
