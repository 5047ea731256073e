#ifndef LSPCM_DISTRIBUTIONS_HPP
#define LSPCM_DISTRIBUTIONS_HPP

#include "common.hpp"

#include <cstdint>
#include <random>
#include <span>

namespace lspcm::dist {

/// Seedable generator owned by exactly one chain. The (seed, stream) pair is
/// expanded through std::seed_seq, so distinct streams under one master seed
/// give unrelated sequences and equal pairs give bit-identical ones.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    /// Gamma with the given shape and rate.
    double gamma(double shape, double rate);

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

struct TruncGammaParams {
    double shape;      // a2
    double rate;       // b2
    double lower = 0;  // t2
};

Vector sample_diag_mvn(const Vector& mean, const Vector& precisions, Rng& rng);

/// Draws from Dir(concentrations). Works in log space, so concentrations as
/// small as 1e-5 give exact zeros rather than NaN.
Vector sample_dirichlet(std::span<const double> concentrations, Rng& rng);
inline Vector sample_dirichlet(const Vector& concentrations, Rng& rng) {
    return sample_dirichlet(std::span<const double>(concentrations.data(), concentrations.size()), rng);
}

/// Gamma(shape, rate) conditioned on X >= lower.
///
/// Rejection from the untruncated gamma when the retained mass is at least
/// 0.1, inverse-CDF on the regularized incomplete gamma below that, and a
/// shifted-exponential rejection sampler when the mass underflows (shape >= 1
/// only). Throws DataError for shape < 1 with mass below 1e-300.
double sample_left_trunc_gamma(const TruncGammaParams& params, Rng& rng);

/// Index in [0, weights.size()) drawn with probability proportional to weight.
int sample_categorical(std::span<const double> weights, Rng& rng);
inline int sample_categorical(const Vector& w, Rng& rng) {
    return sample_categorical(std::span<const double>(w.data(), w.size()), rng);
}

double logpdf_diag_mvn(const Vector& x, const Vector& mean, const Vector& precisions);
double logpdf_normal(double x, double mean, double variance);
double logpdf_gamma(double x, double shape, double rate);
/// Log density of the left-truncated gamma; -inf below the truncation point.
double logpdf_left_trunc_gamma(double x, const TruncGammaParams& params);
double logpdf_dirichlet(const Vector& x, const Vector& concentrations);

/// Regularized upper incomplete gamma Q(shape, rate * x) = P(X > x).
double gamma_upper_tail(double shape, double rate, double x);

/// log Q(shape, rate * x), accurate where Q itself underflows.
double log_gamma_upper_tail(double shape, double rate, double x);

}  // namespace lspcm::dist

#endif
