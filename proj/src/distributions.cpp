#include "distributions.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>

namespace lspcm::dist {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void require_positive(const Vector& v, const char* what) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!(v[i] > 0.0)) throw DataError(std::string(what) + " must be strictly positive");
}
}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x6c737063u};
    engine_.seed(seq);
}

double Rng::uniform() {
    // 53 random bits, shifted off zero by half an ulp
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
    std::normal_distribution<double> d;
    return d(engine_);
}

double Rng::gamma(double shape, double rate) {
    std::gamma_distribution<double> d(shape, 1.0 / rate);
    return d(engine_);
}

Vector sample_diag_mvn(const Vector& mean, const Vector& precisions, Rng& rng) {
    if (mean.size() != precisions.size()) throw DataError("mean and precision dimensions differ");
    require_positive(precisions, "precisions");
    Vector x(mean.size());
    for (Eigen::Index l = 0; l < mean.size(); ++l) x[l] = mean[l] + rng.normal() / std::sqrt(precisions[l]);
    return x;
}

Vector sample_dirichlet(std::span<const double> conc, Rng& rng) {
    const auto g = static_cast<Eigen::Index>(conc.size());
    if (g == 0) throw DataError("Dirichlet needs at least one component");
    Vector logx(g);
    for (Eigen::Index k = 0; k < g; ++k) {
        const double a = conc[k];
        if (!(a > 0.0) || !std::isfinite(a)) throw DataError("Dirichlet concentrations must be positive and finite");
        if (a >= 1.0) {
            logx[k] = std::log(rng.gamma(a, 1.0));
        } else {
            // Gamma(a) = Gamma(a + 1) * U^(1/a), taken in logs
            logx[k] = std::log(rng.gamma(a + 1.0, 1.0)) + std::log(rng.uniform()) / a;
        }
    }
    const double m = logx.maxCoeff();
    Vector x = (logx.array() - m).exp();
    x /= x.sum();
    return x;
}

double gamma_upper_tail(double shape, double rate, double x) {
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(shape, rate * x);
}

double log_gamma_upper_tail(double shape, double rate, double x) {
    const double q = gamma_upper_tail(shape, rate, x);
    const double y = rate * x;
    if (q > 1e-280 || y <= shape + 1.0) return std::log(q);
    // modified Lentz continued fraction for Q(a, y), kept in log space
    const double tiny = 1e-300;
    double b = y + 1.0 - shape, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - shape);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return -y + shape * std::log(y) - std::lgamma(shape) + std::log(h);
}

double sample_left_trunc_gamma(const TruncGammaParams& p, Rng& rng) {
    if (!(p.shape > 0.0) || !(p.rate > 0.0) || !(p.lower >= 0.0) || !std::isfinite(p.rate) || !std::isfinite(p.shape))
        throw DataError("truncated gamma needs shape > 0, rate > 0, lower >= 0");
    if (p.lower == 0.0) return rng.gamma(p.shape, p.rate);

    const double mass = gamma_upper_tail(p.shape, p.rate, p.lower);
    if (mass >= 0.1) {
        for (int tries = 0; tries < 10000; ++tries) {
            double x = rng.gamma(p.shape, p.rate);
            if (x >= p.lower) return x;
        }
    }
    if (mass >= 1e-300) {
        try {
            double x = boost::math::gamma_q_inv(p.shape, rng.uniform() * mass) / p.rate;
            if (std::isfinite(x)) return std::max(x, p.lower);
        } catch (const std::exception&) {
            // fall through to the tail sampler
        }
    }
    const double lambda = p.rate - (p.shape - 1.0) / p.lower;
    if (p.shape >= 1.0 && lambda > 0.0) {
        // proposal lower + Exp(lambda); accept with (x/t)^(a-1) exp(-(a-1)(x-t)/t) <= 1
        for (int tries = 0; tries < 1000000; ++tries) {
            const double x = p.lower - std::log(rng.uniform()) / lambda;
            const double log_acc = (p.shape - 1.0) * (std::log(x / p.lower) - (x - p.lower) / p.lower);
            if (std::log(rng.uniform()) < log_acc) return x;
        }
    }
    throw DataError("truncated gamma mass below 1e-300 (shape " + std::to_string(p.shape) + ", rate " +
                    std::to_string(p.rate) + ", lower " + std::to_string(p.lower) + ")");
}

int sample_categorical(std::span<const double> w, Rng& rng) {
    double total = 0.0;
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw DataError("categorical weights must be nonnegative and finite");
        total += v;
    }
    if (!(total > 0.0)) throw DataError("categorical weights sum to zero");
    double u = rng.uniform() * total;
    int last = -1;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] <= 0.0) continue;
        last = static_cast<int>(k);
        if (u < w[k]) return last;
        u -= w[k];
    }
    return last;
}

double logpdf_diag_mvn(const Vector& x, const Vector& mean, const Vector& precisions) {
    if (x.size() != mean.size() || x.size() != precisions.size()) throw DataError("dimension mismatch in MVN density");
    require_positive(precisions, "precisions");
    double s = 0.0;
    for (Eigen::Index l = 0; l < x.size(); ++l) {
        const double d = x[l] - mean[l];
        s += 0.5 * std::log(precisions[l]) - 0.5 * kLog2Pi - 0.5 * precisions[l] * d * d;
    }
    return s;
}

double logpdf_normal(double x, double mean, double variance) {
    const double d = x - mean;
    return -0.5 * kLog2Pi - 0.5 * std::log(variance) - 0.5 * d * d / variance;
}

double logpdf_gamma(double x, double shape, double rate) {
    if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double logpdf_left_trunc_gamma(double x, const TruncGammaParams& p) {
    if (x < p.lower) return -std::numeric_limits<double>::infinity();
    return logpdf_gamma(x, p.shape, p.rate) - log_gamma_upper_tail(p.shape, p.rate, p.lower);
}

double logpdf_dirichlet(const Vector& x, const Vector& conc) {
    if (x.size() != conc.size()) throw DataError("dimension mismatch in Dirichlet density");
    double s = std::lgamma(conc.sum());
    for (Eigen::Index k = 0; k < x.size(); ++k) s += (conc[k] - 1.0) * std::log(x[k]) - std::lgamma(conc[k]);
    return s;
}

}  // namespace lspcm::dist
