#include "model.hpp"

#include <cmath>
#include <limits>

namespace lspcm::model {

void HyperParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw UsageError(std::string(name) + " must be positive");
    };
    positive(a1, "a1");
    positive(b1, "b1");
    positive(a2, "a2");
    positive(b2, "b2");
    positive(xi, "xi");
    positive(nu, "nu");
    positive(var_alpha, "var_alpha");
    positive(k, "k");
    positive(kappa1, "kappa1");
    if (!(t2 >= 0.0)) throw UsageError("t2 must be nonnegative");
    if (!std::isfinite(mu_alpha)) throw UsageError("mu_alpha must be finite");
    if (!std::isfinite(kappa0) || kappa0 < 0.0) throw UsageError("kappa0 must be nonnegative");
    if (!(eps1 > 0.0 && eps1 < 1.0)) throw UsageError("eps1 must lie in (0, 1)");
    positive(eps2, "eps2");
    positive(eps3, "eps3");
    if (G < 2) throw UsageError("G must be at least 2");
    if (p0 < 1) throw UsageError("p0 must be at least 1");
}

Vector recompute_omega(const Vector& delta) {
    Vector omega(delta.size());
    double prod = 1.0;
    for (Eigen::Index h = 0; h < delta.size(); ++h) {
        prod *= delta[h];
        omega[h] = prod;
    }
    return omega;
}

void LatentState::check_invariants(double t2) const {
    const int nn = n(), pp = p(), gg = G();
    if (pp < 1) throw RuntimeError("state has no latent dimensions");
    if (mu.rows() != gg || mu.cols() != pp) throw RuntimeError("component means have the wrong shape");
    if (delta.size() != pp || omega.size() != pp) throw RuntimeError("shrinkage vectors have the wrong length");
    if (static_cast<int>(labels.size()) != nn) throw RuntimeError("label vector has the wrong length");
    Vector cp = recompute_omega(delta);
    for (int h = 0; h < pp; ++h) {
        if (std::abs(cp[h] - omega[h]) > 1e-12 * std::max(1.0, std::abs(cp[h])))
            throw RuntimeError("omega is not the cumulative product of delta");
        if (h == 0 && !(delta[h] > 0.0)) throw RuntimeError("delta_1 must be positive");
        if (h > 0 && delta[h] < t2) throw RuntimeError("delta_h below the truncation point");
    }
    if ((tau.array() < 0.0).any() || std::abs(tau.sum() - 1.0) > 1e-9) throw RuntimeError("tau is not on the simplex");
    for (int c : labels)
        if (c < 0 || c >= gg) throw RuntimeError("label out of range");
}

double edge_log_odds(const Eigen::Ref<const Vector>& zi, const Eigen::Ref<const Vector>& zj, double alpha) {
    if (zi.size() != zj.size()) throw DataError("positions have different dimensions");
    return alpha - (zi - zj).squaredNorm();
}

double log_likelihood(const netdata::AdjacencyMatrix& y, const Matrix& Z, double alpha) {
    const int n = y.size();
    if (Z.rows() != n) throw DataError("position matrix row count differs from node count");
    if (!Z.allFinite() || !std::isfinite(alpha)) throw DataError("non-finite position or alpha");
    const int p = static_cast<int>(Z.cols());
    double ll = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double d2 = 0.0;
            for (int l = 0; l < p; ++l) {
                const double d = Z(i, l) - Z(j, l);
                d2 += d * d;
            }
            const double eta = alpha - d2;
            ll += (y(i, j) + y(j, i)) * eta - 2.0 * log1p_exp(eta);
        }
    }
    return ll;
}

double node_log_likelihood(const netdata::AdjacencyMatrix& y, const Matrix& Z, double alpha, int i,
                           const Eigen::Ref<const Vector>& zi) {
    const int n = y.size();
    const int p = static_cast<int>(Z.cols());
    double ll = 0.0;
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        double d2 = 0.0;
        for (int l = 0; l < p; ++l) {
            const double d = zi[l] - Z(j, l);
            d2 += d * d;
        }
        const double eta = alpha - d2;
        ll += (y(i, j) + y(j, i)) * eta - 2.0 * log1p_exp(eta);
    }
    return ll;
}

double log_prior(const LatentState& s, const HyperParams& hp) {
    const double ninf = -std::numeric_limits<double>::infinity();
    const int p = s.p();
    for (int h = 1; h < p; ++h)
        if (s.delta[h] < hp.t2) return ninf;

    double lp = dist::logpdf_normal(s.alpha, hp.mu_alpha, hp.var_alpha);
    lp += dist::logpdf_gamma(s.delta[0], hp.a1, hp.b1);
    const dist::TruncGammaParams tg{hp.a2, hp.b2, hp.t2};
    for (int h = 1; h < p; ++h) lp += dist::logpdf_left_trunc_gamma(s.delta[h], tg);

    const Vector omega = recompute_omega(s.delta);
    const Vector mean_prec = omega / hp.xi;
    const Vector zero = Vector::Zero(p);
    for (int g = 0; g < s.G(); ++g) lp += dist::logpdf_diag_mvn(s.mu.row(g).transpose(), zero, mean_prec);

    lp += dist::logpdf_dirichlet(s.tau, Vector::Constant(s.G(), hp.nu));
    for (int i = 0; i < s.n(); ++i) {
        const int c = s.labels[i];
        lp += std::log(s.tau[c]);
        lp += dist::logpdf_diag_mvn(s.Z.row(i).transpose(), s.mu.row(c).transpose(), omega);
    }
    return lp;
}

netdata::AdjacencyMatrix simulate_network(const Matrix& Z, double alpha, dist::Rng& rng) {
    const int n = static_cast<int>(Z.rows());
    std::vector<std::uint8_t> e(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double q = edge_probability(alpha - (Z.row(i) - Z.row(j)).squaredNorm());
            e[static_cast<std::size_t>(i) * n + j] = rng.uniform() < q ? 1 : 0;
        }
    }
    return netdata::AdjacencyMatrix(n, std::move(e), true);
}

}  // namespace lspcm::model
