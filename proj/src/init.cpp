#include "init.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lspcm::init {

Matrix classical_mds(const Matrix& distances, int dims, std::vector<double>* eigenvalues) {
    const Eigen::Index n = distances.rows();
    if (distances.cols() != n) throw DataError("distance matrix must be square");
    if (dims < 1) throw DataError("MDS needs at least one dimension");
    Matrix out = Matrix::Zero(n, dims);
    if (eigenvalues) eigenvalues->assign(dims, 0.0);
    if (n == 0) return out;
    if (n < dims) warn("MDS: " + std::to_string(n) + " points cannot fill " + std::to_string(dims) + " dimensions; padding with zeros");

    const Matrix d2 = distances.array().square().matrix();
    const Vector row_mean = d2.rowwise().mean();
    const Vector col_mean = d2.colwise().mean().transpose();
    const double grand = d2.mean();
    Matrix b(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) b(i, j) = -0.5 * (d2(i, j) - row_mean[i] - col_mean[j] + grand);
    b = 0.5 * (b + b.transpose());

    Eigen::SelfAdjointEigenSolver<Matrix> es(b);
    if (es.info() != Eigen::Success) throw RuntimeError("MDS eigendecomposition failed");
    const int keep = static_cast<int>(std::min<Eigen::Index>(dims, n));
    for (int c = 0; c < keep; ++c) {
        const Eigen::Index idx = n - 1 - c;  // eigenvalues ascending
        const double lambda = es.eigenvalues()[idx];
        if (eigenvalues) (*eigenvalues)[c] = lambda;
        Vector v = es.eigenvectors().col(idx);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v[arg] < 0) v = -v;
        out.col(c) = v * std::sqrt(std::max(lambda, 0.0));
    }
    return out;
}

namespace {

struct DyadData {
    std::vector<double> x;     // -||z_i - z_j||^2 per unordered pair
    std::vector<double> hits;  // y_ij + y_ji
};

double binomial_loglik(const DyadData& d, double a, double b) {
    double ll = 0.0;
    for (std::size_t k = 0; k < d.x.size(); ++k) {
        const double eta = a + b * d.x[k];
        ll += d.hits[k] * eta - 2.0 * model::log1p_exp(eta);
    }
    return ll;
}

// Newton on (alpha, beta) with step halving; beta held fixed when fit_beta is false.
int newton(const DyadData& d, double& a, double& b, bool fit_beta) {
    double ll = binomial_loglik(d, a, b);
    for (int it = 1; it <= 200; ++it) {
        double g0 = 0, g1 = 0, h00 = 0, h01 = 0, h11 = 0;
        for (std::size_t k = 0; k < d.x.size(); ++k) {
            const double q = model::edge_probability(a + b * d.x[k]);
            const double r = d.hits[k] - 2.0 * q;
            const double w = 2.0 * q * (1.0 - q);
            g0 += r;
            g1 += r * d.x[k];
            h00 += w;
            h01 += w * d.x[k];
            h11 += w * d.x[k] * d.x[k];
        }
        const double gnorm = fit_beta ? std::hypot(g0, g1) : std::abs(g0);
        if (gnorm < 1e-8) return it;
        double da = 0, db = 0;
        if (fit_beta) {
            const double det = h00 * h11 - h01 * h01;
            if (!(det > 0.0)) return it;
            da = (h11 * g0 - h01 * g1) / det;
            db = (h00 * g1 - h01 * g0) / det;
        } else {
            if (!(h00 > 0.0)) return it;
            da = g0 / h00;
        }
        double step = 1.0;
        bool moved = false;
        for (int half = 0; half < 60; ++half, step *= 0.5) {
            const double na = a + step * da, nb = b + step * db;
            const double nll = binomial_loglik(d, na, nb);
            if (nll >= ll) {
                moved = true;
                a = na;
                b = nb;
                ll = nll;
                break;
            }
        }
        if (!moved || std::abs(b) > 1e3) return it;
    }
    return 200;
}

}  // namespace

RegressionFit fit_logistic_distance_regression(const netdata::AdjacencyMatrix& y, const Matrix& Z) {
    const int n = y.size();
    if (Z.rows() != n) throw DataError("position matrix row count differs from node count");
    const double dens = netdata::density(y);
    if (dens <= 0.0 || dens >= 1.0) throw DataError("distance regression needs at least one edge and one non-edge");

    DyadData d;
    d.x.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    d.hits.reserve(d.x.capacity());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            d.x.push_back(-(Z.row(i) - Z.row(j)).squaredNorm());
            d.hits.push_back(y(i, j) + y(j, i));
        }

    RegressionFit fit;
    fit.alpha = std::log(dens / (1.0 - dens));
    const double mx = std::accumulate(d.x.begin(), d.x.end(), 0.0) / d.x.size();
    double vx = 0.0;
    for (double v : d.x) vx += (v - mx) * (v - mx);
    vx /= d.x.size();
    if (!(vx > 1e-12 * (1.0 + mx * mx))) {
        fit.unidentified = true;
        warn("distance regression: predictor is constant, beta is unidentified");
        return fit;
    }
    fit.iterations = newton(d, fit.alpha, fit.beta, true);
    if (!std::isfinite(fit.beta) || std::abs(fit.beta) > 1e3) {
        fit.separated = true;
        fit.beta = std::copysign(1e3, std::isfinite(fit.beta) ? fit.beta : 1.0);
        if (!std::isfinite(fit.alpha)) fit.alpha = std::log(dens / (1.0 - dens));
        newton(d, fit.alpha, fit.beta, false);
        warn("distance regression: perfect separation, |beta| capped at 1e3");
    }
    return fit;
}

Matrix rescale_positions(const Matrix& Z, double beta) {
    Matrix out = Z.rowwise() - Z.colwise().mean();
    return out * std::sqrt(std::abs(beta));
}

namespace {

struct EmFit {
    Matrix means;
    Vector var;
    Vector weights;
    Matrix resp;
    double loglik = -std::numeric_limits<double>::infinity();
    bool ok = false;
};

Matrix kmeans_pp(const Matrix& Z, int k, dist::Rng& rng) {
    const Eigen::Index n = Z.rows();
    Matrix centers(k, Z.cols());
    centers.row(0) = Z.row(static_cast<Eigen::Index>(rng.uniform() * n) % n);
    Vector d2 = (Z.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        int pick = d2.sum() > 0 ? dist::sample_categorical(d2, rng) : static_cast<int>(rng.uniform() * n) % n;
        centers.row(c) = Z.row(pick);
        d2 = d2.cwiseMin((Z.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
    // a few Lloyd steps
    for (int it = 0; it < 10; ++it) {
        Matrix sums = Matrix::Zero(k, Z.cols());
        Vector cnt = Vector::Zero(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index best = 0;
            (centers.rowwise() - Z.row(i)).rowwise().squaredNorm().minCoeff(&best);
            sums.row(best) += Z.row(i);
            cnt[best] += 1;
        }
        for (int c = 0; c < k; ++c)
            if (cnt[c] > 0) centers.row(c) = sums.row(c) / cnt[c];
    }
    return centers;
}

EmFit run_em(const Matrix& Z, Matrix means, double var_floor) {
    const Eigen::Index n = Z.rows(), p = Z.cols();
    const int k = static_cast<int>(means.rows());
    constexpr double kLog2Pi = 1.8378770664093454835606594728112;
    EmFit f;
    f.means = std::move(means);
    f.weights = Vector::Constant(k, 1.0 / k);
    // initial variances from hard assignment
    f.var = Vector::Zero(p);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index best = 0;
        (f.means.rowwise() - Z.row(i)).rowwise().squaredNorm().minCoeff(&best);
        f.var += (Z.row(i) - f.means.row(best)).array().square().matrix().transpose();
    }
    f.var /= static_cast<double>(n);
    f.var = f.var.cwiseMax(var_floor * 10);
    f.resp.resize(n, k);

    double prev = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < 500; ++it) {
        // E-step
        const double log_det = f.var.array().log().sum();
        double ll = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double mx = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double q = ((Z.row(i) - f.means.row(c)).array().square() / f.var.transpose().array()).sum();
                const double lr = std::log(f.weights[c]) - 0.5 * q - 0.5 * log_det - 0.5 * p * kLog2Pi;
                f.resp(i, c) = lr;
                mx = std::max(mx, lr);
            }
            double s = 0.0;
            for (int c = 0; c < k; ++c) s += std::exp(f.resp(i, c) - mx);
            ll += mx + std::log(s);
            for (int c = 0; c < k; ++c) f.resp(i, c) = std::exp(f.resp(i, c) - mx) / s;
        }
        if (!std::isfinite(ll)) return f;
        f.loglik = ll;
        // M-step
        const Vector nk = f.resp.colwise().sum().transpose();
        if ((nk.array() < 1e-8).any()) return f;
        f.weights = nk / static_cast<double>(n);
        f.means = (f.resp.transpose() * Z).array().colwise() / nk.array();
        Vector v = Vector::Zero(p);
        for (int c = 0; c < k; ++c)
            v += (f.resp.col(c).asDiagonal() * (Z.rowwise() - f.means.row(c)).array().square().matrix())
                     .colwise()
                     .sum()
                     .transpose();
        f.var = v / static_cast<double>(n);
        if ((f.var.array() < var_floor).any()) return f;
        if (std::abs(ll - prev) < 1e-8 * (1.0 + std::abs(ll))) break;
        prev = ll;
    }
    f.ok = true;
    return f;
}

}  // namespace

Clustering init_clustering(const Matrix& Z, int max_components, dist::Rng& rng) {
    const Eigen::Index n = Z.rows(), p = Z.cols();
    Clustering best;
    best.labels.assign(n, 0);
    best.means = n > 0 ? Matrix(Z.colwise().mean()) : Matrix::Zero(1, p);
    best.clusters = 1;
    if (n == 0) return best;

    const Vector col_var = (Z.rowwise() - Z.colwise().mean()).array().square().colwise().mean().transpose();
    const double total_var = col_var.sum();
    if (!(total_var > 1e-300)) return best;
    const double var_floor = 1e-10 * total_var / static_cast<double>(p);

    best.bic = -std::numeric_limits<double>::infinity();
    const int kmax = static_cast<int>(std::min<Eigen::Index>(max_components, n - 1));
    for (int k = 1; k <= std::max(kmax, 1); ++k) {
        EmFit fit;
        for (int start = 0; start < 3; ++start) {
            Matrix init = kmeans_pp(Z, k, rng);
            EmFit f = run_em(Z, init, var_floor);
            for (int restart = 0; !f.ok && restart < 10; ++restart) {
                Matrix jittered = init;
                for (Eigen::Index r = 0; r < jittered.rows(); ++r)
                    for (Eigen::Index c = 0; c < p; ++c) jittered(r, c) += 0.1 * std::sqrt(col_var[c]) * rng.normal();
                f = run_em(Z, jittered, var_floor);
            }
            if (f.ok && f.loglik > fit.loglik) fit = std::move(f);
        }
        if (!fit.ok) continue;
        const double npar = static_cast<double>(k * p + p + k - 1);
        const double bic = 2.0 * fit.loglik - npar * std::log(static_cast<double>(n));
        if (bic > best.bic) {
            best.bic = bic;
            best.labels.assign(n, 0);
            for (Eigen::Index i = 0; i < n; ++i) fit.resp.row(i).maxCoeff(&best.labels[i]);
            // contiguous relabel in order of first appearance
            std::vector<int> map(k, -1);
            int next = 0;
            for (auto& c : best.labels) {
                if (map[c] < 0) map[c] = next++;
                c = map[c];
            }
            best.clusters = next;
            best.means = Matrix::Zero(next, p);
            for (int c = 0; c < k; ++c)
                if (map[c] >= 0) best.means.row(map[c]) = fit.means.row(c);
        }
    }
    return best;
}

Shrinkage init_shrinkage(const Matrix& Z, double t2, std::vector<std::string>* flags) {
    const Eigen::Index n = Z.rows(), p = Z.cols();
    Vector var(p);
    for (Eigen::Index l = 0; l < p; ++l) {
        const double m = Z.col(l).mean();
        var[l] = n > 1 ? (Z.col(l).array() - m).square().sum() / static_cast<double>(n - 1) : 0.0;
        if (!(var[l] > 0.0)) {
            var[l] = 1e-6;
            const std::string msg = "column " + std::to_string(l + 1) + " has zero variance; using 1e-6";
            warn("init: " + msg);
            if (flags) flags->push_back(msg);
        }
    }
    Shrinkage s;
    s.delta.resize(p);
    for (Eigen::Index h = 0; h < p; ++h) {
        const double w = 1.0 / var[h];
        s.delta[h] = h == 0 ? w : std::max(w * var[h - 1], t2);
    }
    s.omega = model::recompute_omega(s.delta);
    return s;
}

model::LatentState initialize(const netdata::AdjacencyMatrix& y, const model::HyperParams& hp, dist::Rng& rng,
                              InitReport* report) {
    hp.validate();
    InitReport rep;
    const Matrix geo = netdata::geodesic_distances(y).cast<double>();
    const Matrix z0 = classical_mds(geo, hp.p0, &rep.mds_eigenvalues);
    if (y.size() < hp.p0) rep.flags.push_back("fewer nodes than p0; MDS padded with zero columns");

    const RegressionFit fit = fit_logistic_distance_regression(y, z0);
    rep.alpha_hat = fit.alpha;
    rep.beta_hat = fit.beta;
    rep.rescale = std::sqrt(std::abs(fit.beta));
    if (fit.unidentified) rep.flags.push_back("distance regression predictor constant; beta unidentified");
    if (fit.separated) rep.flags.push_back("distance regression separated; |beta| capped at 1e3");

    model::LatentState s;
    s.Z = rescale_positions(z0, fit.beta);
    s.alpha = fit.alpha;

    const Shrinkage sh = init_shrinkage(s.Z, hp.t2, &rep.flags);
    s.delta = sh.delta;
    s.omega = sh.omega;

    const Clustering cl = init_clustering(s.Z, hp.G, rng);
    rep.initial_clusters = cl.clusters;
    s.labels = cl.labels;

    s.mu = Matrix::Zero(hp.G, s.p());
    const Vector mean_prec = s.omega / hp.xi;
    const Vector zero = Vector::Zero(s.p());
    for (int g = 0; g < hp.G; ++g) {
        if (g < cl.clusters) s.mu.row(g) = cl.means.row(g);
        else s.mu.row(g) = dist::sample_diag_mvn(zero, mean_prec, rng).transpose();
    }

    s.tau = Vector::Zero(hp.G);
    for (int c : s.labels) s.tau[c] += 1.0;
    s.tau /= static_cast<double>(std::max(1, y.size()));
    s.tau = s.tau.cwiseMax(1e-6);
    s.tau /= s.tau.sum();

    if (report) *report = std::move(rep);
    return s;
}

}  // namespace lspcm::init
