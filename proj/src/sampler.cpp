#include "sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace lspcm::sampler {

void ChainConfig::validate() const {
    if (iterations < 1) throw UsageError("iterations must be positive");
    if (burn_in < 0 || burn_in >= iterations) throw UsageError("burn-in must be in [0, iterations)");
    if (thin < 1) throw UsageError("thinning interval must be at least 1");
    if (!(alpha_step > 0.0)) throw UsageError("alpha step must be positive");
    if (!(position_scale > 0.0)) throw UsageError("position proposal scale must be positive");
    if (!(position_target > 0.0 && position_target < 1.0)) throw UsageError("position acceptance target must be in (0, 1)");
}

void update_component_means(model::LatentState& s, const model::HyperParams& hp, dist::Rng& rng) {
    const int p = s.p(), G = s.G();
    Matrix sums = Matrix::Zero(G, p);
    Vector counts = Vector::Zero(G);
    for (int i = 0; i < s.n(); ++i) {
        sums.row(s.labels[i]) += s.Z.row(i);
        counts[s.labels[i]] += 1.0;
    }
    for (int g = 0; g < G; ++g) {
        const double denom = counts[g] + 1.0 / hp.xi;
        for (int l = 0; l < p; ++l) s.mu(g, l) = sums(g, l) / denom + rng.normal() / std::sqrt(s.omega[l] * denom);
    }
}

void update_weights(model::LatentState& s, const model::HyperParams& hp, dist::Rng& rng) {
    Vector conc = Vector::Constant(s.G(), hp.nu);
    for (int c : s.labels) conc[c] += 1.0;
    s.tau = dist::sample_dirichlet(conc, rng);
}

void update_labels(model::LatentState& s, dist::Rng& rng) {
    const int G = s.G(), p = s.p();
    Vector logw(G), w(G);
    Vector log_tau = s.tau.array().log();
    for (int i = 0; i < s.n(); ++i) {
        for (int g = 0; g < G; ++g) {
            double q = 0.0;
            for (int l = 0; l < p; ++l) {
                const double d = s.Z(i, l) - s.mu(g, l);
                q += s.omega[l] * d * d;
            }
            logw[g] = log_tau[g] - 0.5 * q;
        }
        Eigen::Index arg = 0;
        const double mx = logw.maxCoeff(&arg);
        if (!std::isfinite(mx)) {
            warn("label update: all responsibilities underflow for node " + std::to_string(i) + "; using argmax");
            s.labels[i] = static_cast<int>(arg);
            continue;
        }
        w = (logw.array() - mx).exp();
        s.labels[i] = dist::sample_categorical(w, rng);
    }
}

PositionStats update_positions(model::LatentState& s, const netdata::AdjacencyMatrix& y, const model::HyperParams& hp,
                               dist::Rng& rng, double scale) {
    const int n = s.n(), p = s.p();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng.engine());
    Vector sd(p);
    for (int l = 0; l < p; ++l) sd[l] = std::sqrt(scale * hp.k / s.omega[l]);

    PositionStats st;
    Vector cur(p), prop(p);
    for (int i : order) {
        cur = s.Z.row(i).transpose();
        for (int l = 0; l < p; ++l) prop[l] = cur[l] + sd[l] * rng.normal();
        const int c = s.labels[i];
        double prior = 0.0;
        for (int l = 0; l < p; ++l) {
            const double dn = prop[l] - s.mu(c, l), dc = cur[l] - s.mu(c, l);
            prior -= 0.5 * s.omega[l] * (dn * dn - dc * dc);
        }
        const double log_ratio = model::node_log_likelihood(y, s.Z, s.alpha, i, prop) -
                                 model::node_log_likelihood(y, s.Z, s.alpha, i, cur) + prior;
        ++st.proposed;
        if (!std::isfinite(log_ratio)) {
            ++st.nonfinite;
            continue;
        }
        if (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio) {
            s.Z.row(i) = prop.transpose();
            ++st.accepted;
        }
    }
    return st;
}

namespace {

// Squared distances and arc counts per unordered pair, so the alpha step can
// evaluate the likelihood at two values of alpha without recomputing them.
struct PairCache {
    std::vector<double> d2;
    std::vector<double> hits;
    double total_hits = 0.0;

    PairCache(const netdata::AdjacencyMatrix& y, const Matrix& Z) {
        const int n = y.size(), p = static_cast<int>(Z.cols());
        d2.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
        hits.reserve(d2.capacity());
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < p; ++l) {
                    const double d = Z(i, l) - Z(j, l);
                    s += d * d;
                }
                d2.push_back(s);
                const double h = y(i, j) + y(j, i);
                hits.push_back(h);
                total_hits += h;
            }
    }

    double loglik(double alpha) const {
        double ll = 0.0;
        for (std::size_t k = 0; k < d2.size(); ++k) {
            const double eta = alpha - d2[k];
            ll += hits[k] * eta - 2.0 * model::log1p_exp(eta);
        }
        return ll;
    }
};

}  // namespace

bool update_alpha(model::LatentState& s, const netdata::AdjacencyMatrix& y, const model::HyperParams& hp, double step,
                  dist::Rng& rng, double* loglik) {
    const PairCache cache(y, s.Z);
    const double cur_ll = cache.loglik(s.alpha);
    const double prop = s.alpha + step * rng.normal();
    const double prop_ll = cache.loglik(prop);
    const double log_ratio = prop_ll - cur_ll + dist::logpdf_normal(prop, hp.mu_alpha, hp.var_alpha) -
                             dist::logpdf_normal(s.alpha, hp.mu_alpha, hp.var_alpha);
    const bool accept = std::isfinite(log_ratio) && (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio);
    if (accept) s.alpha = prop;
    if (loglik) *loglik = accept ? prop_ll : cur_ll;
    return accept;
}

GammaParams delta_conditional(const model::LatentState& s, const model::HyperParams& hp, int h) {
    const int n = s.n(), p = s.p(), G = s.G();
    // per-coordinate sums of squared residuals and scaled mean norms
    Vector quad = Vector::Zero(p);
    for (int i = 0; i < n; ++i) {
        const int c = s.labels[i];
        for (int l = h; l < p; ++l) {
            const double d = s.Z(i, l) - s.mu(c, l);
            quad[l] += d * d;
        }
    }
    for (int g = 0; g < G; ++g)
        for (int l = h; l < p; ++l) quad[l] += s.mu(g, l) * s.mu(g, l) / hp.xi;

    double rate = h == 0 ? hp.b1 : hp.b2;
    double partial = 1.0;  // product of delta_1..delta_l excluding delta_h
    for (int l = 0; l < p; ++l) {
        if (l != h) partial *= s.delta[l];
        if (l >= h) rate += 0.5 * partial * quad[l];
    }
    const double shape = (h == 0 ? hp.a1 : hp.a2) + 0.5 * static_cast<double>(n + G) * (p - h);
    return {shape, rate};
}

void update_delta1(model::LatentState& s, const model::HyperParams& hp, dist::Rng& rng) {
    const GammaParams g = delta_conditional(s, hp, 0);
    if (!(g.rate > 0.0)) throw RuntimeError("delta_1 conditional has a nonpositive rate");
    s.delta[0] = rng.gamma(g.shape, g.rate);
    s.omega = model::recompute_omega(s.delta);
}

void update_delta_h(model::LatentState& s, const model::HyperParams& hp, int h, dist::Rng& rng) {
    const GammaParams g = delta_conditional(s, hp, h);
    try {
        s.delta[h] = dist::sample_left_trunc_gamma({g.shape, g.rate, hp.t2}, rng);
    } catch (const DataError& e) {
        warn(std::string("delta update kept its previous value: ") + e.what());
    }
    s.omega = model::recompute_omega(s.delta);
}

SweepResult sweep(model::LatentState& s, const netdata::AdjacencyMatrix& y, const model::HyperParams& hp,
                  const StepSizes& steps, dist::Rng& rng) {
    SweepResult r;
    update_component_means(s, hp, rng);
    update_weights(s, hp, rng);
    update_labels(s, rng);
    r.positions = update_positions(s, y, hp, rng, steps.position_scale);
    r.alpha_accepted = update_alpha(s, y, hp, steps.alpha, rng, &r.loglik);
    update_delta1(s, hp, rng);
    for (int h = 1; h < s.p(); ++h) update_delta_h(s, hp, h, rng);
    s.omega = model::recompute_omega(s.delta);
    return r;
}

Sample snapshot(const model::LatentState& s, long iteration, double loglik) {
    Sample out;
    out.iteration = iteration;
    out.alpha = s.alpha;
    out.loglik = loglik;
    out.tau = s.tau;
    out.labels = s.labels;
    out.mu = s.mu;
    out.delta = s.delta;
    out.Z = s.Z;
    return out;
}

namespace {

[[noreturn]] void abort_with_dump(const model::LatentState& s, long iteration, double ll) {
    std::ostringstream os;
    os << "non-finite log-likelihood " << ll << " at iteration " << iteration << "; state: p=" << s.p()
       << " alpha=" << s.alpha << " delta=[" << s.delta.transpose() << "] tau=[" << s.tau.transpose()
       << "] Z finite=" << (s.Z.allFinite() ? "yes" : "no");
    throw RuntimeError(os.str());
}

}  // namespace

PosteriorTrace run_chain(const netdata::AdjacencyMatrix& y, const model::HyperParams& hp, const ChainConfig& cfg,
                         std::optional<model::LatentState> start, const SampleSink& sink, bool keep_samples) {
    hp.validate();
    cfg.validate();
    dist::Rng rng(cfg.seed, cfg.stream);
    PosteriorTrace trace;
    model::LatentState s = start ? std::move(*start) : init::initialize(y, hp, rng, &trace.init);
    s.check_invariants(hp.t2);

    StepSizes steps{cfg.alpha_step, cfg.position_scale};
    long window = 0, window_alpha = 0, window_z_prop = 0, window_z_acc = 0;
    trace.reference_loglik = -std::numeric_limits<double>::infinity();

    for (long it = 1; it <= cfg.iterations; ++it) {
        const SweepResult r = sweep(s, y, hp, steps, rng);
        double ll = r.loglik;
        trace.z_proposals += r.positions.proposed;
        trace.z_accepted += r.positions.accepted;
        trace.z_rejected_nonfinite += r.positions.nonfinite;
        ++trace.alpha_proposals;
        if (r.alpha_accepted) ++trace.alpha_accepted;

        if (it <= cfg.burn_in) {
            if (ll > trace.reference_loglik) {
                trace.reference_loglik = ll;
                trace.reference_Z = s.Z;
            }
            ++window;
            if (r.alpha_accepted) ++window_alpha;
            window_z_prop += r.positions.proposed;
            window_z_acc += r.positions.accepted;
            if (window == 50) {
                if (cfg.tune_alpha) {
                    const double rate = double(window_alpha) / window;
                    steps.alpha = std::clamp(steps.alpha * std::exp(2.0 * (rate - 0.25)), 1e-4, 10.0);
                }
                if (cfg.tune_positions && window_z_prop > 0) {
                    const double rate = double(window_z_acc) / window_z_prop;
                    steps.position_scale =
                        std::clamp(steps.position_scale * std::exp(2.0 * (rate - cfg.position_target)), 1e-6, 1e3);
                }
                window = window_alpha = window_z_prop = window_z_acc = 0;
            }
        } else if (cfg.adapt) {
            const long since = it - cfg.burn_in;
            if (rng.uniform() < adapt::adapt_probability(static_cast<double>(since), hp.kappa0, hp.kappa1)) {
                const adapt::AdaptDecision d = adapt::decide(s, hp, it);
                const int old_p = s.p();
                adapt::apply(s, d, hp, rng);
                if (d.action != adapt::Action::None) trace.adaptations.push_back({it, d.action, d.trigger, old_p, s.p()});
                if (s.p() != old_p) ll = model::log_likelihood(y, s.Z, s.alpha);
            }
        }
        if (!std::isfinite(ll)) abort_with_dump(s, it, ll);

        if (it > cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) {
            Sample smp = snapshot(s, it, ll);
            if (sink) sink(smp);
            if (keep_samples) trace.samples.push_back(std::move(smp));
        }
    }
    if (trace.reference_Z.size() == 0) {
        trace.reference_Z = s.Z;
        trace.reference_loglik = model::log_likelihood(y, s.Z, s.alpha);
    }
    trace.alpha_step = steps.alpha;
    trace.position_scale = steps.position_scale;
    return trace;
}

}  // namespace lspcm::sampler
