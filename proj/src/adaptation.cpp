#include "adaptation.hpp"

#include <cmath>

namespace lspcm::adapt {

const char* to_string(Action a) {
    switch (a) {
        case Action::Shrink: return "shrink";
        case Action::Grow: return "grow";
        default: return "none";
    }
}

double adapt_probability(double s, double kappa0, double kappa1) {
    return std::exp(-kappa0 - kappa1 * s);
}

AdaptDecision decide(const model::LatentState& s, const model::HyperParams& hp, long iteration) {
    AdaptDecision d;
    d.iteration = iteration;
    const int p = s.p();
    const Matrix centred = s.Z.rowwise() - s.Z.colwise().mean();
    if (p == 1) {
        const double cut = hp.eps3 * kNormalCritical95;
        const double tail = (centred.col(0).array().abs() > cut).cast<double>().mean();
        d.trigger = tail;
        if (tail > kTailProportion) d.action = Action::Grow;
        return d;
    }
    const Vector var = centred.array().square().colwise().sum().transpose();
    const double total = var.sum();
    const double share = total > 0.0 ? var.head(p - 1).sum() / total : 1.0;
    if (share > hp.eps1) {
        d.action = Action::Shrink;
        d.trigger = share;
        return d;
    }
    d.trigger = 1.0 / s.delta[p - 1];
    if (d.trigger > hp.eps2) d.action = Action::Grow;
    return d;
}

void apply(model::LatentState& s, const AdaptDecision& d, const model::HyperParams& hp, dist::Rng& rng) {
    const int p = s.p();
    if (d.action == Action::Shrink) {
        if (p == 1) {
            warn("adaptation: cannot shrink below one dimension");
            return;
        }
        s.Z.conservativeResize(Eigen::NoChange, p - 1);
        s.mu.conservativeResize(Eigen::NoChange, p - 1);
        s.delta.conservativeResize(p - 1);
        s.omega = model::recompute_omega(s.delta);
    } else if (d.action == Action::Grow) {
        const double dnew = dist::sample_left_trunc_gamma({hp.a2, hp.b2, hp.t2}, rng);
        s.delta.conservativeResize(p + 1);
        s.delta[p] = dnew;
        s.omega = model::recompute_omega(s.delta);
        const double w = s.omega[p];
        s.Z.conservativeResize(Eigen::NoChange, p + 1);
        s.mu.conservativeResize(Eigen::NoChange, p + 1);
        for (int i = 0; i < s.n(); ++i) s.Z(i, p) = rng.normal() / std::sqrt(w);
        for (int g = 0; g < s.G(); ++g) s.mu(g, p) = rng.normal() * std::sqrt(hp.xi / w);
    }
}

}  // namespace lspcm::adapt
