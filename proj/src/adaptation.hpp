#ifndef LSPCM_ADAPTATION_HPP
#define LSPCM_ADAPTATION_HPP

#include "common.hpp"
#include "distributions.hpp"
#include "model.hpp"

namespace lspcm::adapt {

enum class Action { None, Shrink, Grow };

const char* to_string(Action a);

struct AdaptDecision {
    Action action = Action::None;
    /// Variance share of the leading p-1 columns, 1/delta_p, or the tail
    /// proportion at p = 1, whichever rule decided.
    double trigger = 0.0;
    long iteration = 0;
};

/// Standard-normal one-sided 95% critical value used by the p = 1 rule.
inline constexpr double kNormalCritical95 = 1.6448536269514722;

/// Tail proportion above which the p = 1 rule grows the dimension.
inline constexpr double kTailProportion = 0.05;

/// exp(-kappa0 - kappa1 * s).
double adapt_probability(double s, double kappa0, double kappa1);

/// Shrink when columns 1..p-1 of Z hold more than eps1 of the total column
/// variance; otherwise grow when 1/delta_p > eps2. At p = 1, grow when more
/// than 5% of the positions deviate from the column mean by more than
/// eps3 * 1.645.
AdaptDecision decide(const model::LatentState& s, const model::HyperParams& hp, long iteration = 0);

/// Shrink drops the last coordinate everywhere. Grow draws delta_{p+1} from
/// its truncated-gamma prior and the new coordinates of Z and mu from their
/// priors given the extended omega.
void apply(model::LatentState& s, const AdaptDecision& d, const model::HyperParams& hp, dist::Rng& rng);

}  // namespace lspcm::adapt

#endif
