#ifndef LSPCM_SAMPLER_HPP
#define LSPCM_SAMPLER_HPP

#include "adaptation.hpp"
#include "common.hpp"
#include "distributions.hpp"
#include "init.hpp"
#include "model.hpp"
#include "netdata.hpp"

#include <functional>
#include <optional>

namespace lspcm::sampler {

struct ChainConfig {
    long iterations = 1000;
    long burn_in = 100;
    long thin = 1;
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    bool adapt = true;
    /// Starting random-walk sd for alpha; tuned toward 25% acceptance
    /// during burn-in and frozen afterwards.
    double alpha_step = 0.2;
    bool tune_alpha = true;
    /// Multiplier on the k Omega^-1 position proposal, tuned toward
    /// `position_target` acceptance during burn-in and frozen afterwards.
    double position_scale = 1.0;
    bool tune_positions = true;
    double position_target = 0.3;

    void validate() const;
};

/// One stored draw.
struct Sample {
    long iteration = 0;
    double alpha = 0.0;
    double loglik = 0.0;
    Vector tau;
    Labels labels;
    Matrix mu;
    Vector delta;
    Matrix Z;

    int p() const { return static_cast<int>(Z.cols()); }
};

struct AdaptEvent {
    long iteration;
    adapt::Action action;
    double trigger;
    int old_p;
    int new_p;
};

struct PosteriorTrace {
    std::vector<Sample> samples;
    long z_proposals = 0;
    long z_accepted = 0;
    long z_rejected_nonfinite = 0;
    long alpha_proposals = 0;
    long alpha_accepted = 0;
    double alpha_step = 0.0;
    double position_scale = 1.0;
    Matrix reference_Z;  // highest log-likelihood configuration seen during burn-in
    double reference_loglik = 0.0;
    std::vector<AdaptEvent> adaptations;
    init::InitReport init;

    double z_acceptance() const { return z_proposals ? double(z_accepted) / z_proposals : 0.0; }
    double alpha_acceptance() const { return alpha_proposals ? double(alpha_accepted) / alpha_proposals : 0.0; }
};

// Individual Gibbs / Metropolis steps. Each mutates only its own block of
// the state.

/// Step 1: mu_g | - ~ MVN(sum_g / (n_g + 1/xi), [Omega (n_g + 1/xi)]^-1).
void update_component_means(model::LatentState& s, const model::HyperParams& hp, dist::Rng& rng);

/// Step 2: tau | - ~ Dir(n_1 + nu, ..., n_G + nu).
void update_weights(model::LatentState& s, const model::HyperParams& hp, dist::Rng& rng);

/// Step 3: each label drawn with probability proportional to
/// tau_g * phi(z_i; mu_g, Omega^-1), computed in log space.
void update_labels(model::LatentState& s, dist::Rng& rng);

struct PositionStats {
    long proposed = 0;
    long accepted = 0;
    long nonfinite = 0;
};

/// Step 4: random-scan node-by-node Metropolis with proposals
/// N(z_i, scale * k * Omega^-1).
PositionStats update_positions(model::LatentState& s, const netdata::AdjacencyMatrix& y, const model::HyperParams& hp,
                               dist::Rng& rng, double scale = 1.0);

/// Step 5: Gaussian random walk on alpha with sd `step`. Returns whether the
/// move was accepted; `loglik` receives the log-likelihood at the final alpha.
bool update_alpha(model::LatentState& s, const netdata::AdjacencyMatrix& y, const model::HyperParams& hp, double step,
                  dist::Rng& rng, double* loglik = nullptr);

/// Shape and rate of the delta_h full conditional (h is 0-based: 0 is
/// delta_1). Coordinate l >= h contributes its squared residuals and mean
/// norms weighted by the product of delta_1..delta_l without delta_h.
struct GammaParams {
    double shape;
    double rate;
};
GammaParams delta_conditional(const model::LatentState& s, const model::HyperParams& hp, int h);

/// Step 6.
void update_delta1(model::LatentState& s, const model::HyperParams& hp, dist::Rng& rng);

/// Step 7 for a single h >= 1 (0-based). Keeps the previous value and warns
/// if the truncated draw fails.
void update_delta_h(model::LatentState& s, const model::HyperParams& hp, int h, dist::Rng& rng);

struct SweepResult {
    PositionStats positions;
    bool alpha_accepted = false;
    double loglik = 0.0;
};

struct StepSizes {
    double alpha = 0.2;
    double position_scale = 1.0;
};

/// Steps 1-8 in order.
SweepResult sweep(model::LatentState& s, const netdata::AdjacencyMatrix& y, const model::HyperParams& hp,
                  const StepSizes& steps, dist::Rng& rng);

using SampleSink = std::function<void(const Sample&)>;

/// Runs the whole chain. Starts from `start` when given, otherwise from
/// init::initialize. Every stored sample is passed to `sink` (if set) as it
/// is produced, in addition to being kept in the returned trace unless
/// `keep_samples` is false.
PosteriorTrace run_chain(const netdata::AdjacencyMatrix& y, const model::HyperParams& hp, const ChainConfig& cfg,
                         std::optional<model::LatentState> start = std::nullopt, const SampleSink& sink = {},
                         bool keep_samples = true);

Sample snapshot(const model::LatentState& s, long iteration, double loglik);

}  // namespace lspcm::sampler

#endif
