#ifndef LSPCM_MODEL_HPP
#define LSPCM_MODEL_HPP

#include "common.hpp"
#include "distributions.hpp"
#include "netdata.hpp"

namespace lspcm::model {

/// Fixed constants of the model, the sampler and the dimension adaptation.
struct HyperParams {
    double a1 = 2.0;         // shape of delta_1
    double b1 = 1.0;         // rate of delta_1
    double a2 = 3.0;         // shape of delta_h, h >= 2
    double b2 = 1.0;         // rate of delta_h
    double t2 = 1.0;         // left truncation of delta_h
    double xi = 9.0;         // inflation of the component-mean covariance
    double nu = 0.01;        // symmetric Dirichlet concentration on tau
    double mu_alpha = 0.0;   // prior mean of alpha
    double var_alpha = 4.0;  // prior variance of alpha
    int p0 = 5;              // initial dimension truncation
    int G = 20;              // number of mixture components
    double kappa0 = 4.0;
    double kappa1 = 5e-4;
    double eps1 = 0.8;       // shrink threshold on cumulative variance share
    double eps2 = 0.9;       // grow threshold on 1/delta_p
    double eps3 = 5.0;       // grow threshold multiplier when p = 1
    double k = 2.5;          // position proposal step-size factor

    /// Throws UsageError naming the first violated constraint.
    void validate() const;
};

/// One full MCMC state. Components are 0-based internally.
struct LatentState {
    Matrix Z;        // n x p positions
    Labels labels;   // component of each node, in [0, G)
    Vector tau;      // G mixture weights
    Matrix mu;       // G x p component means
    Vector delta;    // p shrinkage multipliers
    Vector omega;    // p precisions, cumulative product of delta
    double alpha = 0.0;

    int n() const { return static_cast<int>(Z.rows()); }
    int p() const { return static_cast<int>(Z.cols()); }
    int G() const { return static_cast<int>(tau.size()); }

    /// Throws RuntimeError when shapes disagree, omega != cumprod(delta),
    /// tau leaves the simplex, a label is out of range or delta_h < t2.
    void check_invariants(double t2 = 1.0) const;
};

Vector recompute_omega(const Vector& delta);

/// alpha - ||z_i - z_j||^2.
double edge_log_odds(const Eigen::Ref<const Vector>& zi, const Eigen::Ref<const Vector>& zj, double alpha);

/// log(1 + exp(eta)) without overflow.
inline double log1p_exp(double eta) {
    if (eta > 35.0) return eta;
    if (eta < -37.0) return std::exp(eta);
    return std::log1p(std::exp(eta));
}

inline double edge_probability(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

/// Sum over ordered pairs i != j of y_ij * eta_ij - log(1 + exp(eta_ij)).
double log_likelihood(const netdata::AdjacencyMatrix& y, const Matrix& Z, double alpha);

/// Likelihood terms involving node i (both arc directions) with node i placed
/// at `zi` and every other node at its row of Z. Differences of this quantity
/// for two positions of node i equal the full log-likelihood difference.
double node_log_likelihood(const netdata::AdjacencyMatrix& y, const Matrix& Z, double alpha, int i,
                           const Eigen::Ref<const Vector>& zi);

/// Log of alpha's Gaussian prior plus the mixture, label, weight, mean and
/// shrinkage priors. -inf when delta_h < t2 for some h >= 2.
double log_prior(const LatentState& s, const HyperParams& hp);

/// Independent Bernoulli arcs for all i != j.
netdata::AdjacencyMatrix simulate_network(const Matrix& Z, double alpha, dist::Rng& rng);

}  // namespace lspcm::model

#endif
