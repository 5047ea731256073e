#ifndef LSPCM_INIT_HPP
#define LSPCM_INIT_HPP

#include "common.hpp"
#include "distributions.hpp"
#include "model.hpp"
#include "netdata.hpp"

namespace lspcm::init {

/// What the initialization pipeline found; echoed into the run manifest.
struct InitReport {
    double alpha_hat = 0.0;
    double beta_hat = 0.0;
    double rescale = 0.0;                 // sqrt(|beta_hat|)
    std::vector<double> mds_eigenvalues;  // the retained p0, descending
    int initial_clusters = 0;
    std::vector<std::string> flags;       // degenerate-design notes, caps, padding
};

/// Classical (Torgerson) scaling of a distance matrix into `dims` columns,
/// ordered by descending eigenvalue. Column signs are fixed so the entry of
/// largest magnitude is positive. Pads with zero columns when n < dims.
Matrix classical_mds(const Matrix& distances, int dims, std::vector<double>* eigenvalues = nullptr);

struct RegressionFit {
    double alpha = 0.0;
    double beta = 0.0;
    int iterations = 0;
    bool separated = false;     // |beta| hit the 1e3 cap
    bool unidentified = false;  // constant predictor; beta set to 0
};

/// Logistic regression of y_ij (i != j) on -||z_i - z_j||^2 by Newton/IRLS.
RegressionFit fit_logistic_distance_regression(const netdata::AdjacencyMatrix& y, const Matrix& Z);

/// Mean-centre the columns, then multiply by sqrt(|beta|).
Matrix rescale_positions(const Matrix& Z, double beta);

struct Clustering {
    Labels labels;  // in [0, clusters)
    Matrix means;   // clusters x p
    int clusters = 1;
    double bic = 0.0;
};

/// Gaussian mixture with a shared diagonal covariance (the EEI structure),
/// fitted by EM for 1..max_components components; the count maximizing BIC
/// wins.
Clustering init_clustering(const Matrix& Z, int max_components, dist::Rng& rng);

struct Shrinkage {
    Vector delta;
    Vector omega;
};

/// omega_l = 1 / var(column l); delta_1 = omega_1 and delta_h the ratio of
/// consecutive precisions clamped to at least t2. omega is then rebuilt as
/// the cumulative product of the clamped delta.
Shrinkage init_shrinkage(const Matrix& Z, double t2, std::vector<std::string>* flags = nullptr);

/// Builds the s = 0 state: geodesic distances, MDS to p0 columns, distance
/// regression, rescaling, shrinkage, clustering; unused components get prior
/// means and tau starts at the floored empirical proportions.
model::LatentState initialize(const netdata::AdjacencyMatrix& y, const model::HyperParams& hp, dist::Rng& rng,
                              InitReport* report = nullptr);

}  // namespace lspcm::init

#endif
