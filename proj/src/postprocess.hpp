#ifndef LSPCM_POSTPROCESS_HPP
#define LSPCM_POSTPROCESS_HPP

#include "common.hpp"
#include "sampler.hpp"

#include <map>
#include <optional>

namespace lspcm::post {

/// Number of distinct labels present.
int count_nonempty(std::span<const int> labels);

struct ModeInterval {
    int mode = 0;
    int lower = 0;
    int upper = 0;
};

/// Most frequent value (smallest on ties) and the [(1-mass)/2, (1+mass)/2]
/// empirical quantiles, taken as the smallest value whose empirical CDF
/// reaches the level.
ModeInterval posterior_mode_and_ci(std::span<const int> samples, double mass = 0.95);

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Linear-interpolation empirical quantiles of real-valued draws.
Interval quantile_interval(std::vector<double> values, double mass = 0.95);

/// Translation plus orthogonal map (no scaling) minimizing the Frobenius
/// distance of `sample` to `reference`; aligned = (sample - centre) * R + shift.
struct ProcrustesMap {
    Eigen::RowVectorXd centre;
    Matrix rotation;
    Eigen::RowVectorXd shift;

    Matrix apply(const Matrix& m) const;
};

/// Both matrices are zero-padded to the wider column count first.
ProcrustesMap procrustes_fit(const Matrix& sample, const Matrix& reference);
Matrix procrustes_align(const Matrix& sample, const Matrix& reference);

/// Co-clustering frequencies.
class PosteriorSimilarity {
public:
    explicit PosteriorSimilarity(int n = 0);
    void add(std::span<const int> labels);
    /// Entry (i, j) as a fraction of the partitions added.
    Matrix matrix() const;
    long count() const { return count_; }
    int size() const { return n_; }

private:
    int n_;
    long count_ = 0;
    Eigen::MatrixXi together_;
};

Matrix posterior_similarity(const std::vector<Labels>& partitions);

/// Relabels to 0..K-1 in order of first appearance.
Labels canonical_partition(std::span<const int> labels);

/// Mean ARI of `candidate` against the weighted set of sampled partitions.
double expected_ari(std::span<const int> candidate, const std::vector<Labels>& partitions,
                    const std::vector<double>& weights);

/// Average-linkage hierarchical clustering on 1 - psm; element k of the
/// result is the cut with k + 1 clusters.
std::vector<Labels> average_linkage_cuts(const Matrix& psm);

struct PearResult {
    Labels partition;  // canonical, 0-based contiguous
    double value = 0.0;
    int clusters = 0;
    std::size_t candidates = 0;
};

/// Maximizes the posterior expected ARI over the sampled partitions and every
/// average-linkage cut of 1 - PSM.
PearResult maximize_pear(const Matrix& psm, const std::vector<Labels>& partitions);

struct Relabeling {
    std::vector<int> permutation;  // sample component g -> reference slot
    double loss = 0.0;             // summed squared distance of matched means
    bool greedy = false;
};

/// Minimum-cost assignment (Hungarian algorithm); cost is rows x cols with
/// rows <= cols. Returns the column assigned to each row.
std::vector<int> solve_assignment(const Matrix& cost);

/// Maps the sample's non-empty components onto the reference's non-empty
/// components minimizing summed squared mean distance; leftovers fill the
/// remaining slots in order. Falls back to greedy matching (and warns when
/// `warn_greedy`) if the sample has more non-empty components than the
/// reference.
Relabeling permute_cluster_labels(const Matrix& sample_means, std::span<const int> sample_labels,
                                  const Matrix& reference_means, std::span<const int> reference_labels,
                                  bool warn_greedy = true);

struct Truth {
    Matrix Z;
    Labels labels;
};

struct ChainDiagnostics {
    std::size_t samples = 0;
    double z_acceptance = 0.0;
    double alpha_acceptance = 0.0;
    double reference_loglik = 0.0;
};

struct ChainInput {
    std::vector<sampler::Sample> samples;
    Matrix reference_Z;
    double reference_loglik = 0.0;
    double z_acceptance = 0.0;
    double alpha_acceptance = 0.0;
};

struct PosteriorSummary {
    std::size_t samples = 0;
    int n = 0;
    ModeInterval p;
    ModeInterval g_plus;
    std::map<int, long> p_histogram;
    std::map<int, long> g_histogram;
    Matrix psm;
    PearResult pear;
    Matrix mean_positions;      // aligned posterior mean, all padded columns
    Matrix component_means;     // relabeled, aligned means for the PEAR clusters
    double alpha_mean = 0.0;
    Interval alpha_interval;
    std::vector<ChainDiagnostics> chains;
    std::size_t greedy_relabelings = 0;
    std::optional<double> ari;  // PEAR partition vs truth
    std::optional<double> pc;   // aligned mean positions vs truth
    std::vector<double> ari_samples;
    std::vector<double> pc_samples;
};

/// Pools every chain's samples with equal weight, aligns them to the
/// reference of the chain with the highest burn-in log-likelihood, and
/// assembles the summary. With `truth`, adds ARI of the PEAR partition and
/// the Procrustes correlation over the leading min(p_m, p*) columns.
PosteriorSummary summarize(const std::vector<ChainInput>& chains, const std::optional<Truth>& truth = std::nullopt);

}  // namespace lspcm::post

#endif
