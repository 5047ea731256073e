#ifndef LSPCM_METRICS_HPP
#define LSPCM_METRICS_HPP

#include "common.hpp"

#include <span>

namespace lspcm::metrics {

struct AriResult {
    double value = 1.0;
    /// Set when the index is 0/0 (both partitions induce the same trivial
    /// pair structure, e.g. one cluster each); value is then 1.
    bool degenerate = false;
};

/// Hubert-Arabie adjusted Rand index over the contingency table. Labels may
/// be any integers; only equality matters.
AriResult adjusted_rand_index(std::span<const int> a, std::span<const int> b);

inline double ari(std::span<const int> a, std::span<const int> b) { return adjusted_rand_index(a, b).value; }

/// Minimized standardized Procrustes sum of squares m^2 between two
/// configurations (centred, scaled to unit trace, optimally rotated). The
/// narrower configuration is zero-padded.
double procrustes_m2(const Matrix& a, const Matrix& b);

/// Procrustes correlation sqrt(1 - m^2), i.e. the sum of singular values of
/// the cross-product of the standardized configurations. Symmetric; 1 for
/// configurations equal up to similarity. Throws DataError on a
/// zero-variance configuration.
double procrustes_correlation(const Matrix& a, const Matrix& b);

/// Pads with zero columns to `cols` (no-op if already that wide).
Matrix pad_columns(const Matrix& m, Eigen::Index cols);

}  // namespace lspcm::metrics

#endif
