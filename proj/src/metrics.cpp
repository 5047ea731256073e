#include "metrics.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <unordered_map>

namespace lspcm::metrics {

namespace {

double choose2(double x) { return 0.5 * x * (x - 1.0); }

std::vector<int> compact(std::span<const int> labels, int& k) {
    std::unordered_map<int, int> map;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = map.emplace(labels[i], static_cast<int>(map.size()));
        out[i] = it->second;
    }
    k = static_cast<int>(map.size());
    return out;
}

}  // namespace

AriResult adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw DataError("ARI needs partitions of equal length");
    const std::size_t n = a.size();
    AriResult r;
    if (n < 2) {
        r.degenerate = true;
        return r;
    }
    int ka = 0, kb = 0;
    const auto ca = compact(a, ka);
    const auto cb = compact(b, kb);
    std::vector<double> rows(ka, 0.0), cols(kb, 0.0);
    std::unordered_map<long long, double> cells;
    for (std::size_t i = 0; i < n; ++i) {
        rows[ca[i]] += 1;
        cols[cb[i]] += 1;
        cells[static_cast<long long>(ca[i]) * kb + cb[i]] += 1;
    }
    double index = 0.0, sa = 0.0, sb = 0.0;
    for (const auto& [key, v] : cells) index += choose2(v);
    for (double v : rows) sa += choose2(v);
    for (double v : cols) sb += choose2(v);
    // scaled by 2 C(n, 2) so every term is an exact integer and the ratio
    // is rounded once
    const double pairs = choose2(static_cast<double>(n));
    const double denom = pairs * (sa + sb) - 2.0 * sa * sb;
    if (denom == 0.0) {
        r.degenerate = true;
        r.value = 1.0;
        return r;
    }
    r.value = (2.0 * pairs * index - 2.0 * sa * sb) / denom;
    return r;
}

Matrix pad_columns(const Matrix& m, Eigen::Index cols) {
    if (m.cols() >= cols) return m;
    Matrix out = Matrix::Zero(m.rows(), cols);
    out.leftCols(m.cols()) = m;
    return out;
}

namespace {

Matrix standardize(const Matrix& m) {
    Matrix c = m.rowwise() - m.colwise().mean();
    const double norm = c.norm();
    if (!(norm > 1e-300)) throw DataError("Procrustes correlation is undefined for a zero-variance configuration");
    return c / norm;
}

}  // namespace

double procrustes_correlation(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw DataError("configurations have different numbers of points");
    const Eigen::Index w = std::max(a.cols(), b.cols());
    const Matrix sa = standardize(pad_columns(a, w));
    const Matrix sb = standardize(pad_columns(b, w));
    Eigen::JacobiSVD<Matrix> svd(sa.transpose() * sb);
    return std::min(1.0, svd.singularValues().sum());
}

double procrustes_m2(const Matrix& a, const Matrix& b) {
    const double r = procrustes_correlation(a, b);
    return std::max(0.0, 1.0 - r * r);
}

}  // namespace lspcm::metrics
