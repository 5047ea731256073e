#ifndef LSPCM_TEST_HELPERS_HPP
#define LSPCM_TEST_HELPERS_HPP

#include "distributions.hpp"
#include "model.hpp"
#include "netdata.hpp"

#include <cmath>
#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <string>
#include <vector>

namespace testing {

using namespace lspcm;

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

inline Moments moments(const std::vector<double>& v) {
    Moments m;
    for (double x : v) m.mean += x;
    m.mean /= v.size();
    for (double x : v) m.var += (x - m.mean) * (x - m.mean);
    m.var /= (v.size() - 1);
    return m;
}

inline netdata::AdjacencyMatrix random_network(int n, double p, dist::Rng& rng, bool directed = true) {
    std::vector<std::uint8_t> e(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j || (!directed && j < i)) continue;
            const std::uint8_t v = rng.uniform() < p ? 1 : 0;
            e[i * n + j] = v;
            if (!directed) e[j * n + i] = v;
        }
    return netdata::AdjacencyMatrix(n, std::move(e), directed);
}

inline Matrix random_matrix(int rows, int cols, dist::Rng& rng, double sd = 1.0) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = sd * rng.normal();
    return m;
}

/// Uniformly random orthogonal matrix via QR of a Gaussian matrix.
inline Matrix random_orthogonal(int p, dist::Rng& rng) {
    const Matrix g = random_matrix(p, p, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ() * Matrix::Identity(p, p);
}

/// Valid random state with the given shape.
inline model::LatentState random_state(int n, int p, int G, dist::Rng& rng) {
    model::LatentState s;
    s.Z = random_matrix(n, p, rng);
    s.labels.resize(n);
    for (auto& c : s.labels) c = static_cast<int>(rng.uniform() * G);
    s.tau = Vector::Constant(G, 1.0 / G);
    s.mu = random_matrix(G, p, rng);
    s.delta = Vector(p);
    s.delta[0] = 0.5 + rng.uniform();
    for (int h = 1; h < p; ++h) s.delta[h] = 1.0 + rng.uniform();
    s.omega = model::recompute_omega(s.delta);
    s.alpha = rng.normal();
    return s;
}

inline std::string scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("lspcm_test_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace testing

#endif
