#include "postprocess.hpp"

#include "metrics.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace lspcm::post {

int count_nonempty(std::span<const int> labels) {
    return static_cast<int>(std::set<int>(labels.begin(), labels.end()).size());
}

ModeInterval posterior_mode_and_ci(std::span<const int> samples, double mass) {
    if (samples.empty()) throw DataError("no samples to summarize");
    std::map<int, long> counts;
    for (int v : samples) ++counts[v];
    ModeInterval r;
    long best = -1;
    for (auto [v, c] : counts)
        if (c > best) {
            best = c;
            r.mode = v;
        }
    const double lo = 0.5 * (1.0 - mass), hi = 0.5 * (1.0 + mass);
    const double total = static_cast<double>(samples.size());
    double cum = 0.0;
    bool have_lo = false;
    for (auto [v, c] : counts) {
        cum += c;
        // small tolerance so that exact boundary hits count as reached
        if (!have_lo && cum / total >= lo - 1e-12) {
            r.lower = v;
            have_lo = true;
        }
        if (cum / total >= hi - 1e-12) {
            r.upper = v;
            break;
        }
    }
    return r;
}

Interval quantile_interval(std::vector<double> v, double mass) {
    if (v.empty()) return {};
    std::sort(v.begin(), v.end());
    auto q = [&](double level) {
        const double h = level * (v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const auto hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (h - lo) * (v[hi] - v[lo]);
    };
    return {q(0.5 * (1.0 - mass)), q(0.5 * (1.0 + mass))};
}

Matrix ProcrustesMap::apply(const Matrix& m) const {
    const Matrix padded = metrics::pad_columns(m, rotation.rows());
    return ((padded.rowwise() - centre) * rotation).rowwise() + shift;
}

ProcrustesMap procrustes_fit(const Matrix& sample, const Matrix& reference) {
    if (sample.rows() != reference.rows()) throw DataError("Procrustes alignment needs equal point counts");
    const Eigen::Index w = std::max(sample.cols(), reference.cols());
    const Matrix x = metrics::pad_columns(sample, w);
    const Matrix r = metrics::pad_columns(reference, w);
    ProcrustesMap map;
    map.centre = x.colwise().mean();
    map.shift = r.colwise().mean();
    const Matrix xc = x.rowwise() - map.centre;
    const Matrix rc = r.rowwise() - map.shift;
    map.rotation = Matrix::Identity(w, w);
    if (xc.norm() > 1e-300 && rc.norm() > 1e-300) {
        Eigen::JacobiSVD<Matrix> svd(xc.transpose() * rc, Eigen::ComputeFullU | Eigen::ComputeFullV);
        map.rotation = svd.matrixU() * svd.matrixV().transpose();
    }
    return map;
}

Matrix procrustes_align(const Matrix& sample, const Matrix& reference) {
    return procrustes_fit(sample, reference).apply(sample);
}

PosteriorSimilarity::PosteriorSimilarity(int n) : n_(n), together_(Eigen::MatrixXi::Zero(n, n)) {}

void PosteriorSimilarity::add(std::span<const int> labels) {
    if (static_cast<int>(labels.size()) != n_) throw DataError("partition length differs from the similarity matrix");
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j)
            if (labels[i] == labels[j]) ++together_(i, j);
    ++count_;
}

Matrix PosteriorSimilarity::matrix() const {
    Matrix m(n_, n_);
    const double c = count_ > 0 ? static_cast<double>(count_) : 1.0;
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) m(i, j) = m(j, i) = together_(i, j) / c;
    return m;
}

Matrix posterior_similarity(const std::vector<Labels>& partitions) {
    if (partitions.empty()) throw DataError("no partitions for the similarity matrix");
    PosteriorSimilarity psm(static_cast<int>(partitions.front().size()));
    for (const auto& p : partitions) psm.add(p);
    return psm.matrix();
}

Labels canonical_partition(std::span<const int> labels) {
    std::map<int, int> map;
    Labels out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = map.emplace(labels[i], static_cast<int>(map.size()));
        out[i] = it->second;
    }
    return out;
}

double expected_ari(std::span<const int> candidate, const std::vector<Labels>& partitions,
                    const std::vector<double>& weights) {
    double s = 0.0, wsum = 0.0;
    for (std::size_t k = 0; k < partitions.size(); ++k) {
        s += weights[k] * metrics::ari(candidate, partitions[k]);
        wsum += weights[k];
    }
    return wsum > 0 ? s / wsum : 0.0;
}

std::vector<Labels> average_linkage_cuts(const Matrix& psm) {
    const int n = static_cast<int>(psm.rows());
    std::vector<Labels> cuts;
    if (n == 0) return cuts;
    Matrix d = (1.0 - psm.array()).matrix();
    std::vector<int> size(n, 1);
    std::vector<bool> alive(n, true);
    std::vector<std::pair<int, int>> merges;
    for (int step = 0; step < n - 1; ++step) {
        int bi = -1, bj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            for (int j = i + 1; j < n; ++j)
                if (alive[j] && d(i, j) < best) {
                    best = d(i, j);
                    bi = i;
                    bj = j;
                }
        }
        for (int k = 0; k < n; ++k) {
            if (!alive[k] || k == bi || k == bj) continue;
            const double v = (size[bi] * d(bi, k) + size[bj] * d(bj, k)) / (size[bi] + size[bj]);
            d(bi, k) = d(k, bi) = v;
        }
        size[bi] += size[bj];
        alive[bj] = false;
        merges.emplace_back(bi, bj);
    }
    // replay merges: cut with k clusters applies the first n - k merges
    cuts.resize(n);
    for (int k = 1; k <= n; ++k) {
        std::vector<int> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (int m = 0; m < n - k; ++m) parent[find(merges[m].second)] = find(merges[m].first);
        Labels lab(n);
        for (int i = 0; i < n; ++i) lab[i] = find(i);
        cuts[k - 1] = canonical_partition(lab);
    }
    return cuts;
}

PearResult maximize_pear(const Matrix& psm, const std::vector<Labels>& partitions) {
    if (partitions.empty()) throw DataError("no partitions for PEAR");
    std::map<Labels, double> unique;
    for (const auto& p : partitions) unique[canonical_partition(p)] += 1.0;
    std::vector<Labels> parts;
    std::vector<double> weights;
    for (auto& [p, w] : unique) {
        parts.push_back(p);
        weights.push_back(w);
    }
    std::vector<Labels> candidates = parts;
    for (auto& cut : average_linkage_cuts(psm))
        if (!unique.count(cut)) candidates.push_back(std::move(cut));

    PearResult best;
    best.value = -std::numeric_limits<double>::infinity();
    best.candidates = candidates.size();
    for (const auto& c : candidates) {
        const double v = expected_ari(c, parts, weights);
        if (v > best.value + 1e-15) {
            best.value = v;
            best.partition = c;
        }
    }
    best.clusters = count_nonempty(best.partition);
    return best;
}

std::vector<int> solve_assignment(const Matrix& cost) {
    // Hungarian method with potentials, 1-based internals
    const int rows = static_cast<int>(cost.rows()), cols = static_cast<int>(cost.cols());
    if (rows > cols) throw DataError("assignment needs rows <= cols");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
    std::vector<int> match(cols + 1, 0), way(cols + 1, 0);
    for (int i = 1; i <= rows; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(cols + 1, inf);
        std::vector<bool> used(cols + 1, false);
        do {
            used[j0] = true;
            const int i0 = match[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= cols; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= cols; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> result(rows, -1);
    for (int j = 1; j <= cols; ++j)
        if (match[j] > 0) result[match[j] - 1] = j - 1;
    return result;
}

Relabeling permute_cluster_labels(const Matrix& sample_means, std::span<const int> sample_labels,
                                  const Matrix& reference_means, std::span<const int> reference_labels,
                                  bool warn_greedy) {
    const int G = static_cast<int>(sample_means.rows());
    if (reference_means.rows() != G) throw DataError("sample and reference have different component counts");
    const Eigen::Index w = std::max(sample_means.cols(), reference_means.cols());
    const Matrix sm = metrics::pad_columns(sample_means, w), rm = metrics::pad_columns(reference_means, w);

    auto nonempty = [G](std::span<const int> labels) {
        std::vector<bool> used(G, false);
        for (int c : labels) used.at(c) = true;
        std::vector<int> out;
        for (int g = 0; g < G; ++g)
            if (used[g]) out.push_back(g);
        return out;
    };
    const std::vector<int> rows = nonempty(sample_labels), cols = nonempty(reference_labels);

    Relabeling r;
    r.permutation.assign(G, -1);
    std::vector<bool> slot_taken(G, false);
    if (!rows.empty() && !cols.empty()) {
        Matrix cost(rows.size(), cols.size());
        for (std::size_t a = 0; a < rows.size(); ++a)
            for (std::size_t b = 0; b < cols.size(); ++b) cost(a, b) = (sm.row(rows[a]) - rm.row(cols[b])).squaredNorm();
        if (rows.size() <= cols.size()) {
            const auto assign = solve_assignment(cost);
            for (std::size_t a = 0; a < rows.size(); ++a) {
                r.permutation[rows[a]] = cols[assign[a]];
                slot_taken[cols[assign[a]]] = true;
                r.loss += cost(a, assign[a]);
            }
        } else {
            r.greedy = true;
            if (warn_greedy)
                warn("label permutation: sample has more non-empty components than the reference; matching greedily");
            std::vector<std::tuple<double, int, int>> pairs;
            for (std::size_t a = 0; a < rows.size(); ++a)
                for (std::size_t b = 0; b < cols.size(); ++b) pairs.emplace_back(cost(a, b), int(a), int(b));
            std::sort(pairs.begin(), pairs.end());
            std::vector<bool> row_done(rows.size(), false);
            for (auto [c, a, b] : pairs) {
                if (row_done[a] || slot_taken[cols[b]]) continue;
                row_done[a] = true;
                slot_taken[cols[b]] = true;
                r.permutation[rows[a]] = cols[b];
                r.loss += c;
            }
        }
    }
    int next = 0;
    for (int g = 0; g < G; ++g) {
        if (r.permutation[g] >= 0) continue;
        while (slot_taken[next]) ++next;
        r.permutation[g] = next;
        slot_taken[next] = true;
    }
    return r;
}

PosteriorSummary summarize(const std::vector<ChainInput>& chains, const std::optional<Truth>& truth) {
    PosteriorSummary out;
    std::vector<const sampler::Sample*> pool;
    std::size_t ref_chain = 0;
    for (std::size_t c = 0; c < chains.size(); ++c) {
        for (const auto& s : chains[c].samples) pool.push_back(&s);
        if (chains[c].reference_loglik > chains[ref_chain].reference_loglik) ref_chain = c;
        out.chains.push_back({chains[c].samples.size(), chains[c].z_acceptance, chains[c].alpha_acceptance,
                              chains[c].reference_loglik});
    }
    if (pool.empty()) throw DataError("no posterior samples to summarize");
    out.samples = pool.size();
    out.n = static_cast<int>(pool.front()->Z.rows());
    const int G = static_cast<int>(pool.front()->tau.size());

    Matrix reference = chains[ref_chain].reference_Z;
    if (reference.size() == 0) reference = pool.front()->Z;
    Eigen::Index width = reference.cols();
    for (const auto* s : pool) {
        if (s->Z.rows() != out.n || static_cast<int>(s->tau.size()) != G) throw DataError("samples disagree on n or G");
        width = std::max<Eigen::Index>(width, s->p());
    }

    // dimension and component counts
    std::vector<int> ps, gs;
    std::vector<double> alphas;
    for (const auto* s : pool) {
        ps.push_back(s->p());
        gs.push_back(count_nonempty(s->labels));
        alphas.push_back(s->alpha);
        ++out.p_histogram[ps.back()];
        ++out.g_histogram[gs.back()];
    }
    out.p = posterior_mode_and_ci(ps);
    out.g_plus = posterior_mode_and_ci(gs);
    out.alpha_mean = std::accumulate(alphas.begin(), alphas.end(), 0.0) / alphas.size();
    out.alpha_interval = quantile_interval(alphas);

    // alignment
    std::vector<ProcrustesMap> maps;
    maps.reserve(pool.size());
    out.mean_positions = Matrix::Zero(out.n, width);
    for (const auto* s : pool) {
        maps.push_back(procrustes_fit(metrics::pad_columns(s->Z, width), metrics::pad_columns(reference, width)));
        out.mean_positions += maps.back().apply(s->Z);
    }
    out.mean_positions /= static_cast<double>(pool.size());

    // partitions
    std::vector<Labels> partitions;
    partitions.reserve(pool.size());
    for (const auto* s : pool) partitions.push_back(s->labels);
    out.psm = posterior_similarity(partitions);
    out.pear = maximize_pear(out.psm, partitions);

    // label permutation against the sample closest to the PEAR partition
    std::size_t ref_sample = 0;
    double best_ari = -2.0;
    for (std::size_t k = 0; k < pool.size(); ++k) {
        const double a = metrics::ari(partitions[k], out.pear.partition);
        if (a > best_ari + 1e-15) {
            best_ari = a;
            ref_sample = k;
        }
    }
    const Matrix ref_means = maps[ref_sample].apply(pool[ref_sample]->mu);
    const Labels& ref_labels = pool[ref_sample]->labels;
    Matrix sums = Matrix::Zero(G, width);
    Vector counts = Vector::Zero(G);
    for (std::size_t k = 0; k < pool.size(); ++k) {
        const Matrix aligned = maps[k].apply(pool[k]->mu);
        const Relabeling rl = permute_cluster_labels(aligned, pool[k]->labels, ref_means, ref_labels, false);
        if (rl.greedy) ++out.greedy_relabelings;
        std::vector<bool> used(G, false);
        for (int c : pool[k]->labels) used[c] = true;
        for (int g = 0; g < G; ++g) {
            if (!used[g]) continue;
            sums.row(rl.permutation[g]) += aligned.row(g);
            counts[rl.permutation[g]] += 1.0;
        }
    }
    if (out.greedy_relabelings > 0)
        warn("label permutation: " + std::to_string(out.greedy_relabelings) + " of " + std::to_string(pool.size()) +
             " samples had more non-empty components than the reference and were matched greedily");
    std::vector<int> ref_slots;
    for (int g = 0; g < G; ++g)
        if (std::find(ref_labels.begin(), ref_labels.end(), g) != ref_labels.end()) ref_slots.push_back(g);
    out.component_means = Matrix::Zero(static_cast<Eigen::Index>(ref_slots.size()), width);
    for (std::size_t r = 0; r < ref_slots.size(); ++r)
        if (counts[ref_slots[r]] > 0) out.component_means.row(r) = sums.row(ref_slots[r]) / counts[ref_slots[r]];

    if (truth) {
        if (static_cast<int>(truth->labels.size()) != out.n || truth->Z.rows() != out.n)
            throw DataError("truth does not match the network size");
        out.ari = metrics::ari(out.pear.partition, truth->labels);
        const Eigen::Index k = std::min<Eigen::Index>(out.p.mode, truth->Z.cols());
        out.pc = metrics::procrustes_correlation(truth->Z.leftCols(k), out.mean_positions.leftCols(k));
        for (std::size_t s = 0; s < pool.size(); ++s) {
            out.ari_samples.push_back(metrics::ari(partitions[s], truth->labels));
            const Matrix aligned = maps[s].apply(pool[s]->Z);
            out.pc_samples.push_back(metrics::procrustes_correlation(truth->Z.leftCols(k), aligned.leftCols(k)));
        }
    }
    return out;
}

}  // namespace lspcm::post
