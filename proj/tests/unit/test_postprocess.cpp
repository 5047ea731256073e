#include "helpers.hpp"
#include "metrics.hpp"
#include "postprocess.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace lspcm;

TEST_SUITE("postprocess") {
    TEST_CASE("mode and interval of integer draws") {
        const std::vector<int> v = {2, 2, 3, 3, 3, 4};
        const auto m = post::posterior_mode_and_ci(v);
        CHECK(m.mode == 3);
        CHECK(m.lower == 2);
        CHECK(m.upper == 4);
        const std::vector<int> tie = {1, 1, 2, 2};
        CHECK(post::posterior_mode_and_ci(tie).mode == 1);
        std::vector<int> many(100);
        std::iota(many.begin(), many.end(), 1);
        const auto q = post::posterior_mode_and_ci(many);
        CHECK(q.lower == 3);
        CHECK(q.upper == 98);
        CHECK(post::count_nonempty(std::vector<int>{4, 4, 0, 7}) == 3);
    }

    TEST_CASE("interpolated quantiles") {
        const auto i = post::quantile_interval({5, 1, 3, 2, 4}, 0.5);
        CHECK(i.lower == doctest::Approx(2.0));
        CHECK(i.upper == doctest::Approx(4.0));
        const auto j = post::quantile_interval({0.0, 10.0});
        CHECK(j.lower == doctest::Approx(0.25));
        CHECK(j.upper == doctest::Approx(9.75));
    }

    TEST_CASE("Procrustes alignment undoes rigid motions") {
        dist::Rng rng(81);
        for (int rep = 0; rep < 10; ++rep) {
            const Matrix x = testing::random_matrix(20, 3, rng);
            const Matrix q = testing::random_orthogonal(3, rng);
            const Matrix moved = (x * q).rowwise() + testing::random_matrix(1, 3, rng).row(0);
            CHECK((post::procrustes_align(moved, x) - x).norm() < 1e-9);
            const auto map = post::procrustes_fit(moved, x);
            CHECK((map.rotation.transpose() * map.rotation - Matrix::Identity(3, 3)).norm() < 1e-10);
        }
        // narrower sample is padded
        const Matrix x = testing::random_matrix(10, 2, rng);
        const Matrix a = post::procrustes_align(x.leftCols(1), x);
        CHECK(a.cols() == 2);
        // no rescaling
        const Matrix big = 3.0 * x;
        const Matrix ab = post::procrustes_align(big, x);
        CHECK((ab.rowwise() - ab.colwise().mean()).norm() == doctest::Approx((big.rowwise() - big.colwise().mean()).norm()));
        CHECK((ab.colwise().mean() - x.colwise().mean()).norm() < 1e-12);
    }

    TEST_CASE("posterior similarity") {
        const std::vector<Labels> parts = {{0, 0, 1}, {0, 1, 1}};
        const Matrix psm = post::posterior_similarity(parts);
        CHECK(psm(0, 1) == 0.5);
        CHECK(psm(1, 2) == 0.5);
        CHECK(psm(0, 2) == 0.0);
        for (int i = 0; i < 3; ++i) CHECK(psm(i, i) == 1.0);
        CHECK(psm == psm.transpose());

        // half the draws split {0,1} from {2,3}, half merge all
        std::vector<Labels> half(10);
        for (int k = 0; k < 10; ++k) half[k] = k % 2 ? Labels{0, 0, 1, 1} : Labels{3, 3, 3, 3};
        const Matrix h = post::posterior_similarity(half);
        CHECK(h(0, 1) == 1.0);
        CHECK(h(0, 2) == 0.5);
    }

    TEST_CASE("canonical partitions") {
        CHECK(post::canonical_partition(std::vector<int>{5, 5, 2, 9, 2}) == Labels{0, 0, 1, 2, 1});
    }

    TEST_CASE("PEAR on a single sampled partition") {
        const std::vector<Labels> parts(5, Labels{2, 2, 0, 0, 1});
        const auto r = post::maximize_pear(post::posterior_similarity(parts), parts);
        CHECK(r.partition == Labels{0, 0, 1, 1, 2});
        CHECK(r.value == doctest::Approx(1.0));
        CHECK(r.clusters == 3);
    }

    TEST_CASE("PEAR recovers a noisy block structure") {
        dist::Rng rng(82);
        Labels truth(12);
        for (int i = 0; i < 12; ++i) truth[i] = i / 4;
        std::vector<Labels> parts;
        for (int k = 0; k < 200; ++k) {
            Labels l = truth;
            l[static_cast<int>(rng.uniform() * 12)] = static_cast<int>(rng.uniform() * 3);
            parts.push_back(l);
        }
        const auto r = post::maximize_pear(post::posterior_similarity(parts), parts);
        CHECK(metrics::ari(r.partition, truth) == 1.0);
    }

    TEST_CASE("PEAR is the best candidate by brute force") {
        dist::Rng rng(83);
        for (int rep = 0; rep < 10; ++rep) {
            const int n = 4 + rep % 7;
            std::vector<Labels> parts;
            for (int k = 0; k < 30; ++k) {
                Labels l(n);
                for (auto& c : l) c = static_cast<int>(rng.uniform() * 3);
                parts.push_back(l);
            }
            const Matrix psm = post::posterior_similarity(parts);
            const auto r = post::maximize_pear(psm, parts);
            auto score = [&](const Labels& c) {
                double s = 0.0;
                for (const auto& p : parts) s += metrics::ari(c, p);
                return s / parts.size();
            };
            CHECK(r.value == doctest::Approx(score(r.partition)).epsilon(1e-12));
            for (const auto& p : parts) CHECK(score(p) <= r.value + 1e-12);
            for (const auto& c : post::average_linkage_cuts(psm)) CHECK(score(c) <= r.value + 1e-12);
        }
    }

    TEST_CASE("average linkage cuts") {
        Matrix psm(4, 4);
        psm << 1, 0.9, 0.1, 0.1, 0.9, 1, 0.1, 0.1, 0.1, 0.1, 1, 0.8, 0.1, 0.1, 0.8, 1;
        const auto cuts = post::average_linkage_cuts(psm);
        REQUIRE(cuts.size() == 4);
        CHECK(post::count_nonempty(cuts[0]) == 1);
        CHECK(metrics::ari(cuts[1], Labels{0, 0, 1, 1}) == 1.0);
        CHECK(post::count_nonempty(cuts[3]) == 4);
    }

    TEST_CASE("Hungarian assignment matches brute force") {
        dist::Rng rng(84);
        for (int rep = 0; rep < 40; ++rep) {
            const int rows = 1 + rep % 6, cols = rows + (rep / 6) % 2;
            Matrix cost(rows, cols);
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j) cost(i, j) = rng.uniform();
            const auto a = post::solve_assignment(cost);
            double got = 0.0;
            std::vector<int> used;
            for (int i = 0; i < rows; ++i) {
                got += cost(i, a[i]);
                used.push_back(a[i]);
            }
            std::sort(used.begin(), used.end());
            CHECK(std::adjacent_find(used.begin(), used.end()) == used.end());

            std::vector<int> perm(cols);
            std::iota(perm.begin(), perm.end(), 0);
            double best = 1e300;
            do {
                double c = 0.0;
                for (int i = 0; i < rows; ++i) c += cost(i, perm[i]);
                best = std::min(best, c);
            } while (std::next_permutation(perm.begin(), perm.end()));
            CHECK(got == doctest::Approx(best).epsilon(1e-12));
        }
    }

    TEST_CASE("cluster relabeling recovers a permutation") {
        dist::Rng rng(85);
        const Matrix ref = 5.0 * testing::random_matrix(4, 2, rng);
        const Labels ref_labels = {0, 1, 2, 3, 0, 1};
        const std::vector<int> perm = {2, 0, 3, 1};  // sample g is reference perm[g]
        Matrix smp(4, 2);
        Labels smp_labels(6);
        for (int g = 0; g < 4; ++g) smp.row(g) = ref.row(perm[g]) + 0.01 * testing::random_matrix(1, 2, rng);
        for (int i = 0; i < 6; ++i)
            smp_labels[i] = static_cast<int>(std::find(perm.begin(), perm.end(), ref_labels[i]) - perm.begin());
        const auto r = post::permute_cluster_labels(smp, smp_labels, ref, ref_labels);
        CHECK(r.permutation == perm);
        CHECK_FALSE(r.greedy);
    }

    TEST_CASE("summary of a single sample") {
        dist::Rng rng(86);
        model::LatentState s = testing::random_state(8, 2, 3, rng);
        s.labels = {0, 0, 0, 1, 1, 1, 1, 1};
        post::ChainInput chain;
        chain.samples.push_back(sampler::snapshot(s, 1, -3.0));
        chain.reference_Z = s.Z;
        const auto sum = post::summarize({chain}, post::Truth{s.Z, s.labels});
        CHECK(sum.samples == 1);
        CHECK(sum.p.mode == 2);
        CHECK(sum.g_plus.mode == 2);
        CHECK(sum.pear.clusters == 2);
        CHECK((sum.mean_positions - s.Z).norm() < 1e-10);
        CHECK(sum.alpha_mean == s.alpha);
        CHECK(*sum.ari == 1.0);
        CHECK(*sum.pc == doctest::Approx(1.0));
        CHECK(sum.component_means.rows() == 2);
        CHECK(sum.psm(0, 3) == 0.0);
    }
}
