#include "helpers.hpp"

#include <doctest.h>

#include <fstream>
#include <numeric>
#include <sstream>

using namespace lspcm;
using netdata::AdjacencyMatrix;

namespace {

AdjacencyMatrix from_pairs(int n, const std::vector<std::pair<int, int>>& arcs, bool directed = true) {
    std::vector<std::uint8_t> e(static_cast<std::size_t>(n) * n, 0);
    for (auto [i, j] : arcs) {
        e[i * n + j] = 1;
        if (!directed) e[j * n + i] = 1;
    }
    return AdjacencyMatrix(n, std::move(e), directed);
}

}  // namespace

TEST_SUITE("netdata") {
    TEST_CASE("edge list transcribes arcs") {
        std::istringstream in("0,1\n1,0\n");
        const auto y = netdata::parse_edge_list(in);
        REQUIRE(y.size() == 2);
        CHECK(y(0, 1) == 1);
        CHECK(y(1, 0) == 1);
        CHECK(y(0, 0) == 0);
        CHECK(y(1, 1) == 0);
    }

    TEST_CASE("empty edge list with three nodes is the zero matrix") {
        std::istringstream in("");
        const auto y = netdata::parse_edge_list(in, true, 3);
        REQUIRE(y.size() == 3);
        CHECK(y.edge_count() == 0);
    }

    TEST_CASE("edge list with header, labels and weights") {
        std::istringstream in("source,target,weight\nalice,bob,1\nbob,carol,1\ncarol,alice,0\n");
        const auto y = netdata::parse_edge_list(in);
        REQUIRE(y.size() == 3);
        CHECK(y.node_labels() == std::vector<std::string>{"alice", "bob", "carol"});
        CHECK(y(0, 1) == 1);
        CHECK(y(1, 2) == 1);
        CHECK(y(2, 0) == 0);
    }

    TEST_CASE("input errors are rejected") {
        std::istringstream loop("0,1,0\n0,1,0\n0,0,0\n");
        CHECK_THROWS_AS(netdata::parse_dense_csv(loop), DataError);
        std::istringstream ragged("0,1\n1,0,0\n");
        CHECK_THROWS_AS(netdata::parse_dense_csv(ragged), DataError);
        std::istringstream weight("0,2\n0,0\n");
        CHECK_THROWS_AS(netdata::parse_dense_csv(weight), DataError);
        std::istringstream self("3,3\n");
        CHECK_THROWS_AS(netdata::parse_edge_list(self), DataError);
        std::istringstream bad_weight("0,1,5\n");
        CHECK_THROWS_AS(netdata::parse_edge_list(bad_weight), DataError);
        CHECK_THROWS_AS(netdata::load_network("/nonexistent/net.csv"), DataError);
    }

    TEST_CASE("undirected matrices must be symmetric") {
        std::vector<std::uint8_t> e = {0, 1, 0, 0};
        CHECK_THROWS_AS(AdjacencyMatrix(2, e, false), DataError);
        CHECK_NOTHROW(AdjacencyMatrix(2, e, true));
    }

    TEST_CASE("density") {
        std::vector<std::uint8_t> full = {0, 1, 1, 1, 0, 1, 1, 1, 0};
        CHECK(netdata::density(AdjacencyMatrix(3, full, true)) == doctest::Approx(1.0));
        CHECK(netdata::density(AdjacencyMatrix(4, true)) == 0.0);
        CHECK_THROWS_AS(netdata::density(AdjacencyMatrix(1, true)), DataError);

        // 497 arcs on 55 nodes
        std::vector<std::pair<int, int>> arcs;
        for (int i = 0; i < 55 && arcs.size() < 497; ++i)
            for (int j = 0; j < 55 && arcs.size() < 497; ++j)
                if (i != j) arcs.emplace_back(i, j);
        CHECK(netdata::density(from_pairs(55, arcs)) == doctest::Approx(0.1673).epsilon(1e-3));
    }

    TEST_CASE("density is invariant under node permutation") {
        dist::Rng rng(11);
        const auto y = testing::random_network(12, 0.3, rng);
        std::vector<int> perm(12);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng.engine());
        std::vector<std::uint8_t> e(144);
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j) e[perm[i] * 12 + perm[j]] = static_cast<std::uint8_t>(y(i, j));
        CHECK(netdata::density(AdjacencyMatrix(12, e, true)) == netdata::density(y));
    }

    TEST_CASE("geodesic distances") {
        const auto path = from_pairs(3, {{0, 1}, {1, 2}});
        const auto d = netdata::geodesic_distances(path);
        CHECK(d(0, 2) == 2);
        CHECK(d(2, 0) == 2);  // symmetrized
        CHECK(d(0, 0) == 0);

        const auto split = from_pairs(4, {{0, 1}});
        CHECK(netdata::geodesic_distances(split)(0, 2) == 4);

        const auto star = from_pairs(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, false);
        const auto ds = netdata::geodesic_distances(star);
        for (int a = 1; a < 5; ++a)
            for (int b = 1; b < 5; ++b)
                if (a != b) CHECK(ds(a, b) == 2);
    }

    TEST_CASE("geodesic distances match Floyd-Warshall and satisfy the triangle inequality") {
        dist::Rng rng(5);
        for (int rep = 0; rep < 20; ++rep) {
            const int n = 20;
            const auto y = testing::random_network(n, 0.08, rng);
            const auto d = netdata::geodesic_distances(y);
            Eigen::MatrixXi f = Eigen::MatrixXi::Constant(n, n, 1 << 20);
            for (int i = 0; i < n; ++i) {
                f(i, i) = 0;
                for (int j = 0; j < n; ++j)
                    if (y(i, j) || y(j, i)) f(i, j) = 1;
            }
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) f(i, j) = std::min(f(i, j), f(i, k) + f(k, j));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    CHECK(d(i, j) == (f(i, j) >= (1 << 20) ? n : f(i, j)));
                    CHECK(d(i, j) == d(j, i));
                    for (int k = 0; k < n; ++k)
                        if (f(i, j) < (1 << 20) && f(j, k) < (1 << 20)) CHECK(d(i, k) <= d(i, j) + d(j, k));
                }
        }
    }

    TEST_CASE("save then load round-trips") {
        dist::Rng rng(3);
        const auto y = testing::random_network(9, 0.4, rng);
        const std::string dir = testing::scratch_dir("netdata");
        const std::string path = dir + "/net.csv";
        netdata::save_dense_csv(path, y);
        CHECK(netdata::load_network(path) == y);
        CHECK(netdata::load_network(path, netdata::Format::DenseCsv) == y);

        std::ofstream el(dir + "/edges.csv");
        el << "src,dst\n";
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 9; ++j)
                if (y(i, j)) el << i << "," << j << "\n";
        el.close();
        const auto z = netdata::load_network(dir + "/edges.csv", netdata::Format::EdgeList);
        for (int i = 0; i < z.size(); ++i)
            for (int j = 0; j < z.size(); ++j) CHECK(z(i, j) == y(i, j));
    }
}
