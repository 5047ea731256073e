#ifndef LSPCM_NETDATA_HPP
#define LSPCM_NETDATA_HPP

#include "common.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lspcm::netdata {

/// n x n binary network without self-loops. Stored row-major; y(i, j) is the
/// arc i -> j. Immutable once built.
class AdjacencyMatrix {
public:
    AdjacencyMatrix() = default;
    /// Zero matrix on n nodes.
    AdjacencyMatrix(int n, bool directed);
    /// Throws DataError on non-binary entries or a nonzero diagonal.
    AdjacencyMatrix(int n, std::vector<std::uint8_t> entries, bool directed);

    int size() const { return n_; }
    bool directed() const { return directed_; }
    int operator()(int i, int j) const { return entries_[static_cast<std::size_t>(i) * n_ + j]; }
    const std::vector<std::uint8_t>& entries() const { return entries_; }
    long edge_count() const;

    /// Node labels from the input file; empty when nodes were 0-based integers.
    const std::vector<std::string>& node_labels() const { return labels_; }
    void set_node_labels(std::vector<std::string> labels);

    friend bool operator==(const AdjacencyMatrix& a, const AdjacencyMatrix& b) {
        return a.n_ == b.n_ && a.entries_ == b.entries_;
    }

private:
    int n_ = 0;
    bool directed_ = true;
    std::vector<std::uint8_t> entries_;
    std::vector<std::string> labels_;
};

enum class Format { Auto, DenseCsv, EdgeList };

/// Dense CSV: n rows of n comma-separated 0/1 values, no header.
AdjacencyMatrix parse_dense_csv(std::istream& in, bool directed = true);

/// Edge list: "src,dst" per line, optional header. Integer ids are taken as
/// 0-based indices (n = max id + 1 unless `n_hint` is larger); any non-integer
/// id switches to label mode, where labels map to indices in order of first
/// appearance. Undirected input adds both arcs.
AdjacencyMatrix parse_edge_list(std::istream& in, bool directed = true, int n_hint = 0);

/// Loads either format from disk. Auto picks dense CSV when the first line
/// has more than two fields or the file is square 0/1.
AdjacencyMatrix load_network(const std::string& path, Format format = Format::Auto,
                             bool directed = true);

void write_dense_csv(std::ostream& out, const AdjacencyMatrix& y);
void save_dense_csv(const std::string& path, const AdjacencyMatrix& y);

/// Fraction of the n(n-1) off-diagonal entries equal to one.
double density(const AdjacencyMatrix& y);

/// Hop distances on the symmetrized graph (an arc either way counts as an
/// edge). Unreachable pairs get the surrogate distance n.
using GeodesicMatrix = Eigen::MatrixXi;
GeodesicMatrix geodesic_distances(const AdjacencyMatrix& y);

}  // namespace lspcm::netdata

#endif
