#include "netdata.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

namespace lspcm::netdata {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    std::string out(s.substr(b, e - b));
    // RFC-4180 quoting of simple fields
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        fields.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return fields;
}

bool parse_int(const std::string& s, long& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

int parse_binary(const std::string& s, const std::string& where) {
    long v = 0;
    if (!parse_int(s, v)) {
        double d = 0;
        std::istringstream is(s);
        if (!(is >> d) || !is.eof()) throw DataError(where + ": non-numeric entry '" + s + "'");
        if (d == 0.0) return 0;
        if (d == 1.0) return 1;
        throw DataError(where + ": non-binary weight '" + s + "'");
    }
    if (v != 0 && v != 1) throw DataError(where + ": non-binary weight '" + s + "'");
    return static_cast<int>(v);
}

std::vector<std::string> read_lines(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
            static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF)
            line.erase(0, 3);
        first = false;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        lines.push_back(line);
    }
    return lines;
}

bool is_header_name(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    static const char* names[] = {"src", "dst", "source", "target", "from", "to", "node1", "node2",
                                  "i", "j", "sender", "receiver", "tail", "head"};
    return std::any_of(std::begin(names), std::end(names), [&](const char* n) { return s == n; });
}

AdjacencyMatrix dense_from_lines(const std::vector<std::string>& lines, bool directed) {
    const int n = static_cast<int>(lines.size());
    std::vector<std::uint8_t> entries(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i) {
        auto fields = split_fields(lines[i]);
        if (static_cast<int>(fields.size()) != n)
            throw DataError("dense CSV row " + std::to_string(i + 1) + " has " + std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(n) + " (ragged or non-square)");
        for (int j = 0; j < n; ++j) {
            int v = parse_binary(fields[j], "dense CSV row " + std::to_string(i + 1) + " column " + std::to_string(j + 1));
            if (i == j && v != 0)
                throw DataError("self-loop at node " + std::to_string(i) + " (dense CSV row " + std::to_string(i + 1) + ")");
            entries[static_cast<std::size_t>(i) * n + j] = static_cast<std::uint8_t>(v);
        }
    }
    return AdjacencyMatrix(n, std::move(entries), directed);
}

AdjacencyMatrix edges_from_lines(const std::vector<std::string>& lines, bool directed, int n_hint) {
    std::size_t first = 0;
    if (!lines.empty()) {
        auto f = split_fields(lines[0]);
        if (f.size() >= 2 && is_header_name(f[0]) && is_header_name(f[1])) first = 1;
    }
    struct Arc {
        std::string src, dst;
        std::size_t line;
    };
    std::vector<Arc> arcs;
    bool labeled = false;
    for (std::size_t k = first; k < lines.size(); ++k) {
        auto f = split_fields(lines[k]);
        const std::string where = "edge list line " + std::to_string(k + 1);
        if (f.size() < 2 || f.size() > 3) throw DataError(where + ": expected 'src,dst' or 'src,dst,weight'");
        if (f.size() == 3 && parse_binary(f[2], where) == 0) continue;
        long v = 0;
        if (!parse_int(f[0], v) || !parse_int(f[1], v)) labeled = true;
        arcs.push_back({f[0], f[1], k + 1});
    }

    std::map<std::string, int> index;
    std::vector<std::string> names;
    auto id_of = [&](const std::string& s, std::size_t line) -> int {
        if (labeled) {
            auto [it, inserted] = index.emplace(s, static_cast<int>(names.size()));
            if (inserted) names.push_back(s);
            return it->second;
        }
        long v = 0;
        parse_int(s, v);
        if (v < 0) throw DataError("edge list line " + std::to_string(line) + ": negative node id");
        return static_cast<int>(v);
    };
    std::vector<std::pair<int, int>> pairs;
    int n = n_hint;
    for (const auto& a : arcs) {
        int i = id_of(a.src, a.line), j = id_of(a.dst, a.line);
        if (i == j) throw DataError("self-loop at node '" + a.src + "' (edge list line " + std::to_string(a.line) + ")");
        pairs.emplace_back(i, j);
        n = std::max(n, std::max(i, j) + 1);
    }
    if (labeled) n = std::max(n, static_cast<int>(names.size()));
    std::vector<std::uint8_t> entries(static_cast<std::size_t>(n) * n, 0);
    for (auto [i, j] : pairs) {
        entries[static_cast<std::size_t>(i) * n + j] = 1;
        if (!directed) entries[static_cast<std::size_t>(j) * n + i] = 1;
    }
    AdjacencyMatrix y(n, std::move(entries), directed);
    if (labeled) y.set_node_labels(std::move(names));
    return y;
}

}  // namespace

AdjacencyMatrix::AdjacencyMatrix(int n, bool directed)
    : n_(n), directed_(directed), entries_(static_cast<std::size_t>(std::max(n, 0)) * std::max(n, 0), 0) {
    if (n < 0) throw DataError("node count must be nonnegative");
}

AdjacencyMatrix::AdjacencyMatrix(int n, std::vector<std::uint8_t> entries, bool directed)
    : n_(n), directed_(directed), entries_(std::move(entries)) {
    if (n < 0 || entries_.size() != static_cast<std::size_t>(n) * n)
        throw DataError("adjacency entries do not form an n x n matrix");
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            auto v = entries_[static_cast<std::size_t>(i) * n + j];
            if (v > 1) throw DataError("non-binary adjacency entry at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            if (i == j && v != 0) throw DataError("self-loop at node " + std::to_string(i));
        }
    }
    if (!directed_) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if ((*this)(i, j) != (*this)(j, i))
                    throw DataError("undirected network has an asymmetric entry at (" + std::to_string(i) + "," +
                                    std::to_string(j) + ")");
    }
}

long AdjacencyMatrix::edge_count() const {
    return std::count(entries_.begin(), entries_.end(), std::uint8_t{1});
}

void AdjacencyMatrix::set_node_labels(std::vector<std::string> labels) {
    if (!labels.empty() && static_cast<int>(labels.size()) != n_) throw DataError("label count does not match node count");
    labels_ = std::move(labels);
}

AdjacencyMatrix parse_dense_csv(std::istream& in, bool directed) {
    return dense_from_lines(read_lines(in), directed);
}

AdjacencyMatrix parse_edge_list(std::istream& in, bool directed, int n_hint) {
    return edges_from_lines(read_lines(in), directed, n_hint);
}

AdjacencyMatrix load_network(const std::string& path, Format format, bool directed) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open network file '" + path + "'");
    auto lines = read_lines(in);
    if (format == Format::Auto) {
        format = Format::EdgeList;
        if (!lines.empty() && split_fields(lines[0]).size() > 2) format = Format::DenseCsv;
    }
    return format == Format::DenseCsv ? dense_from_lines(lines, directed) : edges_from_lines(lines, directed, 0);
}

void write_dense_csv(std::ostream& out, const AdjacencyMatrix& y) {
    const int n = y.size();
    std::string row;
    for (int i = 0; i < n; ++i) {
        row.clear();
        for (int j = 0; j < n; ++j) {
            if (j) row.push_back(',');
            row.push_back(y(i, j) ? '1' : '0');
        }
        row.push_back('\n');
        out << row;
    }
}

void save_dense_csv(const std::string& path, const AdjacencyMatrix& y) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write network file '" + path + "'");
    write_dense_csv(out, y);
    if (!out) throw DataError("write failed for '" + path + "'");
}

double density(const AdjacencyMatrix& y) {
    const int n = y.size();
    if (n < 2) throw DataError("density needs at least two nodes");
    return static_cast<double>(y.edge_count()) / (static_cast<double>(n) * (n - 1));
}

GeodesicMatrix geodesic_distances(const AdjacencyMatrix& y) {
    const int n = y.size();
    std::vector<std::vector<int>> nbrs(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && (y(i, j) || y(j, i))) nbrs[i].push_back(j);

    GeodesicMatrix d = GeodesicMatrix::Constant(n, n, -1);
    std::queue<int> q;
    for (int s = 0; s < n; ++s) {
        d(s, s) = 0;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : nbrs[u]) {
                if (d(s, v) < 0) {
                    d(s, v) = d(s, u) + 1;
                    q.push(v);
                }
            }
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (d(i, j) < 0) d(i, j) = n;
    return d;
}

}  // namespace lspcm::netdata
