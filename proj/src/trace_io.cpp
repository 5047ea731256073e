#include "trace_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace lspcm::io {

std::string format_real(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void append_vector(std::string& out, const Vector& v) {
    out += '[';
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_real(v[i]);
    }
    out += ']';
}

long get_long(const Json& j, const char* key, long line) {
    if (!j.contains(key) || !j[key].is_number_integer())
        throw DataError("trace line " + std::to_string(line) + ": missing or non-integer field '" + key + "'");
    return j[key].get<long>();
}

double get_real(const Json& j, const char* key, long line) {
    if (!j.contains(key) || !j[key].is_number())
        throw DataError("trace line " + std::to_string(line) + ": missing or non-numeric field '" + key + "'");
    return j[key].get<double>();
}

Vector get_vector(const Json& j, const char* key, long line) {
    if (!j.contains(key) || !j[key].is_array())
        throw DataError("trace line " + std::to_string(line) + ": missing array field '" + key + "'");
    const Json& a = j[key];
    Vector v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number())
            throw DataError("trace line " + std::to_string(line) + ": non-numeric entry in '" + key + "'");
        v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    }
    return v;
}

}  // namespace

std::string format_sample(const sampler::Sample& s) {
    std::string out;
    out.reserve(64 + 24 * (s.Z.size() + s.mu.size() + s.tau.size()));
    out += "{\"iteration\":" + std::to_string(s.iteration);
    out += ",\"p\":" + std::to_string(s.p());
    out += ",\"alpha\":" + format_real(s.alpha);
    out += ",\"loglik\":" + format_real(s.loglik);
    out += ",\"tau\":";
    append_vector(out, s.tau);
    out += ",\"labels\":[";
    for (std::size_t i = 0; i < s.labels.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(s.labels[i] + 1);
    }
    out += "],\"mu\":[";
    for (Eigen::Index g = 0; g < s.mu.rows(); ++g) {
        if (g) out += ',';
        append_vector(out, s.mu.row(g).transpose());
    }
    out += "],\"delta\":";
    append_vector(out, s.delta);
    out += ",\"Z\":[";
    for (Eigen::Index i = 0; i < s.Z.rows(); ++i)
        for (Eigen::Index l = 0; l < s.Z.cols(); ++l) {
            if (i || l) out += ',';
            out += format_real(s.Z(i, l));
        }
    out += "]}";
    return out;
}

sampler::Sample parse_sample(const std::string& line, long ln) {
    const std::string where = "trace line " + std::to_string(ln) + ": ";
    Json j;
    try {
        j = Json::parse(line);
    } catch (const Json::parse_error& e) {
        throw DataError(where + "invalid JSON (" + e.what() + ")");
    }
    if (!j.is_object()) throw DataError(where + "expected an object");
    sampler::Sample s;
    s.iteration = get_long(j, "iteration", ln);
    const long p = get_long(j, "p", ln);
    s.alpha = get_real(j, "alpha", ln);
    s.loglik = get_real(j, "loglik", ln);
    s.tau = get_vector(j, "tau", ln);
    s.delta = get_vector(j, "delta", ln);
    const long G = s.tau.size();
    if (p < 1 || s.delta.size() != p) throw DataError(where + "delta length differs from p");
    if (G < 1) throw DataError(where + "empty tau");

    if (!j.contains("labels") || !j["labels"].is_array()) throw DataError(where + "missing array field 'labels'");
    for (const auto& c : j["labels"]) {
        if (!c.is_number_integer()) throw DataError(where + "non-integer label");
        const long v = c.get<long>();
        if (v < 1 || v > G) throw DataError(where + "label out of range 1.." + std::to_string(G));
        s.labels.push_back(static_cast<int>(v - 1));
    }
    const long n = static_cast<long>(s.labels.size());
    if (n < 1) throw DataError(where + "no labels");

    if (!j.contains("mu") || !j["mu"].is_array() || static_cast<long>(j["mu"].size()) != G)
        throw DataError(where + "mu must hold one row per component");
    s.mu.resize(G, p);
    for (long g = 0; g < G; ++g) {
        const Json& row = j["mu"][g];
        if (!row.is_array() || static_cast<long>(row.size()) != p) throw DataError(where + "mu row length differs from p");
        for (long l = 0; l < p; ++l) {
            if (!row[l].is_number()) throw DataError(where + "non-numeric entry in 'mu'");
            s.mu(g, l) = row[l].get<double>();
        }
    }
    const Vector z = get_vector(j, "Z", ln);
    if (z.size() != n * p) throw DataError(where + "Z length differs from n * p");
    s.Z.resize(n, p);
    for (long i = 0; i < n; ++i)
        for (long l = 0; l < p; ++l) s.Z(i, l) = z[i * p + l];
    return s;
}

std::vector<sampler::Sample> read_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open trace " + path);
    std::vector<sampler::Sample> out;
    std::string line;
    long ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(parse_sample(line, ln));
    }
    return out;
}

TraceWriter::TraceWriter(const std::string& path) : file_(std::fopen(path.c_str(), "wb")), path_(path) {
    if (!file_) throw DataError("cannot write trace " + path);
}

TraceWriter::~TraceWriter() {
    if (file_) std::fclose(file_);
}

void TraceWriter::write(const sampler::Sample& s) {
    const std::string line = format_sample(s) + "\n";
    if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0)
        throw DataError("write failed on " + path_);
}

Json to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json r = Json::array();
        for (Eigen::Index l = 0; l < m.cols(); ++l) r.push_back(m(i, l));
        rows.push_back(std::move(r));
    }
    return rows;
}

Json to_json(const Vector& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Matrix matrix_from_json(const Json& j, const std::string& what) {
    if (!j.is_array()) throw DataError(what + " must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols)
            throw DataError(what + " rows have unequal lengths");
        for (Eigen::Index l = 0; l < cols; ++l) {
            if (!j[i][l].is_number()) throw DataError(what + " has a non-numeric entry");
            m(i, l) = j[i][l].get<double>();
        }
    }
    return m;
}

Vector vector_from_json(const Json& j, const std::string& what) {
    if (!j.is_array()) throw DataError(what + " must be an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw DataError(what + " has a non-numeric entry");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

Json to_json(const model::HyperParams& hp) {
    return Json{{"a1", hp.a1},         {"b1", hp.b1},         {"a2", hp.a2},     {"b2", hp.b2},
                {"t2", hp.t2},         {"xi", hp.xi},         {"nu", hp.nu},     {"mu_alpha", hp.mu_alpha},
                {"var_alpha", hp.var_alpha}, {"p0", hp.p0},   {"G", hp.G},       {"kappa0", hp.kappa0},
                {"kappa1", hp.kappa1}, {"eps1", hp.eps1},     {"eps2", hp.eps2}, {"eps3", hp.eps3},
                {"k", hp.k}};
}

Json to_json(const init::InitReport& r) {
    return Json{{"alpha_hat", r.alpha_hat},
                {"beta_hat", r.beta_hat},
                {"rescale", r.rescale},
                {"mds_eigenvalues", r.mds_eigenvalues},
                {"initial_clusters", r.initial_clusters},
                {"flags", r.flags}};
}

Json truth_to_json(const simulate::PlantedTruth& t) {
    Json labels = Json::array();
    for (int c : t.labels) labels.push_back(c + 1);
    return Json{{"scenario", t.spec.name},
                {"n", t.spec.n},
                {"p", t.spec.dims()},
                {"G", t.spec.clusters()},
                {"alpha", t.spec.alpha},
                {"delta", to_json(t.spec.delta)},
                {"means", to_json(t.spec.means)},
                {"weight_concentration", t.spec.weight_concentration},
                {"literal_means", t.spec.literal_means},
                {"density", t.density},
                {"tau", to_json(t.tau)},
                {"labels", labels},
                {"Z", to_json(t.Z)}};
}

post::Truth read_truth(const std::string& path) {
    const Json j = read_json(path);
    post::Truth t;
    if (!j.contains("Z") || !j.contains("labels")) throw DataError(path + ": truth needs 'Z' and 'labels'");
    t.Z = matrix_from_json(j["Z"], path + ": Z");
    for (const auto& c : j["labels"]) {
        if (!c.is_number_integer() || c.get<int>() < 1) throw DataError(path + ": labels must be positive integers");
        t.labels.push_back(c.get<int>() - 1);
    }
    if (static_cast<Eigen::Index>(t.labels.size()) != t.Z.rows())
        throw DataError(path + ": labels and Z disagree on n");
    return t;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << text;
    if (!out) throw DataError("write failed on " + path);
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw DataError(path + ": invalid JSON (" + e.what() + ")");
    }
}

std::string matrix_csv(const Matrix& m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index l = 0; l < m.cols(); ++l) {
            if (l) out += ',';
            out += format_real(m(i, l));
        }
        out += "\n";
    }
    return out;
}

}  // namespace lspcm::io
