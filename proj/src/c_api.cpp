#include "lspcm/lspcm.h"

#include "metrics.hpp"
#include "netdata.hpp"
#include "pipeline.hpp"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

struct lspcm_network {
    lspcm::netdata::AdjacencyMatrix y;
};

struct lspcm_config {
    lspcm::pipeline::RunConfig cfg;
};

namespace {

thread_local std::string last_error;

template <class F>
lspcm_status guarded(F&& f) {
    try {
        f();
        last_error.clear();
        return LSPCM_OK;
    } catch (const lspcm::UsageError& e) {
        last_error = e.what();
        return LSPCM_ERR_USAGE;
    } catch (const lspcm::DataError& e) {
        last_error = e.what();
        return LSPCM_ERR_DATA;
    } catch (const lspcm::RuntimeError& e) {
        last_error = e.what();
        return LSPCM_ERR_RUNTIME;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return LSPCM_ERR_RUNTIME;
    } catch (const std::exception& e) {
        last_error = e.what();
        return LSPCM_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return LSPCM_ERR_INTERNAL;
    }
}

void require(bool ok, const char* message) {
    if (!ok) throw lspcm::UsageError(message);
}

char* duplicate(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::vector<std::string> strings(const char* const* items, size_t count) {
    require(items != nullptr || count == 0, "null path list");
    std::vector<std::string> out;
    for (size_t i = 0; i < count; ++i) {
        require(items[i] != nullptr, "null path in list");
        out.emplace_back(items[i]);
    }
    return out;
}

}  // namespace

extern "C" {

const char* lspcm_last_error(void) { return last_error.c_str(); }

const char* lspcm_version(void) { return "0.1.0"; }

lspcm_status lspcm_network_load(const char* path, int format, int directed, lspcm_network** out) {
    return guarded([&] {
        require(path && out, "null argument");
        require(format >= 0 && format <= 2, "format must be 0, 1 or 2");
        *out = nullptr;
        auto net = std::make_unique<lspcm_network>();
        net->y = lspcm::netdata::load_network(path, static_cast<lspcm::netdata::Format>(format), directed != 0);
        *out = net.release();
    });
}

lspcm_status lspcm_network_from_dense(const uint8_t* values, int n, int directed, lspcm_network** out) {
    return guarded([&] {
        require(values && out && n > 0, "null argument or nonpositive size");
        *out = nullptr;
        std::vector<std::uint8_t> entries(values, values + static_cast<size_t>(n) * n);
        auto net = std::make_unique<lspcm_network>();
        net->y = lspcm::netdata::AdjacencyMatrix(n, std::move(entries), directed != 0);
        *out = net.release();
    });
}

void lspcm_network_free(lspcm_network* net) { delete net; }

int lspcm_network_size(const lspcm_network* net) { return net ? net->y.size() : -1; }

lspcm_status lspcm_network_density(const lspcm_network* net, double* out) {
    return guarded([&] {
        require(net && out, "null argument");
        *out = lspcm::netdata::density(net->y);
    });
}

lspcm_status lspcm_network_save(const lspcm_network* net, const char* path) {
    return guarded([&] {
        require(net && path, "null argument");
        lspcm::netdata::save_dense_csv(path, net->y);
    });
}

lspcm_status lspcm_config_create(lspcm_config** out) {
    return guarded([&] {
        require(out != nullptr, "null argument");
        *out = new lspcm_config();
    });
}

void lspcm_config_free(lspcm_config* cfg) { delete cfg; }

lspcm_status lspcm_config_set(lspcm_config* cfg, const char* key, const char* value) {
    return guarded([&] {
        require(cfg && key && value, "null argument");
        cfg->cfg.set(key, value);
    });
}

lspcm_status lspcm_config_load_file(lspcm_config* cfg, const char* path) {
    return guarded([&] {
        require(cfg && path, "null argument");
        cfg->cfg.load_file(path);
    });
}

lspcm_status lspcm_config_validate(const lspcm_config* cfg) {
    return guarded([&] {
        require(cfg != nullptr, "null argument");
        cfg->cfg.validate();
    });
}

size_t lspcm_config_key_count(void) { return lspcm::pipeline::RunConfig::keys().size(); }

const char* lspcm_config_key(size_t index) {
    const auto& keys = lspcm::pipeline::RunConfig::keys();
    return index < keys.size() ? keys[index].c_str() : nullptr;
}

lspcm_status lspcm_simulate(const lspcm_config* cfg, const char* outdir) {
    return guarded([&] {
        require(cfg && outdir, "null argument");
        lspcm::pipeline::simulate(cfg->cfg, outdir);
    });
}

lspcm_status lspcm_fit(const lspcm_config* cfg, const char* network_path, const char* outdir) {
    return guarded([&] {
        require(cfg && network_path && outdir, "null argument");
        lspcm::pipeline::fit(network_path, cfg->cfg, outdir);
    });
}

lspcm_status lspcm_postprocess(const char* const* traces, size_t count, const char* truth_path, const char* outdir) {
    return guarded([&] {
        require(outdir != nullptr, "null argument");
        std::optional<std::string> truth;
        if (truth_path) truth = truth_path;
        lspcm::pipeline::postprocess(strings(traces, count), truth, outdir);
    });
}

lspcm_status lspcm_report(const char* const* summaries, size_t count, char** text, char** csv) {
    return guarded([&] {
        const auto rep = lspcm::pipeline::report(strings(summaries, count));
        char* t = text ? duplicate(rep.text) : nullptr;
        char* c = nullptr;
        try {
            c = csv ? duplicate(rep.csv) : nullptr;
        } catch (...) {
            std::free(t);
            throw;
        }
        if (text) *text = t;
        if (csv) *csv = c;
    });
}

void lspcm_string_free(char* s) { std::free(s); }

lspcm_status lspcm_adjusted_rand_index(const int* a, const int* b, size_t n, double* out) {
    return guarded([&] {
        require(a && b && out, "null argument");
        *out = lspcm::metrics::ari(std::span<const int>(a, n), std::span<const int>(b, n));
    });
}

lspcm_status lspcm_procrustes_correlation(const double* x, const double* y, size_t n, size_t p, double* out) {
    return guarded([&] {
        require(x && y && out && n > 0 && p > 0, "null argument or empty configuration");
        using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const lspcm::Matrix a = Eigen::Map<const RowMajor>(x, n, p);
        const lspcm::Matrix b = Eigen::Map<const RowMajor>(y, n, p);
        *out = lspcm::metrics::procrustes_correlation(a, b);
    });
}

}  // extern "C"
