#ifndef LSPCM_PIPELINE_HPP
#define LSPCM_PIPELINE_HPP

#include "model.hpp"
#include "postprocess.hpp"
#include "sampler.hpp"
#include "trace_io.hpp"

#include <optional>
#include <string>

namespace lspcm::pipeline {

/// Every setting of the batch commands. Keys accepted by `set` are the CLI
/// flag names without the leading dashes.
struct RunConfig {
    model::HyperParams hp;
    sampler::ChainConfig chain;
    std::uint64_t seed = 1;
    int chains = 2;
    int jobs = 0;  // 0 means one thread per chain
    int scenario = 1;
    bool literal_means = false;
    int replicates = 1;
    bool directed = true;

    RunConfig();

    /// Throws UsageError for an unknown key or an unparsable value.
    void set(const std::string& key, const std::string& value);

    /// Flat file of `key = value` lines; `#` starts a comment.
    void load_file(const std::string& path);

    /// Throws UsageError on any out-of-range setting.
    void validate() const;

    io::Json to_json() const;

    static const std::vector<std::string>& keys();
};

/// Writes net_<r>.csv and truth_<r>.json for r = 1..replicates and returns
/// the network paths.
std::vector<std::string> simulate(const RunConfig& cfg, const std::string& outdir);

/// Runs cfg.chains chains on the network, at most cfg.jobs at a time. Chain
/// k (1-based) uses the master seed with stream k and writes chain_<k>.jsonl
/// and chain_<k>.manifest.json. Returns the trace paths.
std::vector<std::string> fit(const std::string& network, const RunConfig& cfg, const std::string& outdir);

/// Manifest path that belongs to a trace path.
std::string manifest_path(const std::string& trace);

/// Reads traces (and their manifests when present), summarizes and writes
/// summary.json, psm.csv, positions.csv, hist_p.csv and hist_g.csv.
post::PosteriorSummary postprocess(const std::vector<std::string>& traces, const std::optional<std::string>& truth,
                                   const std::string& outdir);

io::Json summary_to_json(const post::PosteriorSummary& s, const std::optional<double>& nu);

struct Report {
    std::string text;
    std::string csv;
};

/// Table with one row per nu over the given summary files. Replicates with
/// the same nu are pooled.
Report report(const std::vector<std::string>& summaries);

}  // namespace lspcm::pipeline

#endif
