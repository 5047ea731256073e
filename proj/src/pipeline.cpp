#include "pipeline.hpp"

#include "metrics.hpp"
#include "simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <thread>

namespace fs = std::filesystem;

namespace lspcm::pipeline {

namespace {

double parse_real(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw UsageError("'" + key + "' expects a number, got '" + v + "'");
    return out;
}

long parse_integer(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long out = 0;
    try {
        out = std::stol(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw UsageError("'" + key + "' expects an integer, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw UsageError("'" + key + "' expects true or false, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    auto hreal = [](double model::HyperParams::*m) {
        return Setter([m](RunConfig& c, const std::string& k, const std::string& v) { c.hp.*m = parse_real(k, v); });
    };
    auto hint = [](int model::HyperParams::*m) {
        return Setter([m](RunConfig& c, const std::string& k, const std::string& v) {
            c.hp.*m = static_cast<int>(parse_integer(k, v));
        });
    };
    auto clong = [](long sampler::ChainConfig::*m) {
        return Setter([m](RunConfig& c, const std::string& k, const std::string& v) { c.chain.*m = parse_integer(k, v); });
    };
    auto creal = [](double sampler::ChainConfig::*m) {
        return Setter([m](RunConfig& c, const std::string& k, const std::string& v) { c.chain.*m = parse_real(k, v); });
    };
    auto cbool = [](bool sampler::ChainConfig::*m) {
        return Setter([m](RunConfig& c, const std::string& k, const std::string& v) { c.chain.*m = parse_bool(k, v); });
    };
    auto integer = [](int RunConfig::*m) {
        return Setter([m](RunConfig& c, const std::string& k, const std::string& v) {
            c.*m = static_cast<int>(parse_integer(k, v));
        });
    };
    auto boolean = [](bool RunConfig::*m) {
        return Setter([m](RunConfig& c, const std::string& k, const std::string& v) { c.*m = parse_bool(k, v); });
    };
    static const std::map<std::string, Setter> table = {
        {"a1", hreal(&model::HyperParams::a1)},
        {"b1", hreal(&model::HyperParams::b1)},
        {"a2", hreal(&model::HyperParams::a2)},
        {"b2", hreal(&model::HyperParams::b2)},
        {"t2", hreal(&model::HyperParams::t2)},
        {"xi", hreal(&model::HyperParams::xi)},
        {"nu", hreal(&model::HyperParams::nu)},
        {"mu-alpha", hreal(&model::HyperParams::mu_alpha)},
        {"var-alpha", hreal(&model::HyperParams::var_alpha)},
        {"p0", hint(&model::HyperParams::p0)},
        {"G", hint(&model::HyperParams::G)},
        {"kappa0", hreal(&model::HyperParams::kappa0)},
        {"kappa1", hreal(&model::HyperParams::kappa1)},
        {"eps1", hreal(&model::HyperParams::eps1)},
        {"eps2", hreal(&model::HyperParams::eps2)},
        {"eps3", hreal(&model::HyperParams::eps3)},
        {"k", hreal(&model::HyperParams::k)},
        {"iters", clong(&sampler::ChainConfig::iterations)},
        {"burnin", clong(&sampler::ChainConfig::burn_in)},
        {"thin", clong(&sampler::ChainConfig::thin)},
        {"adapt", cbool(&sampler::ChainConfig::adapt)},
        {"alpha-step", creal(&sampler::ChainConfig::alpha_step)},
        {"tune-alpha", cbool(&sampler::ChainConfig::tune_alpha)},
        {"position-scale", creal(&sampler::ChainConfig::position_scale)},
        {"tune-positions", cbool(&sampler::ChainConfig::tune_positions)},
        {"position-target", creal(&sampler::ChainConfig::position_target)},
        {"seed",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             const long s = parse_integer(k, v);
             if (s < 0) throw UsageError("seed must be nonnegative");
             c.seed = static_cast<std::uint64_t>(s);
         }},
        {"chains", integer(&RunConfig::chains)},
        {"jobs", integer(&RunConfig::jobs)},
        {"scenario", integer(&RunConfig::scenario)},
        {"literal-means", boolean(&RunConfig::literal_means)},
        {"replicates", integer(&RunConfig::replicates)},
        {"directed", boolean(&RunConfig::directed)},
    };
    return table;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw DataError("cannot create output directory " + dir);
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string format_nu(const std::optional<double>& nu) {
    if (!nu) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", *nu);
    return buf;
}

}  // namespace

RunConfig::RunConfig() {
    chain.iterations = 10000;
    chain.burn_in = 2000;
    chain.thin = 10;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) throw UsageError("unknown setting '" + key + "'");
    it->second(*this, key, trim(value));
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file " + path);
    std::string line;
    long ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(ln) + ": expected key = value");
        try {
            set(trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const UsageError& e) {
            throw UsageError(path + ":" + std::to_string(ln) + ": " + e.what());
        }
    }
}

void RunConfig::validate() const {
    hp.validate();
    chain.validate();
    if (chains < 1) throw UsageError("chains must be at least 1");
    if (jobs < 0) throw UsageError("jobs must be nonnegative");
    if (scenario != 1 && scenario != 2) throw UsageError("scenario must be 1 or 2");
    if (replicates < 1) throw UsageError("replicates must be at least 1");
}

io::Json RunConfig::to_json() const {
    return io::Json{{"hyperparameters", io::to_json(hp)},
                    {"iterations", chain.iterations},
                    {"burn_in", chain.burn_in},
                    {"thin", chain.thin},
                    {"adapt", chain.adapt},
                    {"alpha_step", chain.alpha_step},
                    {"tune_alpha", chain.tune_alpha},
                    {"position_scale", chain.position_scale},
                    {"tune_positions", chain.tune_positions},
                    {"position_target", chain.position_target},
                    {"seed", seed},
                    {"chains", chains},
                    {"jobs", jobs},
                    {"scenario", scenario},
                    {"literal_means", literal_means},
                    {"replicates", replicates},
                    {"directed", directed}};
}

const std::vector<std::string>& RunConfig::keys() {
    static const std::vector<std::string> k = [] {
        std::vector<std::string> out;
        for (const auto& [name, setter] : setters()) out.push_back(name);
        return out;
    }();
    return k;
}

// Streams for simulation sit far above any chain index so the two never
// share a random sequence under one master seed.
constexpr std::uint64_t kSimulationStreamBase = std::uint64_t{1} << 40;

std::vector<std::string> simulate(const RunConfig& cfg, const std::string& outdir) {
    cfg.validate();
    ensure_dir(outdir);
    const simulate::ScenarioSpec spec =
        cfg.scenario == 1 ? simulate::scenario1(cfg.literal_means) : simulate::scenario2();
    std::vector<std::string> paths;
    for (int r = 1; r <= cfg.replicates; ++r) {
        const std::uint64_t stream = kSimulationStreamBase + static_cast<std::uint64_t>(r);
        dist::Rng rng(cfg.seed, stream);
        auto [y, truth] = simulate::generate(spec, rng);
        const std::string net = join(outdir, "net_" + std::to_string(r) + ".csv");
        netdata::save_dense_csv(net, y);
        io::Json j = io::truth_to_json(truth);
        j["seed"] = cfg.seed;
        j["stream"] = stream;
        io::write_json(join(outdir, "truth_" + std::to_string(r) + ".json"), j);
        paths.push_back(net);
    }
    return paths;
}

std::string manifest_path(const std::string& trace) {
    fs::path p(trace);
    if (p.extension() == ".jsonl") p.replace_extension("");
    return p.string() + ".manifest.json";
}

std::vector<std::string> fit(const std::string& network, const RunConfig& cfg, const std::string& outdir) {
    cfg.validate();
    const netdata::AdjacencyMatrix y = netdata::load_network(network, netdata::Format::Auto, cfg.directed);
    ensure_dir(outdir);
    const int jobs = std::clamp(cfg.jobs == 0 ? cfg.chains : cfg.jobs, 1, cfg.chains);

    std::vector<std::string> traces(cfg.chains);
    std::vector<std::exception_ptr> errors(cfg.chains);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int c = next++; c < cfg.chains; c = next++) {
            try {
                sampler::ChainConfig cc = cfg.chain;
                cc.seed = cfg.seed;
                cc.stream = static_cast<std::uint64_t>(c + 1);
                const std::string name = "chain_" + std::to_string(c + 1);
                traces[c] = join(outdir, name + ".jsonl");
                io::TraceWriter writer(traces[c]);
                const sampler::PosteriorTrace t =
                    sampler::run_chain(y, cfg.hp, cc, std::nullopt,
                                       [&writer](const sampler::Sample& s) { writer.write(s); }, false);
                io::Json events = io::Json::array();
                for (const auto& e : t.adaptations)
                    events.push_back({{"iteration", e.iteration},
                                      {"action", adapt::to_string(e.action)},
                                      {"trigger", e.trigger},
                                      {"old_p", e.old_p},
                                      {"new_p", e.new_p}});
                io::Json m{{"network", network},
                           {"n", y.size()},
                           {"chain", c + 1},
                           {"master_seed", cfg.seed},
                           {"stream", cc.stream},
                           {"config", cfg.to_json()},
                           {"nu", cfg.hp.nu},
                           {"init", io::to_json(t.init)},
                           {"z_acceptance", t.z_acceptance()},
                           {"alpha_acceptance", t.alpha_acceptance()},
                           {"z_rejected_nonfinite", t.z_rejected_nonfinite},
                           {"alpha_step", t.alpha_step},
                           {"position_scale", t.position_scale},
                           {"adaptations", events},
                           {"reference_loglik", t.reference_loglik},
                           {"reference_Z", io::to_json(t.reference_Z)}};
                io::write_json(manifest_path(traces[c]), m);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return traces;
}

io::Json summary_to_json(const post::PosteriorSummary& s, const std::optional<double>& nu) {
    auto hist = [](const std::map<int, long>& h) {
        io::Json j = io::Json::object();
        for (auto [v, c] : h) j[std::to_string(v)] = c;
        return j;
    };
    io::Json partition = io::Json::array();
    for (int c : s.pear.partition) partition.push_back(c + 1);
    io::Json chains = io::Json::array();
    for (const auto& c : s.chains)
        chains.push_back({{"samples", c.samples},
                          {"z_acceptance", c.z_acceptance},
                          {"alpha_acceptance", c.alpha_acceptance},
                          {"reference_loglik", c.reference_loglik}});
    io::Json j{{"nu", nu ? io::Json(*nu) : io::Json(nullptr)},
               {"samples", s.samples},
               {"n", s.n},
               {"p_m", s.p.mode},
               {"p_interval", {s.p.lower, s.p.upper}},
               {"G_m", s.g_plus.mode},
               {"G_interval", {s.g_plus.lower, s.g_plus.upper}},
               {"p_histogram", hist(s.p_histogram)},
               {"G_histogram", hist(s.g_histogram)},
               {"pear",
                {{"clusters", s.pear.clusters},
                 {"value", s.pear.value},
                 {"candidates", s.pear.candidates},
                 {"partition", partition}}},
               {"alpha", {{"mean", s.alpha_mean}, {"interval", {s.alpha_interval.lower, s.alpha_interval.upper}}}},
               {"component_means", io::to_json(s.component_means)},
               {"greedy_relabelings", s.greedy_relabelings},
               {"chains", chains}};
    if (s.ari) {
        const auto ai = post::quantile_interval(s.ari_samples);
        const auto pi = post::quantile_interval(s.pc_samples);
        j["ari"] = *s.ari;
        j["ari_interval"] = {ai.lower, ai.upper};
        j["pc"] = *s.pc;
        j["pc_interval"] = {pi.lower, pi.upper};
        j["ari_samples"] = s.ari_samples;
        j["pc_samples"] = s.pc_samples;
    }
    return j;
}

post::PosteriorSummary postprocess(const std::vector<std::string>& traces, const std::optional<std::string>& truth,
                                   const std::string& outdir) {
    if (traces.empty()) throw UsageError("postprocess needs at least one trace");
    std::vector<post::ChainInput> chains;
    std::optional<double> nu;
    bool nu_known = true;
    for (const auto& path : traces) {
        post::ChainInput in;
        try {
            in.samples = io::read_trace(path);
        } catch (const DataError& e) {
            throw DataError(path + ": " + e.what());
        }
        if (in.samples.empty()) throw DataError(path + ": trace holds no samples");
        const std::string mpath = manifest_path(path);
        if (fs::exists(mpath)) {
            const io::Json m = io::read_json(mpath);
            in.reference_Z = io::matrix_from_json(m.at("reference_Z"), mpath + ": reference_Z");
            in.reference_loglik = m.at("reference_loglik").get<double>();
            in.z_acceptance = m.at("z_acceptance").get<double>();
            in.alpha_acceptance = m.at("alpha_acceptance").get<double>();
            const double chain_nu = m.at("nu").get<double>();
            if (nu && *nu != chain_nu) throw DataError("traces were fitted with different nu values");
            nu = chain_nu;
        } else {
            nu_known = false;
            in.reference_Z = in.samples.front().Z;
            in.reference_loglik = in.samples.front().loglik;
        }
        chains.push_back(std::move(in));
    }
    if (!nu_known) nu.reset();

    std::optional<post::Truth> t;
    if (truth) t = io::read_truth(*truth);
    const post::PosteriorSummary s = post::summarize(chains, t);

    ensure_dir(outdir);
    io::write_json(join(outdir, "summary.json"), summary_to_json(s, nu));
    io::write_text(join(outdir, "psm.csv"), io::matrix_csv(s.psm));
    io::write_text(join(outdir, "positions.csv"),
                   io::matrix_csv(s.mean_positions.leftCols(std::min<Eigen::Index>(s.p.mode, s.mean_positions.cols()))));
    auto hist_csv = [](const char* name, const std::map<int, long>& h) {
        std::string out = std::string(name) + ",count\n";
        for (auto [v, c] : h) out += std::to_string(v) + "," + std::to_string(c) + "\n";
        return out;
    };
    io::write_text(join(outdir, "hist_p.csv"), hist_csv("p", s.p_histogram));
    io::write_text(join(outdir, "hist_g.csv"), hist_csv("G_plus", s.g_histogram));
    return s;
}

Report report(const std::vector<std::string>& summaries) {
    if (summaries.empty()) throw UsageError("report needs at least one summary");
    struct Pool {
        std::optional<double> nu;
        std::vector<int> p, g;
        std::vector<double> ari, pc, ari_samples, pc_samples;
        int replicates = 0;
    };
    // descending nu as in the published tables; unknown nu last
    auto order = [](const std::optional<double>& a, const std::optional<double>& b) {
        if (a && b) return *a > *b;
        return a.has_value() && !b.has_value();
    };
    std::vector<Pool> pools;
    for (const auto& path : summaries) {
        const io::Json j = io::read_json(path);
        std::optional<double> nu;
        if (j.contains("nu") && j["nu"].is_number()) nu = j["nu"].get<double>();
        auto it = std::find_if(pools.begin(), pools.end(), [&](const Pool& p) { return p.nu == nu; });
        if (it == pools.end()) {
            pools.push_back({});
            it = std::prev(pools.end());
            it->nu = nu;
        }
        try {
            for (const auto& [v, c] : j.at("p_histogram").items()) it->p.insert(it->p.end(), c.get<long>(), std::stoi(v));
            for (const auto& [v, c] : j.at("G_histogram").items()) it->g.insert(it->g.end(), c.get<long>(), std::stoi(v));
            if (j.contains("ari")) {
                it->ari.push_back(j["ari"].get<double>());
                it->pc.push_back(j["pc"].get<double>());
                for (const auto& v : j["ari_samples"]) it->ari_samples.push_back(v.get<double>());
                for (const auto& v : j["pc_samples"]) it->pc_samples.push_back(v.get<double>());
            }
        } catch (const io::Json::exception& e) {
            throw DataError(path + ": malformed summary (" + e.what() + ")");
        }
        ++it->replicates;
    }
    std::stable_sort(pools.begin(), pools.end(), [&](const Pool& a, const Pool& b) { return order(a.nu, b.nu); });

    const std::vector<std::string> header = {"nu", "p_m", "G_m", "ARI", "PC"};
    std::vector<std::vector<std::string>> rows;
    std::string csv = "nu,p_m,p_lower,p_upper,G_m,G_lower,G_upper,ARI,ARI_lower,ARI_upper,PC,PC_lower,PC_upper,replicates\n";
    for (const auto& pool : pools) {
        const auto pm = post::posterior_mode_and_ci(pool.p);
        const auto gm = post::posterior_mode_and_ci(pool.g);
        std::vector<std::string> cells = {format_nu(pool.nu),
                                          std::to_string(pm.mode),
                                          std::to_string(pm.lower),
                                          std::to_string(pm.upper),
                                          std::to_string(gm.mode),
                                          std::to_string(gm.lower),
                                          std::to_string(gm.upper)};
        auto add_metric = [&](const std::vector<double>& point, const std::vector<double>& samples) {
            if (point.empty()) {
                cells.insert(cells.end(), {"NA", "NA", "NA"});
                return;
            }
            double mean = 0.0;
            for (double v : point) mean += v;
            mean /= point.size();
            const auto ci = post::quantile_interval(samples);
            cells.insert(cells.end(), {fixed2(mean), fixed2(ci.lower), fixed2(ci.upper)});
        };
        add_metric(pool.ari, pool.ari_samples);
        add_metric(pool.pc, pool.pc_samples);
        cells.push_back(std::to_string(pool.replicates));

        for (std::size_t i = 0; i < cells.size(); ++i) csv += (i ? "," : "") + cells[i];
        csv += "\n";
        auto triple = [&](std::size_t at) {
            if (cells[at] == "NA") return std::string("NA");
            return cells[at] + " (" + cells[at + 1] + ", " + cells[at + 2] + ")";
        };
        rows.push_back({cells[0], triple(1), triple(4), triple(7), triple(10)});
    }

    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
    }
    auto line = [&](const std::vector<std::string>& r) {
        std::string out;
        for (std::size_t c = 0; c < r.size(); ++c) {
            out += r[c];
            if (c + 1 < r.size()) out += std::string(width[c] - r[c].size() + 2, ' ');
        }
        return out + "\n";
    };
    Report rep;
    rep.text = line(header);
    for (const auto& r : rows) rep.text += line(r);
    rep.csv = csv;
    return rep;
}

}  // namespace lspcm::pipeline
