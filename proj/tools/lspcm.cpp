// Command-line front end over the lspcm C API.
#include <lspcm/lspcm.h>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

int exit_code(lspcm_status s) {
    switch (s) {
        case LSPCM_OK: return 0;
        case LSPCM_ERR_USAGE: return 2;
        default: return 1;
    }
}

int fail(lspcm_status s) {
    std::cerr << "lspcm: " << lspcm_last_error() << "\n";
    return exit_code(s);
}

struct Settings {
    std::string config_file;
    std::map<std::string, std::string> values;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_file, "flat key = value settings file; flags override it");
        for (size_t i = 0; i < lspcm_config_key_count(); ++i) {
            const std::string key = lspcm_config_key(i);
            // single-letter keys get a short flag as well, CLI11 needs it
            const std::string name = key.size() == 1 ? "-" + key + ",--" + key : "--" + key;
            cmd->add_option(name, values[key], "setting '" + key + "'");
        }
    }

    lspcm_status build(lspcm_config** out, CLI::App* cmd) const {
        lspcm_status s = lspcm_config_create(out);
        if (s != LSPCM_OK) return s;
        if (!config_file.empty() && (s = lspcm_config_load_file(*out, config_file.c_str())) != LSPCM_OK) return s;
        for (const auto& [key, value] : values)
            if (cmd->count("--" + key) > 0 && (s = lspcm_config_set(*out, key.c_str(), value.c_str())) != LSPCM_OK)
                return s;
        return lspcm_config_validate(*out);
    }
};

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
    std::vector<const char*> out;
    for (const auto& s : v) out.push_back(s.c_str());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Latent shrinkage position cluster model: simulate, fit, postprocess, report"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(lspcm_version()));

    std::string out_dir = ".";

    auto* sim = app.add_subcommand("simulate", "generate benchmark networks with planted truth");
    Settings sim_settings;
    sim_settings.attach(sim);
    sim->add_option("--out", out_dir, "output directory");

    auto* fit = app.add_subcommand("fit", "run MCMC chains on a network");
    Settings fit_settings;
    fit_settings.attach(fit);
    std::string network;
    fit->add_option("network", network, "network file (dense CSV or edge list)")->required();
    fit->add_option("--out", out_dir, "output directory");

    auto* post = app.add_subcommand("postprocess", "summarize chain traces");
    std::vector<std::string> traces;
    std::string truth;
    post->add_option("traces", traces, "chain trace files")->required();
    post->add_option("--truth", truth, "truth JSON written by simulate");
    post->add_option("--out", out_dir, "output directory");

    auto* rep = app.add_subcommand("report", "sensitivity table over summaries");
    std::vector<std::string> summaries;
    std::string csv_path;
    rep->add_option("summaries", summaries, "summary.json files")->required();
    rep->add_option("--csv", csv_path, "also write the CSV table here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    lspcm_config* cfg = nullptr;
    lspcm_status s = LSPCM_OK;
    if (sim->parsed()) {
        if ((s = sim_settings.build(&cfg, sim)) == LSPCM_OK) s = lspcm_simulate(cfg, out_dir.c_str());
    } else if (fit->parsed()) {
        if ((s = fit_settings.build(&cfg, fit)) == LSPCM_OK) s = lspcm_fit(cfg, network.c_str(), out_dir.c_str());
    } else if (post->parsed()) {
        const auto paths = c_strings(traces);
        s = lspcm_postprocess(paths.data(), paths.size(), truth.empty() ? nullptr : truth.c_str(), out_dir.c_str());
    } else if (rep->parsed()) {
        const auto paths = c_strings(summaries);
        char* text = nullptr;
        char* csv = nullptr;
        s = lspcm_report(paths.data(), paths.size(), &text, &csv);
        if (s == LSPCM_OK) {
            std::cout << text << "\n" << csv;
            if (!csv_path.empty()) {
                std::ofstream f(csv_path, std::ios::binary);
                f << csv;
                if (!f) {
                    std::cerr << "lspcm: cannot write " << csv_path << "\n";
                    s = LSPCM_ERR_DATA;
                }
            }
            lspcm_string_free(text);
            lspcm_string_free(csv);
            lspcm_config_free(cfg);
            return exit_code(s);
        }
    }
    lspcm_config_free(cfg);
    return s == LSPCM_OK ? 0 : fail(s);
}
