#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "app/acceptance.hpp"
#include "app/config.hpp"
#include "app/output.hpp"
#include "app/runners.hpp"
#include "polylab/core.hpp"
#include "polylab/error.hpp"

using namespace polylab;
using namespace polylab::app;

namespace {

std::string flag_name(std::string s) {
    for (auto& ch : s)
        if (ch == '_') ch = '-';
    return s;
}

int env_threads() {
    if (const char* e = std::getenv("POLYLAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(e, &end, 10);
        if (end && *end == '\0' && v >= 1) return int(v);
        throw ConfigError("config", "POLYLAB_THREADS must be a positive integer");
    }
    return default_threads();
}

// python companion that plots every numeric column of a CSV against the first
std::string plot_script(const std::string& csv) {
    return "import sys\nimport pandas as pd\nimport matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n"
           "df = pd.read_csv('" + csv + "')\n"
           "x = df.columns[0]\n"
           "for col in df.columns[1:]:\n"
           "    fig, ax = plt.subplots()\n"
           "    ax.plot(df[x], df[col], marker='.')\n"
           "    ax.set_xlabel(x)\n"
           "    ax.set_ylabel(col)\n"
           "    fig.savefig('" + csv.substr(0, csv.size() - 4) + "_' + col + '.png', dpi=120)\n"
           "    plt.close(fig)\n";
}

struct ModelFlags {
    std::string model;
    CLI::App* sub = nullptr;
    std::map<std::string, std::string> params, grids;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polylab: polymer models with disorder, collapse and pinning"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run one model and write CSV/JSON outputs with a manifest");
    run->require_subcommand(1);
    std::string config_path, out_dir, format;
    std::uint64_t seed = 42;
    int threads = 0;
    bool plots = false;
    auto* o_seed = run->add_option("--seed", seed, "64-bit master seed (default 42)");
    auto* o_threads = run->add_option("--threads", threads, "worker threads (default: POLYLAB_THREADS or all cores)");
    auto* o_out = run->add_option("--out", out_dir, "output directory (default out)");
    auto* o_format = run->add_option("--format", format, "csv or json tables");
    run->add_option("--config", config_path, "JSON config file; flags override it");
    run->add_flag("--plot-scripts", plots, "also write python plotting scripts next to each CSV");
    run->fallthrough();

    std::vector<ModelFlags> models;
    models.reserve(schemas().size());
    for (const auto& s : schemas()) {
        models.push_back({s.name, nullptr, {}, {}});
        auto& mf = models.back();
        mf.sub = run->add_subcommand(s.name, s.help);
        for (const auto& p : s.params) {
            static const char* types[] = {"FLOAT", "INT", "TEXT", "BOOL"};
            mf.sub->add_option("--" + flag_name(p.name), mf.params[p.name], p.help)
                ->type_name(types[int(p.kind)])
                ->default_str(p.def.is_string() ? p.def.get<std::string>() : p.def.dump());
        }
        for (const auto& g : s.grids)
            mf.sub->add_option("--" + flag_name(g.name) + "-grid", mf.grids[g.name], g.help)
                ->type_name("START:STOP:COUNT")
                ->default_str(format_double(g.def.start) + ":" + format_double(g.def.stop) + ":" + std::to_string(g.def.count));
    }

    auto* verify = app.add_subcommand("verify", "run an acceptance suite and print PASS/FAIL per criterion");
    std::string suite;
    int vthreads = 0;
    verify->add_option("suite", suite, "fast or full")->required();
    verify->add_option("--threads", vthreads, "worker threads");

    auto* check = app.add_subcommand("check-manifest", "recompute the checksums listed in a manifest");
    std::string manifest_path;
    check->add_option("manifest", manifest_path, "path to manifest.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*verify) {
            std::vector<int> ids;
            if (suite == "fast") {
                ids = fast_suite();
            } else if (suite == "full") {
                for (int i = 1; i <= kCriteria; ++i) ids.push_back(i);
            } else {
                std::cerr << "error: unknown suite '" << suite << "' (fast or full)\n";
                return 2;
            }
            const int t = vthreads > 0 ? vthreads : env_threads();
            bool all = true;
            for (int id : ids) {
                const auto r = run_criterion(id, t);
                std::cout << format_line(r) << std::endl;
                all = all && r.pass;
            }
            return all ? 0 : 1;
        }

        if (*check) {
            const auto bad = verify_manifest(manifest_path);
            for (const auto& b : bad) std::cerr << "checksum mismatch: " << b << "\n";
            if (bad.empty()) std::cout << "all checksums match\n";
            return bad.empty() ? 0 : 1;
        }

        const ModelFlags* chosen = nullptr;
        for (const auto& m : models)
            if (*m.sub) chosen = &m;
        RunConfig cfg = default_config(chosen->model);
        bool threads_from_file = false;
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw ConfigError("config", "cannot open " + config_path);
            const auto j = nlohmann::json::parse(f, nullptr, false);
            if (j.is_discarded()) throw ConfigError("config", config_path + " is not valid JSON");
            cfg = config_from_json(j);
            if (cfg.subcommand != chosen->model)
                throw ConfigError("config", "config is for '" + cfg.subcommand + "', command line asks for '" + chosen->model + "'");
            threads_from_file = j.contains("threads");
        }
        for (const auto& [k, v] : chosen->params)
            if (chosen->sub->count("--" + flag_name(k))) apply_param(cfg, k, v);
        for (const auto& [k, v] : chosen->grids)
            if (chosen->sub->count("--" + flag_name(k) + "-grid")) apply_grid(cfg, k, v);
        if (o_seed->count()) cfg.seed = seed;
        if (o_out->count()) cfg.out_dir = out_dir;
        if (o_format->count()) cfg.format = format;
        if (o_threads->count())
            cfg.threads = threads;
        else if (!threads_from_file)
            cfg.threads = env_threads();
        validate(cfg);

        const auto t0 = std::chrono::steady_clock::now();
        auto out = run_model(cfg);
        if (plots)
            for (std::size_t i = 0, n = out.files.size(); i < n; ++i) {
                const std::string name = out.files[i].name;
                if (name.size() > 4 && name.substr(name.size() - 4) == ".csv")
                    out.files.push_back({name.substr(0, name.size() - 4) + "_plot.py", plot_script(name)});
            }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        // a previous manifest for the same config must reproduce byte for byte
        const auto prev_path = std::filesystem::path(cfg.out_dir) / "manifest.json";
        std::map<std::string, std::string> prev;
        if (std::filesystem::exists(prev_path)) {
            std::ifstream f(prev_path);
            const auto j = nlohmann::json::parse(f, nullptr, false);
            if (!j.is_discarded() && j.contains("config") && j["config"] == nlohmann::json::parse(dump_json(cfg.to_json())))
                for (const auto& o : j["outputs"]) prev[o["file"].get<std::string>()] = o["sha256"].get<std::string>();
        }
        const auto manifest = write_outputs(cfg, out, wall);
        int changed = 0;
        for (const auto& o : manifest["outputs"]) {
            const auto it = prev.find(o["file"].get<std::string>());
            if (it != prev.end() && it->second != o["sha256"].get<std::string>()) {
                std::cerr << "warning: " << it->first << " differs from the previous run with the same config\n";
                ++changed;
            }
        }
        for (const auto& f : out.files) std::cout << (std::filesystem::path(cfg.out_dir) / f.name).string() << "\n";
        if (!prev.empty() && changed == 0) std::cout << "reproduced previous run checksums\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
