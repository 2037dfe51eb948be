#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pathdep/parallel.hpp"
#include "pathdep/suites.hpp"

namespace {

int log_level() {
    const char* env = std::getenv("PATHDEP_LOG");
    if (!env) return 1;
    const std::string v(env);
    if (v == "off" || v == "0") return 0;
    if (v == "debug" || v == "2") return 2;
    return 1;
}

void info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "pathdep: " << msg << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation and statistical verification of path-dependent SDEs with jumps"};
    app.require_subcommand(1);

    std::string config_path, out_dir, suite, run_dir;
    std::uint64_t seed_override = 0;
    bool have_seed = false;
    int workers = pathdep::default_workers();
    bool dump_events = false;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* c = cmd->add_option("--config", config_path, "experiment config (JSON)");
        if (needs_config) c->required();
        cmd->add_option("--out", out_dir, "output directory override");
        cmd->add_option("--seed", seed_override, "root seed override")
            ->each([&](const std::string&) { have_seed = true; });
        cmd->add_option("--workers", workers, "worker thread count");
    };

    auto* sim = app.add_subcommand("simulate", "sample an ensemble and export path CSVs");
    add_common(sim, true);

    auto* ver = app.add_subcommand("verify", "run a statistical verification suite");
    add_common(ver, true);
    ver->add_option("--suite", suite, "canonical|mp|generator|maf|tightness|continuity")
        ->required();
    ver->add_flag("--dump-events", dump_events, "write the event bank for audit");

    auto* rep = app.add_subcommand("report", "aggregate suite reports in a run directory");
    rep->add_option("run_dir", run_dir, "directory holding *_report.json files")->required();
    rep->add_option("--out", out_dir, "where to write summary.txt and plot CSVs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (rep->parsed()) return pathdep::cmd_report(run_dir, out_dir);

        pathdep::ExperimentConfig cfg = pathdep::load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (have_seed) cfg.seed = seed_override;
        if (workers < 1) workers = 1;

        if (sim->parsed()) {
            info("simulate: n_paths=" + std::to_string(cfg.n_paths) +
                 " seed=" + std::to_string(cfg.seed));
            return pathdep::cmd_simulate(cfg, workers);
        }
        info("verify: suite=" + suite + " seed=" + std::to_string(cfg.seed) +
             " workers=" + std::to_string(workers));
        return pathdep::cmd_verify(cfg, suite, workers, dump_events);
    } catch (const pathdep::ConfigError& e) {
        std::cerr << "pathdep: config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "pathdep: error: " << e.what() << "\n";
        return 2;
    }
}
