// Command-line entry point: runs the whole pipeline or a single stage into a
// run directory. Stage chaining happens through the CSVs in that directory.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "riskpipe/pipeline.hpp"

namespace fs = std::filesystem;
using namespace riskpipe;

int main(int argc, char** argv) {
    CLI::App app{"liquidity/volatility spillover pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_root = "output";
    std::string run_dir;
    long long seed_override = -1;

    app.add_option("--config", config_path, "path to config JSON")->required();
    app.add_option("--out", out_root, "output root for new run directories");
    app.add_option("--dir", run_dir, "existing run directory (stage subcommands)");
    app.add_option("--seed", seed_override, "override config seed");

    const std::vector<std::string> stage_names = {"ingest", "features", "factors",
                                                  "layers", "var",      "harx",
                                                  "ml",     "robust",   "report"};
    for (const auto& name : stage_names)
        app.add_subcommand(name, "run the " + name + " stage into --dir");
    app.add_subcommand("all", "run every stage into a fresh run directory");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = RunConfig::from_json_file(config_path);
        if (seed_override >= 0) cfg.seed = static_cast<uint64_t>(seed_override);

        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "all") {
            RunArtifacts artifacts = run_pipeline(cfg, out_root, run_dir);
            std::cout << "run complete: " << artifacts.dir << " ("
                      << artifacts.manifest.size() << " files)\n";
            return 0;
        }

        if (run_dir.empty()) {
            std::cerr << "error: stage subcommands need --dir\n";
            return 2;
        }
        fs::create_directories(run_dir);
        {
            std::ofstream out(fs::path(run_dir) / "config.json");
            out << cfg.to_json();
        }
        PipelineLog log;
        if (sub == "ingest") stage_ingest(cfg, run_dir, log);
        else if (sub == "features") stage_features(cfg, run_dir, log);
        else if (sub == "factors") stage_factors(cfg, run_dir, log);
        else if (sub == "layers") stage_layers(cfg, run_dir, log);
        else if (sub == "var") stage_var(cfg, run_dir, log);
        else if (sub == "harx") stage_harx(cfg, run_dir, log);
        else if (sub == "ml") stage_ml(cfg, run_dir, log);
        else if (sub == "robust") stage_robust(cfg, run_dir, log);
        else if (sub == "report") stage_report(cfg, run_dir, log);
        log.append_to((fs::path(run_dir) / "pipeline.log").string());
        write_manifest(run_dir, build_manifest(run_dir));
        std::cout << "stage " << sub << " complete: " << run_dir << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
