// coordgraph: influence-operation detection pipeline over co-sharing graphs.
//
// Subcommands compose the pipeline end to end from one JSON config:
//   synth -> courl -> censor -> encode -> train -> evaluate -> attribute -> sweep
// Every artifact embeds the config hash that produced it, and reruns from the
// same config are byte-identical.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "coordgraph/pipeline.hpp"

using coordgraph::pipeline::PipelineConfig;

int main(int argc, char** argv) {
    CLI::App app{"coordinated-sharing detection pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string events;
    int threads = 0;
    std::uint64_t seed = 0;
    bool have_seed = false;
    bool force = false;

    app.add_option("--config", config_path, "pipeline config JSON");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--events", events, "events CSV path (overrides config)");
    app.add_option("--threads", threads,
                   "worker threads (0 = auto, COORDGRAPH_THREADS honored)");
    app.add_option("--seed", seed, "base seed (overrides config)")
        ->each([&](const std::string&) { have_seed = true; });
    app.add_flag("--force", force, "ignore config-hash mismatches on inputs");

    int (*command)(const PipelineConfig&) = nullptr;
    app.add_subcommand("synth", "generate a synthetic event corpus")
        ->callback([&] { command = coordgraph::pipeline::cmd_synth; });
    app.add_subcommand("courl", "co-URL vectors, CDFs, cross-campaign matrices")
        ->callback([&] { command = coordgraph::pipeline::cmd_courl; });
    app.add_subcommand("censor", "domain censorship and content features")
        ->callback([&] { command = coordgraph::pipeline::cmd_censor; });
    app.add_subcommand("encode", "censored graph and graph encodings")
        ->callback([&] { command = coordgraph::pipeline::cmd_encode; });
    app.add_subcommand("train", "train the configured model on one task")
        ->callback([&] { command = coordgraph::pipeline::cmd_train; });
    app.add_subcommand("evaluate", "run the task suite for every model")
        ->callback([&] { command = coordgraph::pipeline::cmd_evaluate; });
    app.add_subcommand("attribute", "integrated-gradients attribution report")
        ->callback([&] { command = coordgraph::pipeline::cmd_attribute; });
    app.add_subcommand("sweep", "gamma_max x k_top grid sweep")
        ->callback([&] { command = coordgraph::pipeline::cmd_sweep; });

    CLI11_PARSE(app, argc, argv);

    try {
        PipelineConfig config;
        if (!config_path.empty()) config = PipelineConfig::load(config_path);
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (!events.empty()) config.events_path = events;
        if (have_seed) config.seed = seed;
        config.threads = threads;
        config.force = config.force || force;
        coordgraph::thread_budget() = config.threads;

        return command(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
