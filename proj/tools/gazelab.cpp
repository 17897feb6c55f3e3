// gazelab: batch driver for the eye-movement model and its evaluation.
//
//   gazelab simulate|saliency|evaluate|render|validate --config <file> --dataset <dir>
//       [--out <dir>] [--filter <glob>] [--seed <u64>] [--jobs <n>] [--json] [--<key>=<value> ...]

#include <fmt/format.h>

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gazelab/commands.hpp"
#include "gazelab/config.hpp"

namespace {

using namespace gazelab;

struct Common {
    std::string config;
    std::string dataset;
    std::optional<std::string> out;
    std::string filter;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    bool json = false;
};

void add_common(CLI::App* app, Common& c, bool batch) {
    app->add_option("--dataset", c.dataset, "dataset root (stimuli/, scanpaths/, fixmaps/, cfmaps/)")->required();
    app->add_option("--config", c.config, "key = value configuration file");
    app->add_option("--out", c.out, "output directory");
    if (batch) {
        app->add_option("--filter", c.filter, "shell glob over stimulus stems");
        app->add_option("--seed", c.seed, "base random seed");
        app->add_option("--jobs", c.jobs, "worker threads");
        app->add_flag("--json", c.json, "print the report as JSON");
    }
    app->allow_extras();
}

// Everything CLI11 did not recognise must be a --key=value override.
RunConfig resolve_config(const Common& c, const std::vector<std::string>& extras) {
    RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
    for (const std::string& arg : extras) {
        const auto eq = arg.find('=');
        if (arg.rfind("--", 0) != 0 || eq == std::string::npos) {
            throw ConfigError(fmt::format("unexpected argument '{}' (overrides are --key=value)", arg));
        }
        apply_setting(cfg, arg.substr(2, eq - 2), arg.substr(eq + 1));
    }
    if (c.out) cfg.out = *c.out;
    if (c.seed) cfg.params.seed = *c.seed;
    if (c.jobs) cfg.jobs = *c.jobs;
    validate(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EYMOL eye-movement simulation and evaluation"};
    app.require_subcommand(1);

    Common common;
    RenderRequest render;
    auto* simulate = app.add_subcommand("simulate", "integrate seeded runs, write trajectories and scanpaths");
    auto* saliency = app.add_subcommand("saliency", "accumulate saliency maps and apply the map pipeline");
    auto* evaluate = app.add_subcommand("evaluate", "score maps and scanpaths against human data");
    auto* rend = app.add_subcommand("render", "draw a simulated scanpath over its stimulus");
    auto* check = app.add_subcommand("validate", "check the dataset layout and human scanpaths");
    for (auto* sub : {simulate, saliency, evaluate}) add_common(sub, common, true);
    add_common(rend, common, false);
    add_common(check, common, false);
    rend->add_option("--image", render.image, "stimulus stem")->required();
    rend->add_option("--run", render.run, "simulated run index");
    rend->add_option("--observer", render.observer, "human observer to overlay");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitBadConfig;
    }

    CLI::App* sub = app.get_subcommands().front();
    CommandOptions opt;
    opt.dataset = common.dataset;
    opt.filter = common.filter;
    opt.json = common.json;
    try {
        opt.config = resolve_config(common, sub->remaining());
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitBadConfig;
    }

    try {
        if (sub == simulate) return cmd_simulate(opt, std::cerr);
        if (sub == saliency) return cmd_saliency(opt, std::cerr);
        if (sub == evaluate) return cmd_evaluate(opt, std::cout, std::cerr);
        if (sub == rend) return cmd_render(opt, render, std::cerr);
        return cmd_validate(opt, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitPartialFailure;
    }
}
