#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rbflow/errors.hpp"
#include "rbflow/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"rbflow: warped Ricci-Bourguignon flow reductions, closed forms and checks"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::string scenario;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out, "output directory (overrides RBFLOW_OUT_DIR and the config)");
    app.add_option("--seed", seed, "seed for sample-point selection");
    app.add_option("--scenario", scenario, "scenario, simulation problem or estimate suite");

    auto* cat = app.add_subcommand("catalog", "list the scenario catalog or show one entry");
    cat->require_subcommand(1);
    cat->add_subcommand("list", "one row per scenario")->fallthrough();
    std::string show_name;
    auto* show = cat->add_subcommand("show", "parameters of one scenario");
    show->add_option("name", show_name);
    show->fallthrough();

    std::string positional;
    for (const char* name :
         {"simulate", "verify-ansatz", "verify-flow", "verify-estimate", "identity-check", "classify"}) {
        app.add_subcommand(name)->add_option("scenario", positional);
    }
    app.fallthrough();
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        rbflow::RunConfig config = config_path.empty() ? rbflow::RunConfig{} : rbflow::load_config(config_path);
        auto* sub = app.get_subcommands().front();
        config.mode = rbflow::mode_from_string(sub->get_name());
        if (config.mode == rbflow::Mode::Catalog) {
            auto* action = sub->get_subcommands().front();
            config.catalog_action = action->get_name();
            if (!show_name.empty()) config.scenario = show_name;
        }
        if (!positional.empty()) config.scenario = positional;
        if (!scenario.empty()) config.scenario = scenario;
        if (seed) config.seed = *seed;
        config.out_dir = rbflow::resolve_out_dir(out, config);

        const auto result = rbflow::run(config);
        std::cout << rbflow::to_string(config.mode) << ": " << result.message << " (exit " << result.exit_code
                  << ")\n";
        for (const auto& a : result.artifacts) std::cout << "  " << a.string() << '\n';
        return result.exit_code;
    } catch (const rbflow::Error& e) {
        std::cerr << e.what() << '\n';
        return rbflow::exit_code_for(e.kind());
    }
}
