#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sle0/run.hpp"
#include "sle0/scene.hpp"

namespace {

struct SceneFlags {
    std::string config;
    std::string preset;
    std::optional<double> dt, T, step, max_arc;
    std::optional<std::uint64_t> seed;

    void attach(CLI::App* app) {
        app->add_option("--config", config, "scene file (YAML)");
        app->add_option("--preset", preset, "start from a figure preset (fig1, fig2, fig3)");
        app->add_option("--dt", dt, "Loewner time step");
        app->add_option("--T", T, "Loewner end time");
        app->add_option("--step", step, "initial trace step");
        app->add_option("--max-arc", max_arc, "maximum trajectory arc length");
        app->add_option("--seed", seed, "seed for randomized checks");
    }

    sle0::SceneConfig load() const {
        if (config.empty() == preset.empty())
            throw sle0::ConfigError({{0, "give exactly one of --config or --preset"}});
        sle0::SceneConfig c = config.empty() ? sle0::preset(preset) : sle0::load_config(config);
        if (dt) c.loewner.dt = *dt;
        if (T) c.loewner.T = *T;
        if (step) c.trace.step = *step;
        if (max_arc) c.trace.max_arc_length = *max_arc;
        if (seed) c.seed = *seed;
        sle0::check_config(c);
        return c;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiple chordal SLE(0): traces, Loewner flow, and checks"};
    app.require_subcommand(1);

    SceneFlags run_flags;
    std::string out_dir = "out";
    auto* run = app.add_subcommand("run", "compute a scene and write its artifacts");
    run_flags.attach(run);
    run->add_option("--out", out_dir, "output directory");

    SceneFlags verify_flags;
    std::string suite = "all";
    auto* verify = app.add_subcommand("verify", "run numerical property suites on a scene");
    verify_flags.attach(verify);
    verify->add_option("--suite", suite, "all | invariance | motion | equivalence");

    auto* preset_cmd = app.add_subcommand("preset", "list or show figure presets");
    preset_cmd->require_subcommand(1);
    preset_cmd->add_subcommand("list", "list preset names");
    std::string show_name;
    auto* show = preset_cmd->add_subcommand("show", "print a preset as YAML");
    show->add_option("name", show_name)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : sle0::exit_validation;
    }

    try {
        if (*run) {
            const auto config = run_flags.load();
            const auto result = sle0::run_scene(config);
            for (const auto& f : sle0::write_artifacts(config, result, out_dir)) std::cout << out_dir << "/" << f << "\n";
            if (result.analysis)
                std::cout << "trajectories: " << result.trajectories.size()
                          << ", converging pairs: " << result.analysis->pairs.size()
                          << ", spirals: " << result.analysis->spiral_count() << "\n";
            if (result.loewner && result.loewner->run.collision)
                std::cout << "loewner: " << result.loewner->run.collision->what << "\n";
            return sle0::exit_ok;
        }
        if (*verify) {
            const auto config = verify_flags.load();
            const auto report = sle0::verify(config, sle0::parse_suite(suite));
            std::cout << report.to_text();
            return report.exit_code();
        }
        if (preset_cmd->got_subcommand("list")) {
            for (const auto& n : sle0::preset_names()) std::cout << n << "\n";
            return sle0::exit_ok;
        }
        std::cout << sle0::serialize(sle0::preset(show_name));
        return sle0::exit_ok;
    } catch (const sle0::ConfigError& e) {
        for (const auto& d : e.diagnostics())
            std::cerr << "error" << (d.line > 0 ? " (line " + std::to_string(d.line) + ")" : std::string()) << ": "
                      << d.message << "\n";
        return sle0::exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return sle0::exit_code_for(e);
    }
}
