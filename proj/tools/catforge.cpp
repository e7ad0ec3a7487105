#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "catforge/config.hpp"
#include "catforge/errors.hpp"
#include "catforge/run.hpp"

namespace {

constexpr int kConfigError = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw catforge::ConfigError("cannot read config file " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mechanical cat-state simulator for a modulated two-cavity optomechanical system"};
    app.set_version_flag("--version", "catforge 1.0");

    std::string mode;
    std::string config_path;
    std::string preset;
    std::string out_dir;
    int workers = 1;
    std::vector<std::string> sets;

    std::vector<std::string> modes{"closed", "open", "wigner", "quadrature", "sweep", "detect-times"};
    app.add_option("mode", mode, "Run mode")->required()->check(CLI::IsMember(modes));
    app.add_option("--config", config_path, "Key-value run description ('#' comments)");
    app.add_option("--preset", preset, "Built-in parameter preset")->check(CLI::IsMember(catforge::preset_names()));
    app.add_option("--out", out_dir, "Output directory (default $CATFORGE_OUT or ./catforge_out)");
    app.add_option("--workers", workers, "Parallel runs in sweeps")->check(CLI::PositiveNumber);
    app.add_option("--set", sets, "Override one key: key=value (repeatable)")->allow_extra_args(false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    catforge::RunOptions options;
    options.workers = workers;
    if (!out_dir.empty()) {
        options.output_dir = out_dir;
    } else if (const char* env = std::getenv("CATFORGE_OUT"); env && *env) {
        options.output_dir = env;
    }

    catforge::RunConfig cfg;
    try {
        catforge::ConfigSources sources;
        if (!config_path.empty()) sources.document = read_file(config_path);
        sources.mode = mode;
        if (!preset.empty()) sources.preset = preset;
        sources.sets = sets;
        cfg = catforge::parse_config(sources);
    } catch (const catforge::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        const int status = catforge::run(cfg, options, std::cerr);
        if (status == 0) std::cerr << "outputs in " << options.output_dir.string() << "\n";
        return status;
    } catch (const catforge::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
