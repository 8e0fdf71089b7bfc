#include "cli.hpp"

#include <billiard/errors.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

namespace billiard::cli {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Symplectic billiards in ellipses and their radial deformations", "billiard_lab"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    int workers = 0;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "JSON study config");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--workers", workers, "Worker threads (results do not depend on it)")->check(CLI::NonNegativeNumber);
    app.add_option("--set", overrides, "Override a config key, e.g. --set q=[3,5] --set curve.ellipse.a=2");

    auto* portrait = app.add_subcommand("phase-portrait", "Iterate the billiard map and write trajectories");
    auto* orbit = app.add_subcommand("orbit", "Find q-periodic orbits");
    auto* verify = app.add_subcommand("verify", "Run a scaling or integrability harness");
    std::string harness;
    verify->add_option("harness", harness, "action-quadratic | equidistribution | suppression | witness | symmdiff")
        ->required()
        ->check(CLI::IsMember({"action-quadratic", "equidistribution", "suppression", "witness", "symmdiff"}));
    auto* fit = app.add_subcommand("fit", "Closest-ellipse iteration");
    auto* selftest = app.add_subcommand("selftest", "Quick internal consistency checks");
    for (auto* sub : {portrait, orbit, verify, fit, selftest}) sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (selftest->parsed()) return cmd_selftest(out);
        StudyConfig config =
            load_config(config_path.empty() ? std::string{} : read_file(config_path), overrides);
        config.out_dir = out_dir;
        if (workers > 0) config.workers = workers;
        if (portrait->parsed()) {
            config.command = "phase-portrait";
            return cmd_phase_portrait(config, out);
        }
        if (orbit->parsed()) {
            config.command = "orbit";
            return cmd_orbit(config, out);
        }
        if (verify->parsed()) {
            config.command = "verify";
            config.harness = harness;
            return cmd_verify(config, out);
        }
        config.command = "fit";
        return cmd_fit(config, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const Error& e) {
        err << "solver failure: " << e.what() << '\n';
        return kSolverFailure;
    }
}

} // namespace billiard::cli
