#include "fraclab/cli.hpp"
#include "fraclab/error.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for fractional Schrödinger blow-up on radial manifolds", "fraclab"};
    app.set_version_flag("--version", fraclab::kVersion);
    app.require_subcommand(1, 1);

    std::string config;
    std::string out;
    const char* names[] = {"check-manifold", "verify-lemmas", "verify-weight", "simulate", "lifespan", "sweep"};
    const char* help[] = {"check the geometric assumptions of the configured model",
                          "run the radial integral scaling battery",
                          "certify the fractional bound of the weight function",
                          "run a split-step simulation and post-process the blow-up",
                          "compare the closed-form lifespan with the comparison ODE",
                          "run a Cartesian parameter sweep of another command"};
    for (int i = 0; i < 6; ++i) {
        auto* sub = app.add_subcommand(names[i], help[i]);
        sub->add_option("--config", config, "JSON run configuration")->required();
        sub->add_option("--out", out, "output directory (report.json and CSV files)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        const auto cfg = fraclab::load_config(config);
        const auto result = fraclab::run_command(command, cfg);
        if (out.empty()) {
            std::cout << fraclab::dump_report(result.report);
        } else {
            fraclab::write_outputs(result, out);
            std::cout << command << ": exit " << result.exit_code << ", report written to " << out << "\n";
        }
        if (result.report.contains("error"))
            std::cerr << "error [" << result.report["error"]["module"].get<std::string>()
                      << "]: " << result.report["error"]["message"].get<std::string>() << "\n";
        if (result.report.contains("violation"))
            std::cerr << "violation [" << result.report["violation"]["module"].get<std::string>()
                      << "]: " << result.report["violation"]["invariant"].get<std::string>() << "\n";
        return result.exit_code;
    } catch (const fraclab::Error& e) {
        std::cerr << "error [" << e.module() << "]: " << e.what() << "\n";
        return 2;
    }
}
