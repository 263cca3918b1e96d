#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "krylreg/config.hpp"
#include "krylreg/experiment.hpp"

// Exit codes: 0 ok, 1 cell failures present, 2 config/usage error.
int main(int argc, char** argv) {
    CLI::App app{"Krylov regularization experiments"};
    app.require_subcommand(1);

    std::string run_config;
    std::string plot_dir;
    std::string audit_config;

    CLI::App* run =
        app.add_subcommand("run", "Run the experiment grid from a config file");
    run->add_option("config", run_config, "config file")->required();
    CLI::App* plot = app.add_subcommand(
        "plot", "Render SVG plots from the trace CSVs in a directory");
    plot->add_option("dir", plot_dir, "directory holding trace_*.csv files")
        ->required();
    CLI::App* audit = app.add_subcommand(
        "audit",
        "Run the inequality audits and the sketch sharpness study");
    audit->add_option("config", audit_config, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed())
            return krylreg::run_experiment(krylreg::load_config(run_config),
                                           std::cout);
        if (plot->parsed()) return krylreg::plot_traces(plot_dir, std::cout);
        return krylreg::run_audit(krylreg::load_config(audit_config),
                                  std::cout);
    } catch (const krylreg::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
