// qratchet: command-line entry point

#include "cli/config.hpp"
#include "cli/plot_script.hpp"
#include "cli/runner.hpp"
#include "qratchet/errors.hpp"

#include <iostream>

using namespace qratchet;

int main(int argc, char** argv) {
    cli::Command cmd;
    try {
        cmd = cli::parse_command_line(argc, argv);
    } catch (const cli::UsageError& e) {
        const bool help = e.requested();
        if (!help) std::cerr << "qratchet: " << e.what() << "\n";
        (help ? std::cout : std::cerr) << (e.help().empty() ? cli::usage_text() : e.help());
        return help ? cli::exit_code::ok : cli::exit_code::usage;
    } catch (const UnstableCoupling& e) {
        std::cerr << "qratchet: " << e.what() << "\n";
        return cli::exit_code::instability;
    } catch (const Error& e) {
        std::cerr << "qratchet: " << e.what() << "\n";
        return cli::exit_code::validation;
    }

    if (std::holds_alternative<cli::VersionCommand>(cmd)) {
        std::cout << "qratchet " << QRATCHET_VERSION << "\n";
        return cli::exit_code::ok;
    }
    if (const auto* plot = std::get_if<cli::PlotCommand>(&cmd)) {
        try {
            std::cout << cli::emit_plot_script(plot->dir).string() << "\n";
            return cli::exit_code::ok;
        } catch (const Error& e) {
            std::cerr << "qratchet: " << e.what() << "\n";
            return cli::exit_code::validation;
        }
    }
    const auto& cfg = std::get<cli::RunCommand>(cmd).config;
    const int code = cli::run(cfg, std::cerr);
    if (code == cli::exit_code::ok) std::cout << "results in " << cfg.output_dir.string() << "\n";
    return code;
}
