// config.hpp: command-line and config-file parsing for the qratchet tool

#pragma once

#include "qratchet/classical.hpp"
#include "qratchet/ratchet.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qratchet::cli {

enum class Experiment { QuantumChain, QuantumEnsemble, ShortTime, BogoliubovValidate, ClassicalToggle, ClassicalFreq };

std::string to_string(Experiment e);
std::optional<Experiment> parse_experiment(const std::string& name);

namespace exit_code {
constexpr int ok = 0;
constexpr int failure = 1;
constexpr int usage = 2;
constexpr int validation = 3;
constexpr int truncation = 4;
constexpr int instability = 5;
}  // namespace exit_code

// Bad flags, missing arguments, unknown config keys.
class UsageError : public std::runtime_error {
public:
    UsageError(const std::string& what, std::string help, bool requested = false)
        : std::runtime_error(what), help_(std::move(help)), requested_(requested) {}
    const std::string& help() const { return help_; }
    // True for --help, which is not an error.
    bool requested() const { return requested_; }

private:
    std::string help_;
    bool requested_;
};

struct RunConfig {
    Experiment experiment{Experiment::QuantumChain};
    std::string preset;  // empty when none was given

    // Quantum experiments. protocol.mode is set from experiment and pool_size.
    ratchet::ProtocolSpec protocol{};
    std::size_t pool_size{2};
    std::optional<std::size_t> fit_first;
    std::optional<std::size_t> fit_last;
    std::size_t growth_transient{5};
    std::vector<double> t_grid{0.001, 0.002, 0.003, 0.005, 0.007, 0.01};

    // Classical experiments.
    classical::ClassicalParams classical{};
    classical::FreqSwitchParams freq{};
    std::size_t n_trajectories{10000};
    std::size_t n_toggles{200};

    std::uint64_t seed{0};
    unsigned threads{1};
    std::filesystem::path output_dir{"qratchet-out"};

    // Module inputs with mode, seed and thread count filled in from the fields above.
    ratchet::ProtocolSpec effective_protocol() const;
    classical::ClassicalParams effective_classical() const;
    classical::FreqSwitchParams effective_freq() const;

    // Runs every module-level check that applies to the chosen experiment. Throws the
    // module's own exception types (InvalidArgument, UnstableCoupling, ...).
    void validate() const;

    // Stable key set, echoed into the metadata sidecar.
    nlohmann::json to_json() const;
};

struct RunCommand {
    RunConfig config;
};
struct PlotCommand {
    std::filesystem::path dir;
};
struct VersionCommand {};
using Command = std::variant<RunCommand, PlotCommand, VersionCommand>;

// Precedence, lowest first: built-in defaults, --preset, --config file (TOML or INI),
// command-line flags, then QRATCHET_OUTPUT_DIR for the output directory.
// Throws UsageError for malformed input and the module exceptions for invalid values.
Command parse_command_line(int argc, const char* const* argv);

std::string usage_text();

}  // namespace qratchet::cli
