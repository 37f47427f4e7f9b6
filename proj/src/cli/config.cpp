// config.cpp

#include "cli/config.hpp"

#include "qratchet/bogoliubov.hpp"
#include "qratchet/errors.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string_view>

namespace qratchet::cli {

namespace {

const std::map<std::string, Experiment> kExperiments = {
    {"quantum-chain", Experiment::QuantumChain},
    {"quantum-ensemble", Experiment::QuantumEnsemble},
    {"shorttime", Experiment::ShortTime},
    {"bogoliubov-validate", Experiment::BogoliubovValidate},
    {"classical-toggle", Experiment::ClassicalToggle},
    {"classical-freq", Experiment::ClassicalFreq},
};

bool is_quantum(Experiment e) {
    return e == Experiment::QuantumChain || e == Experiment::QuantumEnsemble || e == Experiment::ShortTime ||
           e == Experiment::BogoliubovValidate;
}

nlohmann::json initial_json(const ratchet::InitialState& init) {
    if (const auto* f = std::get_if<ratchet::FockInit>(&init)) return {{"kind", "fock"}, {"n", f->n}};
    const auto& c = std::get<ratchet::CoherentInit>(init);
    return {{"kind", "coherent"}, {"re", c.z.real()}, {"im", c.z.imag()}};
}

std::string hold_law_name(const classical::HoldLaw& law) {
    if (std::holds_alternative<classical::UniformHold>(law)) return "uniform";
    if (std::holds_alternative<classical::FixedHold>(law)) return "fixed";
    return "exponential";
}

// Holds every flag of `run`. Each value is applied only when its option was seen on the
// command line or in the config file, so presets keep their values otherwise.
struct Flags {
    std::string experiment, preset, coupling, hold_law, output_dir;
    double omega_a{}, omega_b{}, g{}, contact_time{}, coherent_a{}, coherent_b{};
    double tail_warn{}, tail_hard{}, tol_herm{}, tol_trace{}, tol_eig{};
    double gamma{}, mean_hold{}, hold_lo{}, hold_hi{}, omega{}, omega_prime{};
    std::size_t encounters{}, levels{}, levels_a{}, levels_b{}, n_a{}, n_b{}, pool_size{};
    std::size_t fit_first{}, fit_last{}, transient{}, trajectories{}, toggles{};
    std::uint64_t seed{};
    unsigned threads{};
    std::vector<double> t_grid;

    std::map<std::string, CLI::Option*> opts;

    template <class T>
    void add(CLI::App& app, const std::string& name, T& target, const std::string& help) {
        opts[name] = app.add_option("--" + name, target, help);
    }

    bool seen(const std::string& name) const { return opts.at(name)->count() > 0; }

    template <class T>
    void apply(const std::string& name, const T& value, T& target) const {
        if (seen(name)) target = value;
    }
};

void register_flags(CLI::App& run, Flags& f) {
    f.opts["experiment"] =
        run.add_option("-e,--experiment", f.experiment, "quantum-chain, quantum-ensemble, shorttime, "
                                                         "bogoliubov-validate, classical-toggle, classical-freq");
    f.add(run, "preset", f.preset, "fig1 or fig2b");
    f.opts["output-dir"] = run.add_option("-o,--output-dir", f.output_dir, "Directory for result files");
    f.add(run, "omega-a", f.omega_a, "Frequency of oscillator A");
    f.add(run, "omega-b", f.omega_b, "Frequency of oscillator B");
    f.add(run, "g", f.g, "Coupling strength");
    f.add(run, "coupling", f.coupling, "sb (spin-boson) or jc (Jaynes-Cummings)");
    f.add(run, "contact-time", f.contact_time, "Duration of one contact");
    f.add(run, "encounters", f.encounters, "Number of encounters");
    f.add(run, "levels", f.levels, "Fock levels kept per oscillator");
    f.add(run, "levels-a", f.levels_a, "Fock levels kept for A");
    f.add(run, "levels-b", f.levels_b, "Fock levels kept for B");
    f.add(run, "n-a", f.n_a, "Initial Fock state of A");
    f.add(run, "n-b", f.n_b, "Initial Fock state of B");
    f.add(run, "coherent-a", f.coherent_a, "Start A in a coherent state with this real amplitude");
    f.add(run, "coherent-b", f.coherent_b, "Start B in a coherent state with this real amplitude");
    f.add(run, "pool-size", f.pool_size, "Pool size per oscillator in ensemble mode");
    f.add(run, "seed", f.seed, "Seed for matchings and hold times");
    f.add(run, "threads", f.threads, "Worker threads");
    f.add(run, "tail-warn", f.tail_warn, "Top-level population that triggers a truncation warning");
    f.add(run, "tail-hard", f.tail_hard, "Top-level population that aborts the run");
    f.add(run, "tol-hermiticity", f.tol_herm, "Hermiticity tolerance");
    f.add(run, "tol-trace", f.tol_trace, "Trace drift tolerance");
    f.add(run, "tol-eigenvalue", f.tol_eig, "Most negative eigenvalue accepted");
    f.add(run, "fit-first", f.fit_first, "First Fock level used by the distribution fits");
    f.add(run, "fit-last", f.fit_last, "One past the last Fock level used by the distribution fits");
    f.add(run, "growth-transient", f.transient, "Encounters skipped by the growth fits");
    f.opts["t-grid"] = run.add_option("--t-grid", f.t_grid, "Contact times for the short-time comparison")
                           ->delimiter(',');
    f.add(run, "gamma", f.gamma, "Classical position coupling");
    f.add(run, "mean-hold", f.mean_hold, "Mean hold time between toggles");
    f.add(run, "hold-law", f.hold_law, "exponential, uniform or fixed");
    f.add(run, "hold-lo", f.hold_lo, "Lower bound of uniform holds");
    f.add(run, "hold-hi", f.hold_hi, "Upper bound of uniform holds");
    f.add(run, "trajectories", f.trajectories, "Classical trajectories");
    f.add(run, "toggles", f.toggles, "Toggles (or frequency switches) per trajectory");
    f.add(run, "omega", f.omega, "First frequency of the switching oscillator");
    f.add(run, "omega-prime", f.omega_prime, "Second frequency of the switching oscillator");
}

RunConfig build_config(const Flags& f) {
    RunConfig c;
    if (f.seen("preset")) {
        if (f.preset == "fig1") {
            c.protocol = ratchet::ProtocolSpec::fig1();
        } else if (f.preset == "fig2b") {
            c.protocol = ratchet::ProtocolSpec::fig2b();
        } else {
            throw InvalidArgument("unknown preset '" + f.preset + "' (expected fig1 or fig2b)");
        }
        c.preset = f.preset;
    }
    if (f.seen("experiment")) {
        auto e = parse_experiment(f.experiment);
        if (!e) throw InvalidArgument("unknown experiment '" + f.experiment + "'");
        c.experiment = *e;
    } else if (c.preset.empty()) {
        throw UsageError("run: --experiment or --preset is required", "");
    }

    auto& p = c.protocol;
    f.apply("omega-a", f.omega_a, p.params.omega_a);
    f.apply("omega-b", f.omega_b, p.params.omega_b);
    f.apply("omega-a", f.omega_a, c.classical.omega_a);
    f.apply("omega-b", f.omega_b, c.classical.omega_b);
    f.apply("g", f.g, p.params.g);
    if (f.seen("coupling")) {
        if (f.coupling == "sb") {
            p.params.coupling = dynamics::Coupling::SpinBoson;
        } else if (f.coupling == "jc") {
            p.params.coupling = dynamics::Coupling::JaynesCummings;
        } else {
            throw InvalidArgument("unknown coupling '" + f.coupling + "' (expected sb or jc)");
        }
    }
    f.apply("contact-time", f.contact_time, p.contact_time);
    f.apply("encounters", f.encounters, p.n_encounters);
    if (f.seen("levels")) p.spec = {f.levels, f.levels};
    f.apply("levels-a", f.levels_a, p.spec.levels_a);
    f.apply("levels-b", f.levels_b, p.spec.levels_b);
    if (f.seen("n-a") && f.seen("coherent-a")) throw InvalidArgument("--n-a and --coherent-a are exclusive");
    if (f.seen("n-b") && f.seen("coherent-b")) throw InvalidArgument("--n-b and --coherent-b are exclusive");
    if (f.seen("n-a")) p.initial_a = ratchet::FockInit{f.n_a};
    if (f.seen("n-b")) p.initial_b = ratchet::FockInit{f.n_b};
    if (f.seen("coherent-a")) p.initial_a = ratchet::CoherentInit{f.coherent_a};
    if (f.seen("coherent-b")) p.initial_b = ratchet::CoherentInit{f.coherent_b};
    f.apply("pool-size", f.pool_size, c.pool_size);
    f.apply("seed", f.seed, c.seed);
    f.apply("threads", f.threads, c.threads);
    f.apply("tail-warn", f.tail_warn, p.guard.warn);
    f.apply("tail-hard", f.tail_hard, p.guard.hard);
    f.apply("tol-hermiticity", f.tol_herm, p.tolerances.hermiticity);
    f.apply("tol-trace", f.tol_trace, p.tolerances.trace);
    f.apply("tol-eigenvalue", f.tol_eig, p.tolerances.eigenvalue_floor);
    if (f.seen("fit-first")) c.fit_first = f.fit_first;
    if (f.seen("fit-last")) c.fit_last = f.fit_last;
    f.apply("growth-transient", f.transient, c.growth_transient);
    f.apply("t-grid", f.t_grid, c.t_grid);

    f.apply("gamma", f.gamma, c.classical.gamma);
    f.apply("mean-hold", f.mean_hold, c.classical.mean_hold);
    if (f.seen("hold-law") || f.seen("hold-lo") || f.seen("hold-hi")) {
        const std::string law = f.seen("hold-law") ? f.hold_law : hold_law_name(c.classical.hold_law);
        if (law == "exponential") {
            c.classical.hold_law = classical::ExponentialHold{};
        } else if (law == "fixed") {
            c.classical.hold_law = classical::FixedHold{};
        } else if (law == "uniform") {
            classical::UniformHold u;
            f.apply("hold-lo", f.hold_lo, u.lo);
            f.apply("hold-hi", f.hold_hi, u.hi);
            c.classical.hold_law = u;
        } else {
            throw InvalidArgument("unknown hold law '" + law + "' (expected exponential, uniform or fixed)");
        }
        if (law != "uniform" && (f.seen("hold-lo") || f.seen("hold-hi"))) {
            throw InvalidArgument("--hold-lo/--hold-hi need --hold-law uniform");
        }
    }
    c.freq.mean_hold = c.classical.mean_hold;
    c.freq.hold_law = c.classical.hold_law;
    f.apply("omega", f.omega, c.freq.omega);
    f.apply("omega-prime", f.omega_prime, c.freq.omega_prime);
    f.apply("trajectories", f.trajectories, c.n_trajectories);
    f.apply("toggles", f.toggles, c.n_toggles);

    if (f.seen("output-dir")) c.output_dir = f.output_dir;
    if (const char* env = std::getenv("QRATCHET_OUTPUT_DIR"); env && *env) c.output_dir = env;
    return c;
}

}  // namespace

std::string to_string(Experiment e) {
    for (const auto& [name, value] : kExperiments)
        if (value == e) return name;
    return "unknown";
}

std::optional<Experiment> parse_experiment(const std::string& name) {
    auto it = kExperiments.find(name);
    if (it == kExperiments.end()) return std::nullopt;
    return it->second;
}

ratchet::ProtocolSpec RunConfig::effective_protocol() const {
    ratchet::ProtocolSpec p = protocol;
    if (experiment == Experiment::QuantumEnsemble) {
        p.mode = ratchet::EnsembleMode{pool_size, seed};
    } else {
        p.mode = ratchet::ChainMode{};
    }
    p.threads = threads;
    return p;
}

classical::ClassicalParams RunConfig::effective_classical() const {
    classical::ClassicalParams c = classical;
    c.seed = seed;
    return c;
}

classical::FreqSwitchParams RunConfig::effective_freq() const {
    classical::FreqSwitchParams f = freq;
    f.seed = seed;
    return f;
}

void RunConfig::validate() const {
    if (threads < 1) throw InvalidArgument("threads must be >= 1");
    if (output_dir.empty()) throw InvalidArgument("output directory must not be empty");
    if (is_quantum(experiment)) {
        const ratchet::ProtocolSpec p = effective_protocol();
        p.validate();
        if ((experiment == Experiment::ShortTime || experiment == Experiment::BogoliubovValidate) &&
            p.params.coupling != dynamics::Coupling::SpinBoson) {
            throw InvalidArgument(to_string(experiment) + " needs the spin-boson coupling");
        }
        if (experiment == Experiment::BogoliubovValidate &&
            !(std::holds_alternative<ratchet::FockInit>(p.initial_a) &&
              std::holds_alternative<ratchet::FockInit>(p.initial_b))) {
            throw InvalidArgument("bogoliubov-validate needs Fock initial states");
        }
        if (fit_first || fit_last) {
            const std::size_t top = std::min(p.spec.levels_a, p.spec.levels_b);
            const std::size_t first = fit_first.value_or(ratchet::default_fit_range(top).first);
            const std::size_t last = fit_last.value_or(ratchet::default_fit_range(top).last);
            if (!(first + 2 <= last && last <= top)) {
                throw InvalidArgument("fit range needs first + 2 <= last <= levels");
            }
        }
        if (experiment == Experiment::ShortTime) {
            if (t_grid.empty()) throw InvalidArgument("t-grid must not be empty");
            for (double t : t_grid)
                if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("t-grid entries must be positive");
        }
    } else {
        if (experiment == Experiment::ClassicalToggle) {
            effective_classical().validate();
        } else {
            effective_freq().validate();
        }
        if (n_trajectories < 100) throw InvalidArgument("trajectories must be >= 100");
        if (n_toggles < 2) throw InvalidArgument("toggles must be >= 2");
    }
}

nlohmann::json RunConfig::to_json() const {
    const auto& p = protocol;
    nlohmann::json j;
    j["experiment"] = to_string(experiment);
    j["preset"] = preset;
    j["seed"] = seed;
    j["threads"] = threads;
    j["model"] = {{"omega_a", p.params.omega_a},
                  {"omega_b", p.params.omega_b},
                  {"g", p.params.g},
                  {"coupling", dynamics::to_string(p.params.coupling)}};
    j["protocol"] = {{"contact_time", p.contact_time},
                     {"n_encounters", p.n_encounters},
                     {"levels_a", p.spec.levels_a},
                     {"levels_b", p.spec.levels_b},
                     {"initial_a", initial_json(p.initial_a)},
                     {"initial_b", initial_json(p.initial_b)},
                     {"pool_size", pool_size},
                     {"tail_warn", p.guard.warn},
                     {"tail_hard", p.guard.hard},
                     {"fit_first", fit_first ? nlohmann::json(*fit_first) : nlohmann::json()},
                     {"fit_last", fit_last ? nlohmann::json(*fit_last) : nlohmann::json()},
                     {"growth_transient", growth_transient},
                     {"t_grid", t_grid}};
    j["tolerances"] = {{"hermiticity", p.tolerances.hermiticity},
                       {"trace", p.tolerances.trace},
                       {"eigenvalue_floor", p.tolerances.eigenvalue_floor}};
    nlohmann::json law = {{"kind", hold_law_name(classical.hold_law)}};
    if (const auto* u = std::get_if<classical::UniformHold>(&classical.hold_law)) {
        law["lo"] = u->lo;
        law["hi"] = u->hi;
    }
    j["classical"] = {{"omega_a", classical.omega_a},
                      {"omega_b", classical.omega_b},
                      {"gamma", classical.gamma},
                      {"mean_hold", classical.mean_hold},
                      {"hold_law", law},
                      {"omega", freq.omega},
                      {"omega_prime", freq.omega_prime},
                      {"n_trajectories", n_trajectories},
                      {"n_toggles", n_toggles}};
    return j;
}

std::string usage_text() {
    return "Usage: qratchet run (--experiment NAME | --preset fig1|fig2b) [options]\n"
           "       qratchet plot DIR\n"
           "       qratchet --version\n"
           "Run 'qratchet run --help' for the full option list.\n";
}

namespace {

template <class F>
void parse_or_usage(CLI::App& app, F&& parse) {
    try {
        parse();
    } catch (const CLI::CallForHelp&) {
        throw UsageError("help requested", app.help("", CLI::AppFormatMode::All), true);
    } catch (const CLI::CallForAllHelp&) {
        throw UsageError("help requested", app.help("", CLI::AppFormatMode::All), true);
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what(), usage_text());
    }
}

// CLI11 reads config files only for the top-level app, so `run` gets an app of its own.
RunCommand parse_run_command(int argc, const char* const* argv) {
    CLI::App run{"Run one experiment and write its result files", "qratchet run"};
    run.set_config("--config", "", "TOML or INI file with option values (keys as long flag names)");
    run.allow_config_extras(CLI::config_extras_mode::error);
    Flags flags;
    register_flags(run, flags);
    std::vector<std::string> args(argv + 2, argv + argc);
    std::reverse(args.begin(), args.end());
    parse_or_usage(run, [&] { run.parse(args); });
    RunCommand cmd{build_config(flags)};
    cmd.config.validate();
    return cmd;
}

}  // namespace

Command parse_command_line(int argc, const char* const* argv) {
    if (argc <= 1) throw UsageError("no command given", usage_text());
    if (std::string_view(argv[1]) == "run") return parse_run_command(argc, argv);

    CLI::App app{"Energy growth of coupled oscillators under repeated marginalization", "qratchet"};
    app.require_subcommand(0, 1);
    bool version = false;
    app.add_flag("--version", version, "Print the version and exit");
    app.add_subcommand("run", "Run one experiment and write its result files");

    CLI::App* plot = app.add_subcommand("plot", "Write a gnuplot script for a finished run directory");
    std::string plot_dir;
    plot->add_option("dir", plot_dir, "Run directory")->required();

    parse_or_usage(app, [&] { app.parse(argc, argv); });
    if (version) return VersionCommand{};
    if (*plot) return PlotCommand{plot_dir};
    throw UsageError("no command given", usage_text());
}

}  // namespace qratchet::cli
