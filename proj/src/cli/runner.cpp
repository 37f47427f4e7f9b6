// runner.cpp

#include "cli/runner.hpp"

#include "cli/plot_script.hpp"
#include "qratchet/bogoliubov.hpp"
#include "qratchet/classical.hpp"
#include "qratchet/errors.hpp"
#include "qratchet/ratchet.hpp"
#include "qratchet/shorttime.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace qratchet::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Csv {
public:
    explicit Csv(std::initializer_list<std::string_view> header) {
        bool first = true;
        for (auto h : header) {
            if (!first) out_ << ',';
            out_ << h;
            first = false;
        }
        out_ << '\n';
    }

    template <class... Ts>
    void row(const Ts&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

private:
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }

    std::ostringstream out_;
};

// Files are staged in memory and on disk as *.partial; finalize() writes metadata.json and
// then renames the staged files into place.
class Output {
public:
    explicit Output(fs::path dir) : dir_(std::move(dir)) {}

    void add(const std::string& name, const std::string& content) { files_.emplace_back(name, content); }

    void finalize(const nlohmann::json& metadata) {
        fs::create_directories(dir_);
        for (const auto& [name, content] : files_) write(dir_ / (name + ".partial"), content);
        write(dir_ / "metadata.json", metadata.dump(2) + "\n");
        for (const auto& [name, content] : files_) fs::rename(dir_ / (name + ".partial"), dir_ / name);
    }

    nlohmann::json names() const {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& f : files_) out.push_back(f.first);
        return out;
    }

private:
    static void write(const fs::path& path, const std::string& content) {
        std::ofstream f(path, std::ios::binary);
        f << content;
        if (!f) throw std::runtime_error("cannot write " + path.string());
    }

    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

struct FitRow {
    std::string name;
    LineFit fit{kNaN, kNaN, kNaN};
    std::size_t first{0};
    std::size_t last{0};
    std::string status{"ok"};
};

template <class Fn>
FitRow guarded_fit(std::string name, std::size_t first, std::size_t last, Fn fn) {
    FitRow row{std::move(name), {kNaN, kNaN, kNaN}, first, last, "ok"};
    try {
        row.fit = fn();
    } catch (const NonPositiveProbability&) {
        row.status = "nonpositive_probability";
    } catch (const InvalidArgument&) {
        row.status = "insufficient_data";
    }
    return row;
}

std::string fits_csv(const std::vector<FitRow>& rows) {
    Csv csv{"fit", "slope", "intercept", "r_squared", "first", "last", "status"};
    for (const auto& r : rows) csv.row(r.name, r.fit.slope, r.fit.intercept, r.fit.r_squared, r.first, r.last, r.status);
    return csv.str();
}

nlohmann::json sb_stability(const dynamics::ModelParams& params) {
    if (params.coupling != dynamics::Coupling::SpinBoson) {
        return {{"checked", false}, {"coupling", "jc"}, {"stable", true}};
    }
    const auto m = bogoliubov::sb_normal_modes(params);
    return {{"checked", true},  {"coupling", "sb"},      {"stable", true},          {"theta", m.theta},
            {"gamma", m.gamma}, {"omega_A", m.omega_A}, {"omega_B", m.omega_B}};
}

struct RunState {
    nlohmann::json meta;
    std::vector<ratchet::EncounterRecord> records;
};

void run_quantum(const RunConfig& cfg, Output& out, RunState& state) {
    const ratchet::ProtocolSpec protocol = cfg.effective_protocol();
    state.meta["stability"] = sb_stability(protocol.params);

    auto write_results = [&] {
        const auto& recs = state.records;
        Csv growth{"encounter", "mean_n_a", "mean_n_b", "free_energy", "purity_a", "purity_b", "tail_mass"};
        Csv energy{"encounter",        "energy_start",      "energy_contact_end", "energy_reproduct",
                   "delta_free",       "delta_interaction", "interaction_energy"};
        nlohmann::json warned = nlohmann::json::array();
        double max_tail = 0.0;
        for (const auto& r : recs) {
            growth.row(r.index, r.mean_n_a, r.mean_n_b, r.free_energy, r.purity_a, r.purity_b, r.tail_mass);
            energy.row(r.index, r.energy_start, r.energy_contact_end, r.energy_reproduct, r.delta_free,
                       r.delta_interaction, r.interaction_energy);
            if (r.truncation_warning) warned.push_back(r.index);
            max_tail = std::max(max_tail, r.tail_mass);
        }
        out.add("growth.csv", growth.str());
        out.add("energy.csv", energy.str());
        state.meta["truncation"]["warned_encounters"] = warned;
        state.meta["truncation"]["warnings"] = warned.size();
        state.meta["truncation"]["max_tail_mass"] = max_tail;
        if (recs.empty()) return;

        const auto& last = recs.back();
        Csv dist{"n", "p_a", "p_b"};
        const std::size_t rows = std::max(last.dist_a.size(), last.dist_b.size());
        for (std::size_t n = 0; n < rows; ++n) {
            dist.row(n, n < last.dist_a.size() ? last.dist_a[n] : 0.0, n < last.dist_b.size() ? last.dist_b[n] : 0.0);
        }
        out.add("dist_final.csv", dist.str());

        std::vector<FitRow> fits;
        for (const auto& [name, d] : {std::pair<std::string, const std::vector<double>*>{"dist_a", &last.dist_a},
                                      std::pair<std::string, const std::vector<double>*>{"dist_b", &last.dist_b}}) {
            ratchet::FitRange range = ratchet::default_fit_range(d->size());
            if (cfg.fit_first) range.first = *cfg.fit_first;
            if (cfg.fit_last) range.last = *cfg.fit_last;
            fits.push_back(guarded_fit(name, range.first, range.last,
                                       [&, d = d] { return ratchet::fit_exponential(*d, range); }));
        }
        std::optional<ratchet::GrowthFit> growth_fit;
        const std::size_t first = cfg.growth_transient + 1;
        auto na = guarded_fit("growth_n_a", first, recs.size(), [&] {
            growth_fit = ratchet::fit_linear_growth(recs, cfg.growth_transient);
            return growth_fit->n_a;
        });
        fits.push_back(na);
        FitRow nb{"growth_n_b", {kNaN, kNaN, kNaN}, first, recs.size(), na.status};
        if (growth_fit) nb.fit = growth_fit->n_b;
        fits.push_back(nb);
        out.add("fits.csv", fits_csv(fits));
    };

    try {
        ratchet::run(protocol, [&](const ratchet::EncounterRecord& r) { state.records.push_back(r); });
    } catch (const TruncationOverflow& e) {
        state.meta["truncation"]["overflow_encounter"] = e.encounter();
        state.meta["truncation"]["overflow_tail_mass"] = e.tail_mass();
        write_results();
        throw;
    }
    write_results();
}

void run_shorttime(const RunConfig& cfg, Output& out, RunState& state) {
    const auto& p = cfg.protocol;
    state.meta["stability"] = sb_stability(p.params);
    const auto factors = shorttime::oscillator_factors(
        p.params.omega_a, p.params.omega_b, p.params.g,
        ratchet::prepare(fock::Factor::A, p.initial_a, p.spec.levels_a),
        ratchet::prepare(fock::Factor::B, p.initial_b, p.spec.levels_b));
    const auto cmp = shorttime::series_vs_direct(factors, cfg.t_grid);

    Csv rows{"t", "direct", "series", "ratio"};
    for (const auto& r : cmp.rows) rows.row(r.t, r.direct, r.series, r.ratio);
    out.add("shorttime.csv", rows.str());

    // [V, [H, V]] for the oscillator factors is |g| times the truncated [a, a†]; the
    // interior deviation from |g| I measures round-off only.
    auto interior_error = [&](const fock::Operator& v, const fock::Operator& h) {
        const auto m = shorttime::double_commutator(v, h).matrix();
        double err = 0.0;
        const Eigen::Index n = m.rows();
        for (Eigen::Index i = 0; i + 1 < n; ++i)
            for (Eigen::Index j = 0; j + 1 < n; ++j)
                err = std::max(err, std::abs(m(i, j) - (i == j ? std::abs(p.params.g) : 0.0)));
        return err;
    };
    Csv fits{"quantity", "value"};
    fits.row("c2_series", cmp.c2_series);
    fits.row("c2_fitted", cmp.c2_fitted);
    fits.row("c3_fitted", cmp.c3_fitted);
    fits.row("c2_relative_difference",
             cmp.c2_series != 0.0 ? std::abs(cmp.c2_fitted - cmp.c2_series) / std::abs(cmp.c2_series) : kNaN);
    fits.row("double_commutator_interior_error_a", interior_error(factors.v_a, factors.h_a));
    fits.row("double_commutator_interior_error_b", interior_error(factors.v_b, factors.h_b));
    out.add("fits.csv", fits.str());
}

void run_bogoliubov(const RunConfig& cfg, Output& out, RunState& state) {
    const auto& p = cfg.protocol;
    state.meta["stability"] = sb_stability(p.params);
    const auto modes = bogoliubov::sb_normal_modes(p.params);
    const auto printed = bogoliubov::sb_normal_modes_printed(p.params);

    Csv table{"variant",
              "theta",
              "omega_A",
              "omega_B",
              "gamma",
              "cross_term_residual",
              "frequency_residual",
              "canonical_residual",
              "spectrum_gap_mismatch",
              "ground_energy_mismatch"};
    for (const auto& [name, m] :
         {std::pair<const char*, const bogoliubov::NormalModes*>{"stiffness", &modes}, {"printed", &printed}}) {
        const auto rep = bogoliubov::validate_diagonalization(*m, p.params, p.spec);
        table.row(name, m->theta, m->omega_A, m->omega_B, m->gamma, rep.cross_term_residual, rep.frequency_residual,
                  rep.canonical_residual, rep.spectrum_gap_mismatch.value_or(kNaN),
                  rep.ground_energy_mismatch.value_or(kNaN));
    }
    out.add("bogoliubov.csv", table.str());

    const std::size_t n_a = std::get<ratchet::FockInit>(p.initial_a).n;
    const std::size_t n_b = std::get<ratchet::FockInit>(p.initial_b).n;
    const auto coeffs = bogoliubov::heisenberg_coeffs(modes, p.contact_time);
    const auto analytic = bogoliubov::number_via_coeffs(n_a, n_b, coeffs);
    const auto audit = bogoliubov::support_audit(p.params, p.spec, p.contact_time, n_a, n_b);

    Csv contact{"quantity", "analytic", "numeric", "abs_difference"};
    contact.row("mean_n_a", analytic.mean_n_a, audit.mean_n_a, std::abs(analytic.mean_n_a - audit.mean_n_a));
    contact.row("mean_n_b", analytic.mean_n_b, audit.mean_n_b, std::abs(analytic.mean_n_b - audit.mean_n_b));
    contact.row("commutator_error_a", coeffs.commutator_error_a(), 0.0, std::abs(coeffs.commutator_error_a()));
    contact.row("commutator_error_b", coeffs.commutator_error_b(), 0.0, std::abs(coeffs.commutator_error_b()));
    out.add("contact.csv", contact.str());

    Csv support{"threshold", "mass_a_above", "mass_b_above", "mass_total_above", "mean_n_a", "mean_n_b"};
    support.row(audit.threshold, audit.mass_a_above, audit.mass_b_above, audit.mass_total_above, audit.mean_n_a,
                audit.mean_n_b);
    out.add("support_audit.csv", support.str());
}

void write_classical(const std::vector<classical::TrajectoryStats>& ensemble, Output& out) {
    const auto diag = classical::lognormal_diagnostics(ensemble);
    const auto walk = classical::summarize_walk(diag);
    const std::size_t steps = diag.mean_e.size();

    Csv agg{"toggle", "mean_logE", "var_logE", "mean_E", "ratio"};
    Csv check{"toggle", "ratio", "predicted_ratio", "stderr", "z"};
    for (std::size_t k = 0; k < steps; ++k) {
        agg.row(k, diag.mean_log_e[k], diag.var_log_e[k], diag.mean_e[k], diag.ratio[k]);
        const double se = diag.difference_stderr[k];
        // While every trajectory still has the same energy the error is pure round-off.
        const double z = se > 1e-12 * diag.ratio[k] ? (diag.ratio[k] - diag.predicted_ratio[k]) / se : kNaN;
        check.row(k, diag.ratio[k], diag.predicted_ratio[k], se, z);
    }
    out.add("classical.csv", agg.str());
    out.add("lognormal_check.csv", check.str());
    out.add("fits.csv", fits_csv({{"var_logE", walk.var_fit, 0, steps, "ok"},
                                  {"log_mean_E", walk.log_mean_fit, 0, steps, "ok"},
                                  {"mean_logE", walk.drift_fit, 0, steps, "ok"}}));
}

void run_classical(const RunConfig& cfg, Output& out, RunState& state) {
    if (cfg.experiment == Experiment::ClassicalToggle) {
        const auto params = cfg.effective_classical();
        const classical::SegmentPropagator prop(params);
        state.meta["stability"] = {{"checked", true},
                                   {"stable", true},
                                   {"mode_frequency_1", prop.mode_frequency(0)},
                                   {"mode_frequency_2", prop.mode_frequency(1)}};
        write_classical(classical::run_toggle_ensemble(params, cfg.n_trajectories, cfg.n_toggles, {}, cfg.threads),
                        out);
    } else {
        const auto params = cfg.effective_freq();
        state.meta["stability"] = {{"checked", false}, {"stable", true}};
        write_classical(
            classical::run_freq_switch_ensemble(params, cfg.n_trajectories, cfg.n_toggles, 1.0, 0.0, cfg.threads), out);
    }
}

bool emits_plot(Experiment e) {
    return e == Experiment::QuantumChain || e == Experiment::QuantumEnsemble || e == Experiment::ClassicalToggle ||
           e == Experiment::ClassicalFreq;
}

int status_for(const std::exception& e) {
    if (dynamic_cast<const TruncationOverflow*>(&e)) return exit_code::truncation;
    if (dynamic_cast<const UnstableCoupling*>(&e)) return exit_code::instability;
    if (dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const SpaceMismatch*>(&e) ||
        dynamic_cast<const InvalidState*>(&e) || dynamic_cast<const NonPositiveProbability*>(&e)) {
        return exit_code::validation;
    }
    return exit_code::failure;
}

const char* status_name(int code) {
    switch (code) {
        case exit_code::ok: return "ok";
        case exit_code::truncation: return "truncation_overflow";
        case exit_code::instability: return "unstable";
        case exit_code::validation: return "invalid";
        default: return "failed";
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> output_files(Experiment e) {
    switch (e) {
        case Experiment::QuantumChain:
        case Experiment::QuantumEnsemble:
            return {"growth.csv", "energy.csv", "dist_final.csv", "fits.csv", "metadata.json", "plot.gp"};
        case Experiment::ShortTime: return {"shorttime.csv", "fits.csv", "metadata.json"};
        case Experiment::BogoliubovValidate:
            return {"bogoliubov.csv", "contact.csv", "support_audit.csv", "metadata.json"};
        case Experiment::ClassicalToggle:
        case Experiment::ClassicalFreq:
            return {"classical.csv", "lognormal_check.csv", "fits.csv", "metadata.json", "plot.gp"};
    }
    return {};
}

int run(const RunConfig& cfg, std::ostream& err) {
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        err << "qratchet: " << e.what() << "\n";
        return status_for(e);
    }

    RunState state;
    state.meta["version"] = QRATCHET_VERSION;
    state.meta["experiment"] = to_string(cfg.experiment);
    state.meta["seed"] = cfg.seed;
    state.meta["config"] = cfg.to_json();
    state.meta["started_at"] = utc_now();
    state.meta["truncation"] = {{"warnings", 0},
                                {"warned_encounters", nlohmann::json::array()},
                                {"max_tail_mass", 0.0},
                                {"overflow_encounter", nullptr},
                                {"overflow_tail_mass", nullptr}};
    state.meta["stability"] = {{"checked", false}};

    Output out(cfg.output_dir);
    int code = exit_code::ok;
    std::string message;
    try {
        switch (cfg.experiment) {
            case Experiment::QuantumChain:
            case Experiment::QuantumEnsemble: run_quantum(cfg, out, state); break;
            case Experiment::ShortTime: run_shorttime(cfg, out, state); break;
            case Experiment::BogoliubovValidate: run_bogoliubov(cfg, out, state); break;
            case Experiment::ClassicalToggle:
            case Experiment::ClassicalFreq: run_classical(cfg, out, state); break;
        }
    } catch (const std::exception& e) {
        code = status_for(e);
        message = e.what();
        if (code == exit_code::instability) state.meta["stability"]["stable"] = false;
    }

    state.meta["status"] = status_name(code);
    state.meta["partial"] = code != exit_code::ok;
    state.meta["error"] = message.empty() ? nlohmann::json() : nlohmann::json(message);
    state.meta["files"] = out.names();
    state.meta["finished_at"] = utc_now();
    try {
        out.finalize(state.meta);
        if (code == exit_code::ok && emits_plot(cfg.experiment)) emit_plot_script(cfg.output_dir);
    } catch (const std::exception& e) {
        err << "qratchet: writing results failed: " << e.what() << "\n";
        return exit_code::failure;
    }
    if (code != exit_code::ok) err << "qratchet: " << message << "\n";
    return code;
}

}  // namespace qratchet::cli
