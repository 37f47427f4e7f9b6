// runner.hpp: executes one configured experiment and persists its results

#pragma once

#include "cli/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace qratchet::cli {

// Output files per experiment (all CSVs have one header row, values printed with %.17g):
//
//   quantum-chain, quantum-ensemble
//     growth.csv       encounter,mean_n_a,mean_n_b,free_energy,purity_a,purity_b,tail_mass
//     energy.csv       encounter,energy_start,energy_contact_end,energy_reproduct,delta_free,
//                      delta_interaction,interaction_energy
//     dist_final.csv   n,p_a,p_b                                   (max(levels_a, levels_b) rows)
//     fits.csv         fit,slope,intercept,r_squared,first,last,status   (4 rows)
//     plot.gp
//   shorttime
//     shorttime.csv    t,direct,series,ratio
//     fits.csv         quantity,value
//   bogoliubov-validate
//     bogoliubov.csv   variant,theta,omega_A,omega_B,gamma,cross_term_residual,frequency_residual,
//                      canonical_residual,spectrum_gap_mismatch,ground_energy_mismatch
//     contact.csv      quantity,analytic,numeric,abs_difference
//     support_audit.csv threshold,mass_a_above,mass_b_above,mass_total_above,mean_n_a,mean_n_b
//   classical-toggle, classical-freq
//     classical.csv    toggle,mean_logE,var_logE,mean_E,ratio
//     lognormal_check.csv toggle,ratio,predicted_ratio,stderr,z
//     fits.csv         fit,slope,intercept,r_squared,first,last,status   (3 rows)
//     plot.gp
//
// Every run also writes metadata.json. It is written once, after the result files are
// staged as *.partial and before they are renamed into place.
std::vector<std::string> output_files(Experiment e);

// Validates, runs and writes. Returns the process exit status; diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& err);

// Formats a double with 17 significant digits.
std::string format_double(double v);

}  // namespace qratchet::cli
