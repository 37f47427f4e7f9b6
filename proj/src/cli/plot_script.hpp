// plot_script.hpp: gnuplot script for a finished run directory

#pragma once

#include "qratchet/errors.hpp"

#include <filesystem>

namespace qratchet::cli {

class MissingInput : public Error {
public:
    using Error::Error;
};

// Reads growth.csv + dist_final.csv (quantum runs) or classical.csv (classical runs) and
// writes dir/plot.gp with the data inlined, so the script runs from any directory.
// Quantum runs get a two-panel log-scale distribution figure and a growth figure with
// A drawn as circles and B as crosses. Throws MissingInput when neither set is present.
std::filesystem::path emit_plot_script(const std::filesystem::path& dir);

}  // namespace qratchet::cli
