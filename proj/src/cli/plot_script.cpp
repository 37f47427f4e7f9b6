// plot_script.cpp

#include "cli/plot_script.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace qratchet::cli {

namespace fs = std::filesystem;

namespace {

// Data rows of a CSV with its header dropped and commas turned into spaces, ready to
// paste into a gnuplot datablock.
std::string datablock(const fs::path& csv, const std::string& name) {
    std::ifstream in(csv);
    if (!in) throw MissingInput("cannot read " + csv.string());
    std::string line;
    std::getline(in, line);
    std::ostringstream out;
    out << '$' << name << " << EOD\n";
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        for (char& c : line)
            if (c == ',') c = ' ';
        out << line << '\n';
    }
    out << "EOD\n";
    return out.str();
}

std::string quantum_script(const fs::path& dir) {
    std::ostringstream s;
    s << "# Final Fock distributions and excitation growth.\n"
      << "# Usage: gnuplot plot.gp  (writes distributions.png and growth.png)\n\n"
      << datablock(dir / "dist_final.csv", "dist") << '\n'
      << datablock(dir / "growth.csv", "growth") << '\n'
      << "set terminal pngcairo size 1200,480 enhanced\n"
      << "set key top right\n"
      << "set grid\n\n"
      << "set output 'distributions.png'\n"
      << "set multiplot layout 1,2 title 'Probability distribution of bosons'\n"
      << "set logscale y\n"
      << "set format y '10^{%L}'\n"
      << "set xlabel 'n'\n"
      << "set ylabel 'P(n)'\n"
      << "set title 'oscillator A'\n"
      << "plot $dist using 1:($2 > 0 ? $2 : 1/0) with linespoints pt 6 title 'A'\n"
      << "set title 'oscillator B'\n"
      << "plot $dist using 1:($3 > 0 ? $3 : 1/0) with linespoints pt 2 title 'B'\n"
      << "unset multiplot\n\n"
      << "set output 'growth.png'\n"
      << "set terminal pngcairo size 720,480 enhanced\n"
      << "unset logscale y\n"
      << "set format y '%g'\n"
      << "set title 'Value of the average excitation level'\n"
      << "set xlabel 'encounter'\n"
      << "set ylabel '<n>'\n"
      << "plot $growth using 1:2 with points pt 6 title 'A', \\\n"
      << "     $growth using 1:3 with points pt 2 title 'B'\n"
      << "unset output\n";
    return s.str();
}

std::string classical_script(const fs::path& dir) {
    std::ostringstream s;
    s << "# Log-energy random walk of the classical analogue.\n"
      << "# Usage: gnuplot plot.gp  (writes classical.png)\n\n"
      << datablock(dir / "classical.csv", "walk") << '\n'
      << "set terminal pngcairo size 1200,480 enhanced\n"
      << "set grid\n"
      << "set output 'classical.png'\n"
      << "set multiplot layout 1,2\n"
      << "set xlabel 'toggle'\n"
      << "set title 'var log E'\n"
      << "plot $walk using 1:3 with lines title 'var(log E)'\n"
      << "set title 'log <E> and <log E>'\n"
      << "plot $walk using 1:(log($4)) with lines title 'log <E>', \\\n"
      << "     $walk using 1:2 with lines title '<log E>'\n"
      << "unset multiplot\n"
      << "unset output\n";
    return s.str();
}

}  // namespace

fs::path emit_plot_script(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw MissingInput("not a directory: " + dir.string());
    std::string script;
    if (fs::exists(dir / "growth.csv") && fs::exists(dir / "dist_final.csv")) {
        script = quantum_script(dir);
    } else if (fs::exists(dir / "classical.csv")) {
        script = classical_script(dir);
    } else {
        throw MissingInput("no growth.csv + dist_final.csv or classical.csv in " + dir.string());
    }
    const fs::path out = dir / "plot.gp";
    std::ofstream f(out, std::ios::binary);
    f << script;
    if (!f) throw MissingInput("cannot write " + out.string());
    return out;
}

}  // namespace qratchet::cli
