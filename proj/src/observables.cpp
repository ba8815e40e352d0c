#include "biofilm/observables.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "biofilm/errors.hpp"
#include "csv_util.hpp"

namespace biofilm {

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::synthetic_exact: return "synthetic-exact";
        case Provenance::synthetic_solver: return "synthetic-solver";
        case Provenance::file: return "file";
    }
    return "unknown";
}

void MeasurementSet::validate() const {
    if (times.empty())
        throw contract_error("measurement set is empty");
    if (flux.size() != times.size())
        throw contract_error("flux column length does not match the time column");
    if (!biomass.empty() && biomass.size() != times.size())
        throw contract_error("biomass column length does not match the time column");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k]) || !std::isfinite(flux[k]) ||
            (!biomass.empty() && !std::isfinite(biomass[k])))
            throw contract_error("measurement values must be finite");
        if (k > 0 && !(times[k] > times[k - 1]))
            throw contract_error("measurement times must be strictly increasing");
    }
}

std::vector<double> boundary_flux(const FieldSolution& sol, double d1) {
    const int I = sol.grid.I;
    if (I < 4)
        throw contract_error("boundary flux stencil needs at least 4 spatial nodes");
    std::vector<double> q(sol.grid.N);
    const double scale = -d1 / (2.0 * sol.grid.dx());
    for (int n = 0; n < sol.grid.N; ++n)
        q[n] = scale * (-3.0 * sol.S(0, n) + 4.0 * sol.S(1, n) - sol.S(2, n));
    return q;
}

std::vector<double> biomass(const FieldSolution& sol) {
    const int I = sol.grid.I;
    std::vector<double> e(sol.grid.N);
    for (int n = 0; n < sol.grid.N; ++n) {
        if (std::abs(sol.M(0, n)) > 1e-10 || std::abs(sol.M(I - 1, n)) > 1e-10) {
            std::ostringstream os;
            os << "biomass quadrature assumes homogeneous walls, but at level " << n
               << " M(0) = " << sol.M(0, n) << ", M(1) = " << sol.M(I - 1, n);
            throw contract_error(os.str());
        }
        double sum = 0.0;
        for (int i = 1; i < I - 1; ++i) sum += sol.M(i, n);
        e[n] = sol.grid.dx() * sum;
    }
    return e;
}

MeasurementSet measure_solution(const FieldSolution& sol, double d1,
                                bool with_biomass) {
    MeasurementSet set;
    set.provenance = Provenance::synthetic_solver;
    set.times.resize(sol.grid.N);
    for (int n = 0; n < sol.grid.N; ++n) set.times[n] = sol.grid.t(n);
    set.flux = boundary_flux(sol, d1);
    if (with_biomass) set.biomass = biomass(sol);
    set.validate();
    return set;
}

MeasurementSet add_noise(const MeasurementSet& set, double level,
                         std::uint64_t seed) {
    if (level < 0)
        throw domain_error("noise level must be >= 0");
    set.validate();
    MeasurementSet out = set;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    for (double& q : out.flux) q *= 1.0 + level * unit(rng);
    for (double& e : out.biomass) e *= 1.0 + level * unit(rng);
    out.noise_level = level;
    out.noise_seed = seed;
    return out;
}

using csv::format_double;
using csv::parse_double;
using csv::split_line;

void write_measurements(const MeasurementSet& set, const std::string& path) {
    set.validate();
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw error("cannot open '" + path + "' for writing");
    out << (set.has_biomass() ? "t,q0,EM\n" : "t,q0\n");
    for (std::size_t k = 0; k < set.times.size(); ++k) {
        out << format_double(set.times[k]) << ',' << format_double(set.flux[k]);
        if (set.has_biomass()) out << ',' << format_double(set.biomass[k]);
        out << '\n';
    }
    if (!out)
        throw error("failed while writing '" + path + "'");
}

MeasurementSet read_measurements(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw error("cannot open '" + path + "' for reading");

    MeasurementSet set;
    set.provenance = Provenance::file;

    std::string line;
    long lineno = 0;
    bool with_biomass = false;

    if (!std::getline(in, line))
        throw parse_error("empty measurement file", 0);
    ++lineno;
    const auto header = split_line(line);
    if (header.size() == 3 && header[0] == "t" && header[1] == "q0" &&
        header[2] == "EM")
        with_biomass = true;
    else if (header.size() == 2 && header[0] == "t" && header[1] == "q0")
        with_biomass = false;
    else
        throw parse_error("expected header 't,q0' or 't,q0,EM'", lineno);

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_line(line);
        const std::size_t want = with_biomass ? 3 : 2;
        if (fields.size() != want) {
            std::ostringstream os;
            os << "expected " << want << " fields, got " << fields.size();
            throw parse_error(os.str(), lineno);
        }
        set.times.push_back(parse_double(fields[0], lineno));
        set.flux.push_back(parse_double(fields[1], lineno));
        if (with_biomass) set.biomass.push_back(parse_double(fields[2], lineno));
    }

    try {
        set.validate();
    } catch (const contract_error& e) {
        throw parse_error(std::string("invalid measurement data: ") + e.what(), 0);
    }
    return set;
}

} // namespace biofilm
