#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "biofilm/field_solution.hpp"

namespace biofilm {

// Where a measurement series came from; kept for reporting, never serialized.
enum class Provenance { synthetic_exact, synthetic_solver, file };

std::string to_string(Provenance p);

// Time series of the two scalar observables: boundary substrate flux
// q0(t) = -d1 * dS/dx(0,t) and (optionally) total biomass E_M(t). `biomass`
// is empty when only flux was measured. `noise_level` > 0 records that
// multiplicative Gaussian noise with that level and `noise_seed` was applied.
struct MeasurementSet {
    std::vector<double> times; // strictly increasing
    std::vector<double> flux;
    std::vector<double> biomass;
    Provenance provenance = Provenance::file;
    double noise_level = 0.0;
    std::uint64_t noise_seed = 0;

    bool has_biomass() const { return !biomass.empty(); }
    std::size_t size() const { return times.size(); }

    // Throws contract_error unless times are finite and strictly increasing
    // and the value columns match them in length.
    void validate() const;
};

// Boundary flux series q0(t_n) = -d1 * dS/dx(0, t_n) for every time level,
// using the second-order one-sided three-point stencil. Requires I >= 4.
std::vector<double> boundary_flux(const FieldSolution& sol, double d1);

// Total biomass series E_M(t_n) = dx * sum of interior M values. The biomass
// boundary data must be homogeneous (|M| <= 1e-10 at both walls at every
// level), otherwise this rule silently drops mass; that case throws
// contract_error.
std::vector<double> biomass(const FieldSolution& sol);

// Sample both observables at every time level of a computed solution; d1 is
// the diffusivity the solution was computed with (it scales the flux).
MeasurementSet measure_solution(const FieldSolution& sol, double d1,
                                bool with_biomass);

// Multiplicative Gaussian noise y -> y * (1 + level * xi), xi ~ N(0,1) from
// one mt19937_64 stream seeded with `seed`; the flux column is drawn first,
// then biomass. Pure: returns a new set, the input is untouched. level = 0
// reproduces the input bitwise.
MeasurementSet add_noise(const MeasurementSet& set, double level,
                         std::uint64_t seed);

// CSV with header "t,q0" or "t,q0,EM"; values written shortest-round-trip.
void write_measurements(const MeasurementSet& set, const std::string& path);

// Parse a measurement CSV. Throws parse_error with the 1-based line number on
// malformed input; the result is validate()d before returning.
MeasurementSet read_measurements(const std::string& path);

} // namespace biofilm
