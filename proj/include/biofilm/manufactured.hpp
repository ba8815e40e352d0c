#pragma once

#include <optional>
#include <string>

#include "biofilm/grid.hpp"
#include "biofilm/observables.hpp"
#include "biofilm/params.hpp"
#include "biofilm/problem_data.hpp"

namespace biofilm {

// A forward problem with a known closed-form solution, used for verification
// and as the data source for the recovery pipelines. Alongside the exact
// fields it carries their analytic derivatives, the exact boundary substrate
// flux, and (when available in closed form) the exact total biomass.
struct ManufacturedCase {
    std::string name;
    ParamVector params;
    double final_time;
    ProblemData data;

    SpaceTimeFn exact_S, exact_M;
    SpaceTimeFn dS_dt, dM_dt;     // time derivatives
    SpaceTimeFn dS_dx, dM_dx;     // first space derivatives
    SpaceTimeFn d2S_dx2, d2M_dx2; // second space derivatives

    TimeFn exact_flux;                  // q0(t) = -d1 * dS/dx(0, t)
    std::optional<TimeFn> exact_biomass; // E_M(t) when known in closed form

    // True when max M = 1 is attained somewhere on the closure of the
    // space-time domain (admitted only because a = 0 removes the singularity).
    bool m_attains_one = false;
};

// S = 1 + x(1-x)(t+1), M = x(1-x)e^{-t} on [0,1]x[0,1];
// parameters (d1,d2,K1,K2,K3,K4,a,b) = (1,1,1,1,1,1,1,2).
ManufacturedCase example1();

// S = 1 - M, M = 4x(1-x)te^{1-t} on [0,1]x[0,1];
// parameters (1,1,1,0,1,1,0,1). M reaches 1 at (x,t) = (1/2, 1).
ManufacturedCase example2();

// Sample the closed-form observables of a case at every time level of the
// grid (provenance synthetic_exact). Asking for biomass when the case has no
// closed-form E_M throws contract_error.
MeasurementSet exact_measurements(const ManufacturedCase& mcase,
                                  const Grid& grid, bool with_biomass);

} // namespace biofilm
