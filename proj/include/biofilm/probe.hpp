#pragma once

#include <functional>

#include "biofilm/field_solution.hpp"
#include "biofilm/manufactured.hpp"
#include "biofilm/problem_data.hpp"

namespace biofilm {

// Uniform access to everything the closed-form recovery reads off a solution:
// field values, the derivatives entering the two equations, and the spatial
// integrals entering the biomass balance. Two backends:
//
//   from_case      exact fields and analytic derivatives; integrals by
//                  composite Simpson on 401 nodes; any (x,t) in the closed
//                  domain is valid.
//   from_solution  a computed field; (x,t) must snap to a grid node (1e-9),
//                  derivatives are centered differences, so x must be an
//                  interior node and t an interior level; integrals use the
//                  trapezoid rule over the grid nodes.
class FieldProbe {
public:
    static FieldProbe from_case(const ManufacturedCase& mcase);
    static FieldProbe from_solution(FieldSolution solution, ProblemData data);

    double S(double x, double t) const { return S_(x, t); }
    double M(double x, double t) const { return M_(x, t); }
    double dS_dt(double x, double t) const { return dS_dt_(x, t); }
    double dM_dt(double x, double t) const { return dM_dt_(x, t); }
    double dM_dx(double x, double t) const { return dM_dx_(x, t); }
    double d2S_dx2(double x, double t) const { return d2S_dx2_(x, t); }
    double d2M_dx2(double x, double t) const { return d2M_dx2_(x, t); }
    double F(double x, double t) const { return F_(x, t); }
    double G(double x, double t) const { return G_(x, t); }

    double biomass(double t) const { return biomass_(t); }            // int M dx
    double biomass_rate(double t) const { return biomass_rate_(t); }  // d/dt of that
    double forcing_integral(double t) const { return forcing_integral_(t); }
    // int S*M/(K4+S) dx for a trial K4.
    double monod_integral(double t, double K4) const { return monod_integral_(t, K4); }

private:
    FieldProbe() = default;

    SpaceTimeFn S_, M_, dS_dt_, dM_dt_, dM_dx_, d2S_dx2_, d2M_dx2_, F_, G_;
    TimeFn biomass_, biomass_rate_, forcing_integral_;
    std::function<double(double, double)> monod_integral_;
};

} // namespace biofilm
