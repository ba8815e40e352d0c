#pragma once

#include <functional>
#include <string>
#include <vector>

#include "biofilm/grid.hpp"

namespace biofilm {

using TimeFn = std::function<double(double)>;
using SpaceFn = std::function<double(double)>;
using SpaceTimeFn = std::function<double(double, double)>;

// Boundary data, initial data and sources for one forward problem:
//
//   S(0,t) = mu1(t),  S(1,t) = mu2(t),  M(0,t) = mu3(t),  M(1,t) = mu4(t),
//   S(x,0) = S0(x),   M(x,0) = M0(x),   sources F(x,t), G(x,t).
//
// Fields are plain callables; tabulated data is wrapped through the
// tabulated_* factories below, which only answer at their own grid nodes.
struct ProblemData {
    TimeFn mu1, mu2, mu3, mu4;
    SpaceFn S0, M0;
    SpaceTimeFn F, G;

    // Corner compatibility: S0(0)=mu1(0), S0(1)=mu2(0), M0(0)=mu3(0),
    // M0(1)=mu4(0), each within 1e-12. Throws contract_error otherwise.
    void check_compatibility() const;
};

// Wrap an I*N table (row-major in t then x: index n*I + i) as a space-time
// callable. Evaluation snaps (x,t) to the nearest node of `grid` and throws
// domain_error if the point is not a node (within 1e-9); no interpolation.
SpaceTimeFn tabulated_field(const Grid& grid, std::vector<double> values);

// Same idea for pure space (values at the I nodes) and pure time profiles.
SpaceFn tabulated_space(const Grid& grid, std::vector<double> values);
TimeFn tabulated_time(const Grid& grid, std::vector<double> values);

// Readers for tabulated data files. Space-time tables carry the header
// "x,t,value" with one row per node, row-major in t then x (all nodes of
// t(0), then of t(1), ...); the restrictions use "x,value" (I rows in node
// order) and "t,value" (N rows in level order). Every coordinate must match
// its grid node within 1e-9. Malformed input throws parse_error with the
// 1-based line number.
std::vector<double> read_space_time_table(const std::string& path, const Grid& grid);
std::vector<double> read_space_table(const std::string& path, const Grid& grid);
std::vector<double> read_time_table(const std::string& path, const Grid& grid);

} // namespace biofilm
