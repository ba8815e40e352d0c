#include "biofilm/problem_data.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "biofilm/errors.hpp"
#include "csv_util.hpp"

namespace biofilm {

namespace {

// Map a coordinate to the nearest index on an n-point uniform grid over
// [0, extent]; reject anything farther than `tol` from that node.
int snap_index(double value, int count, double extent, double tol, const char* what) {
    const double step = extent / (count - 1);
    int idx = static_cast<int>(std::floor(value / step + 0.5));
    if (idx < 0) idx = 0;
    if (idx > count - 1) idx = count - 1;
    const double node = extent * static_cast<double>(idx) / (count - 1);
    if (std::fabs(value - node) > tol) {
        std::ostringstream os;
        os << "tabulated field evaluated off-grid: " << what << " = " << value
           << " is not a node (nearest " << node << ")";
        throw domain_error(os.str());
    }
    return idx;
}

constexpr double kSnapTol = 1e-9;

} // namespace

void ProblemData::check_compatibility() const {
    struct Corner {
        const char* label;
        double lhs, rhs;
    };
    const Corner corners[] = {
        {"S0(0) vs mu1(0)", S0(0.0), mu1(0.0)},
        {"S0(1) vs mu2(0)", S0(1.0), mu2(0.0)},
        {"M0(0) vs mu3(0)", M0(0.0), mu3(0.0)},
        {"M0(1) vs mu4(0)", M0(1.0), mu4(0.0)},
    };
    for (const auto& c : corners) {
        if (std::fabs(c.lhs - c.rhs) > 1e-12) {
            std::ostringstream os;
            os << "incompatible corner data: " << c.label << " differ by "
               << std::fabs(c.lhs - c.rhs);
            throw contract_error(os.str());
        }
    }
}

SpaceTimeFn tabulated_field(const Grid& grid, std::vector<double> values) {
    if (static_cast<int>(values.size()) != grid.I * grid.N)
        throw domain_error("tabulated field size does not match grid (need I*N values)");
    const int I = grid.I, N = grid.N;
    const double T = grid.T;
    return [I, N, T, v = std::move(values)](double x, double t) {
        const int i = snap_index(x, I, 1.0, kSnapTol, "x");
        const int n = snap_index(t, N, T, kSnapTol, "t");
        return v[static_cast<std::size_t>(n) * I + i];
    };
}

SpaceFn tabulated_space(const Grid& grid, std::vector<double> values) {
    if (static_cast<int>(values.size()) != grid.I)
        throw domain_error("tabulated space profile needs exactly I values");
    const int I = grid.I;
    return [I, v = std::move(values)](double x) {
        return v[snap_index(x, I, 1.0, kSnapTol, "x")];
    };
}

TimeFn tabulated_time(const Grid& grid, std::vector<double> values) {
    if (static_cast<int>(values.size()) != grid.N)
        throw domain_error("tabulated time profile needs exactly N values");
    const int N = grid.N;
    const double T = grid.T;
    return [N, T, v = std::move(values)](double t) {
        return v[snap_index(t, N, T, kSnapTol, "t")];
    };
}

namespace {

// Shared scaffolding for the three table formats: checks the header, applies
// `row` to each data line, and checks the row count.
void read_table(const std::string& path, const std::string& header,
                std::size_t expected_rows,
                const std::function<void(const std::vector<std::string>&, long)>& row) {
    std::ifstream in(path);
    if (!in)
        throw error("cannot open '" + path + "' for reading");

    std::string line;
    long lineno = 0;
    if (!std::getline(in, line))
        throw parse_error("empty table file", 0);
    ++lineno;
    {
        std::string joined;
        for (const auto& f : csv::split_line(line)) {
            if (!joined.empty()) joined += ',';
            joined += f;
        }
        if (joined != header)
            throw parse_error("expected header '" + header + "'", lineno);
    }

    const std::size_t columns = csv::split_line(header).size();
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto fields = csv::split_line(line);
        if (fields.size() != columns) {
            std::ostringstream os;
            os << "expected " << columns << " fields, got " << fields.size();
            throw parse_error(os.str(), lineno);
        }
        row(fields, lineno);
        ++rows;
    }
    if (rows != expected_rows) {
        std::ostringstream os;
        os << "expected " << expected_rows << " data rows, got " << rows;
        throw parse_error(os.str(), 0);
    }
}

void check_coordinate(double got, double want, const char* what, long line) {
    if (std::fabs(got - want) > kSnapTol) {
        std::ostringstream os;
        os << what << " = " << got << " does not match the expected grid node "
           << want;
        throw parse_error(os.str(), line);
    }
}

} // namespace

std::vector<double> read_space_time_table(const std::string& path,
                                          const Grid& grid) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(grid.I) * grid.N);
    read_table(path, "x,t,value", static_cast<std::size_t>(grid.I) * grid.N,
               [&](const std::vector<std::string>& f, long line) {
                   const std::size_t k = values.size();
                   const int i = static_cast<int>(k % grid.I);
                   const int n = static_cast<int>(k / grid.I);
                   check_coordinate(csv::parse_double(f[0], line), grid.x(i), "x", line);
                   check_coordinate(csv::parse_double(f[1], line), grid.t(n), "t", line);
                   values.push_back(csv::parse_double(f[2], line));
               });
    return values;
}

std::vector<double> read_space_table(const std::string& path, const Grid& grid) {
    std::vector<double> values;
    values.reserve(grid.I);
    read_table(path, "x,value", static_cast<std::size_t>(grid.I),
               [&](const std::vector<std::string>& f, long line) {
                   const int i = static_cast<int>(values.size());
                   check_coordinate(csv::parse_double(f[0], line), grid.x(i), "x", line);
                   values.push_back(csv::parse_double(f[1], line));
               });
    return values;
}

std::vector<double> read_time_table(const std::string& path, const Grid& grid) {
    std::vector<double> values;
    values.reserve(grid.N);
    read_table(path, "t,value", static_cast<std::size_t>(grid.N),
               [&](const std::vector<std::string>& f, long line) {
                   const int n = static_cast<int>(values.size());
                   check_coordinate(csv::parse_double(f[0], line), grid.t(n), "t", line);
                   values.push_back(csv::parse_double(f[1], line));
               });
    return values;
}

} // namespace biofilm
