#include "biofilm/params.hpp"

#include <cmath>
#include <sstream>

#include "biofilm/errors.hpp"

namespace biofilm {

const std::array<const char*, 8>& ParamVector::names() {
    static const std::array<const char*, 8> n = {"d1", "d2", "K1", "K2",
                                                 "K3", "K4", "a",  "b"};
    return n;
}

bool ParamVector::admissible(const std::array<double, 8>& v, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    for (std::size_t i = 0; i < 8; ++i) {
        if (!std::isfinite(v[i])) return fail(std::string(names()[i]) + " is not finite");
    }
    if (!(v[0] > 0)) return fail("d1 must be > 0");
    if (!(v[1] > 0)) return fail("d2 must be > 0");
    if (!(v[2] > 0)) return fail("K1 must be > 0");
    if (!(v[3] >= 0)) return fail("K2 must be >= 0");
    if (!(v[4] > 0)) return fail("K3 must be > 0");
    if (!(v[5] > 0)) return fail("K4 must be > 0");
    if (!(v[6] >= 0)) return fail("a must be >= 0");
    if (!(v[7] >= 1)) return fail("b must be >= 1");
    return true;
}

ParamVector::ParamVector(double d1, double d2, double K1, double K2, double K3,
                         double K4, double a, double b)
    : v_{d1, d2, K1, K2, K3, K4, a, b} {
    std::string why;
    if (!admissible(v_, &why)) {
        std::ostringstream os;
        os << "inadmissible parameter vector: " << why;
        throw domain_error(os.str());
    }
}

ParamVector ParamVector::from_array(const std::array<double, 8>& v) {
    return ParamVector(v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]);
}

} // namespace biofilm
