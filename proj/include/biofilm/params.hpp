#pragma once

#include <array>
#include <cstddef>
#include <string>

namespace biofilm {

// The eight model parameters in canonical order (d1, d2, K1, K2, K3, K4, a, b).
//
// Admissible ranges: d1, d2, K1, K3, K4 > 0; K2 >= 0; a >= 0; b >= 1.
// Construction validates and throws domain_error on any violation, so a
// ParamVector held by value is always admissible.
class ParamVector {
public:
    ParamVector(double d1, double d2, double K1, double K2, double K3, double K4,
                double a, double b);

    // Build from values in canonical order, with the same validation.
    static ParamVector from_array(const std::array<double, 8>& v);

    // True iff the raw values satisfy the admissibility bounds.
    static bool admissible(const std::array<double, 8>& v, std::string* why = nullptr);

    double d1() const { return v_[0]; }
    double d2() const { return v_[1]; }
    double K1() const { return v_[2]; }
    double K2() const { return v_[3]; }
    double K3() const { return v_[4]; }
    double K4() const { return v_[5]; }
    double a() const { return v_[6]; }
    double b() const { return v_[7]; }

    double operator[](std::size_t i) const { return v_[i]; }
    const std::array<double, 8>& values() const { return v_; }

    static const std::array<const char*, 8>& names();

private:
    std::array<double, 8> v_;
};

} // namespace biofilm
