#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "biofilm/direct_recovery.hpp"
#include "biofilm/probe.hpp"

using namespace biofilm;

namespace {

constexpr double kPi = 3.14159265358979323846;

// S = 1 + cos(pi x) e^{-t}, M = 0, d1 = 2: the substrate equation decouples
// and stage 1 applies at every point (M vanishes identically).
ManufacturedCase cosine_case() {
    ManufacturedCase c = example1(); // reuse the shell; every field is replaced
    c.name = "cosine";
    c.params = ParamVector{2, 1, 1, 1, 1, 1, 1, 2};
    c.final_time = 1.0;
    c.exact_biomass = std::nullopt;
    c.m_attains_one = false;
    c.exact_S = [](double x, double t) { return 1.0 + std::cos(kPi * x) * std::exp(-t); };
    c.exact_M = [](double, double) { return 0.0; };
    c.dS_dt = [](double x, double t) { return -std::cos(kPi * x) * std::exp(-t); };
    c.dM_dt = [](double, double) { return 0.0; };
    c.dS_dx = [](double x, double t) { return -kPi * std::sin(kPi * x) * std::exp(-t); };
    c.dM_dx = [](double, double) { return 0.0; };
    c.d2S_dx2 = [](double x, double t) {
        return -kPi * kPi * std::cos(kPi * x) * std::exp(-t);
    };
    c.d2M_dx2 = [](double, double) { return 0.0; };
    c.exact_flux = [](double) { return 0.0; };
    c.data.mu1 = [](double t) { return 1.0 + std::exp(-t); };
    c.data.mu2 = [](double t) { return 1.0 - std::exp(-t); };
    c.data.mu3 = [](double) { return 0.0; };
    c.data.mu4 = [](double) { return 0.0; };
    c.data.S0 = [](double x) { return 1.0 + std::cos(kPi * x); };
    c.data.M0 = [](double) { return 0.0; };
    // dS/dt - d1 d2S/dx2 with d1 = 2 and no reaction (M = 0)
    c.data.F = [](double x, double t) {
        return (2.0 * kPi * kPi - 1.0) * std::cos(kPi * x) * std::exp(-t);
    };
    c.data.G = [](double, double) { return 0.0; };
    return c;
}

// M = 1/2 everywhere: the wall-biomass hypothesis of the balance stage fails.
ManufacturedCase flat_m_case() {
    ManufacturedCase c = example1();
    c.name = "flat-m";
    c.params = ParamVector{1, 1, 1, 1, 1, 1, 1, 2};
    c.final_time = 1.0;
    c.exact_biomass = std::nullopt;
    c.exact_S = [](double x, double t) { return 1.0 + x * (1.0 - x) * (t + 1.0); };
    c.exact_M = [](double, double) { return 0.5; };
    c.dS_dt = [](double x, double) { return x * (1.0 - x); };
    c.dM_dt = [](double, double) { return 0.0; };
    c.dS_dx = [](double x, double t) { return (1.0 - 2.0 * x) * (t + 1.0); };
    c.dM_dx = [](double, double) { return 0.0; };
    c.d2S_dx2 = [](double, double t) { return -2.0 * (t + 1.0); };
    c.d2M_dx2 = [](double, double) { return 0.0; };
    c.exact_flux = [](double t) { return -(t + 1.0); };
    c.data.mu1 = [](double) { return 1.0; };
    c.data.mu2 = [](double) { return 1.0; };
    c.data.mu3 = [](double) { return 0.5; };
    c.data.mu4 = [](double) { return 0.5; };
    c.data.S0 = [](double x) { return 1.0 + x * (1.0 - x); };
    c.data.M0 = [](double) { return 0.5; };
    c.data.F = [](double x, double t) {
        const double S = 1.0 + x * (1.0 - x) * (t + 1.0);
        return x * (1.0 - x) + 2.0 * (t + 1.0) + 0.5 * S / (1.0 + S);
    };
    c.data.G = [](double x, double t) {
        const double S = 1.0 + x * (1.0 - x) * (t + 1.0);
        return 0.5 - 0.5 * S / (1.0 + S);
    };
    return c;
}

// Case 1 with the biomass field and its source scaled by gamma: both rows of
// the balance system scale by the same constant, so (K2, K3) must not move.
ManufacturedCase scaled_case1(double gamma) {
    ManufacturedCase c = example1();
    const SpaceTimeFn M = c.exact_M, Mt = c.dM_dt, Mx = c.dM_dx, Mxx = c.d2M_dx2;
    const SpaceTimeFn G = c.data.G;
    c.exact_M = [=](double x, double t) { return gamma * M(x, t); };
    c.dM_dt = [=](double x, double t) { return gamma * Mt(x, t); };
    c.dM_dx = [=](double x, double t) { return gamma * Mx(x, t); };
    c.d2M_dx2 = [=](double x, double t) { return gamma * Mxx(x, t); };
    c.data.G = [=](double x, double t) { return gamma * G(x, t); };
    c.exact_biomass = std::nullopt;
    return c;
}

} // namespace

TEST_CASE("scan recovery on the case-1 analytic probe") {
    const ManufacturedCase c = example1();
    const FieldProbe probe = FieldProbe::from_case(c);
    const RecoveryResult res = recover_all(probe, scan_points(probe));
    // primary bound: every component
    for (int i = 0; i < 8; ++i)
        CHECK(std::abs(res.params[i] - c.params[i]) <= 1e-6);
    // stages 1-2 involve no quadrature at all
    CHECK(std::abs(res.params.d1() - 1.0) <= 1e-10);
    CHECK(std::abs(res.params.K1() - 1.0) <= 1e-10);
    CHECK(std::abs(res.params.K4() - 1.0) <= 1e-10);
    // stage 4 is closed-form but consumes the quadrature-limited K2, K3
    CHECK(std::abs(res.params.a() - 1.0) <= 1e-8);
    CHECK(std::abs(res.params.b() - 2.0) <= 1e-8);
    CHECK(std::abs(res.params.d2() - 1.0) <= 1e-8);
    CHECK(res.stage2.det_quality > 0.0);
    CHECK(res.stage3.det_quality > 0.0);
    CHECK(res.stage4.condition < recovery_limits::kConditionLimit);
}

TEST_CASE("scan recovery on the degenerate-case analytic probe") {
    const ManufacturedCase c = example2();
    const FieldProbe probe = FieldProbe::from_case(c);
    const RecoveryResult res = recover_all(probe, scan_points(probe));
    for (int i = 0; i < 8; ++i)
        CHECK(std::abs(res.params[i] - c.params[i]) <= 1e-10);
}

TEST_CASE("worked demonstration: stage 1 at the stated point") {
    const FieldProbe probe = FieldProbe::from_case(example2());
    const Stage1Result s1 = recover_d1(probe, {0.5, 1.0}); // S = 0 there
    CHECK(s1.d1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s1.admissible);
}

TEST_CASE("worked demonstration: the stated stage-2 pair is exactly singular") {
    // At (1/2, 1) the fields give M = 1, S = 0, so c2 = 0 and the second row
    // of the (K1, K4) system vanishes identically: no tolerance can save it.
    const FieldProbe probe = FieldProbe::from_case(example2());
    CHECK_THROWS_AS(recover_K1_K4(probe, {0.5, 0.5}, {0.5, 1.0}, 1.0),
                    assumption_error);
    // moving the second point off the degeneracy recovers both exactly
    const Stage2Result s2 = recover_K1_K4(probe, {0.5, 0.5}, {0.5, 0.75}, 1.0);
    CHECK(s2.K1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s2.K4 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s2.admissible);
}

TEST_CASE("worked demonstration: stages 3 and 4 at the stated points") {
    const FieldProbe probe = FieldProbe::from_case(example2());
    const Stage3Result s3 = recover_K2_K3(probe, 0.5, 1.0, 1.0);
    CHECK(s3.K2 == 0.0); // roundoff below the closed bound snaps onto it
    CHECK(s3.K3 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s3.admissible);

    const Stage4Result s4 = recover_a_b_d2(probe, {0.5, 1.0 / 3.0}, {0.5, 0.5},
                                           {0.5, 2.0 / 3.0}, s3.K2, s3.K3, 1.0);
    CHECK(std::abs(s4.a) < 1e-12);
    CHECK(s4.b == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s4.d2 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s4.admissible);
}

TEST_CASE("recover_all at the full stated points reports the singular stage") {
    const FieldProbe probe = FieldProbe::from_case(example2());
    const EvaluationPoints pts{{0.5, 1.0},         {0.5, 0.5}, {0.5, 1.0},
                               0.5,                1.0,        {0.5, 1.0 / 3.0},
                               {0.5, 0.5},         {0.5, 2.0 / 3.0}};
    CHECK_THROWS_AS(recover_all(probe, pts), assumption_error);
}

TEST_CASE("stage 1 on a decoupled substrate case with d1 = 2") {
    const FieldProbe probe = FieldProbe::from_case(cosine_case());
    const Stage1Result s1 = recover_d1(probe, {0.25, 0.5});
    CHECK(s1.d1 == doctest::Approx(2.0).epsilon(1e-12));

    // at x = 1/2 the curvature vanishes: denominator floor rejects the point
    CHECK_THROWS_AS(recover_d1(probe, {0.5, 0.5}), assumption_error);
}

TEST_CASE("stage 1 rejects points where neither field vanishes") {
    const FieldProbe probe = FieldProbe::from_case(example1());
    CHECK_THROWS_AS(recover_d1(probe, {0.5, 0.5}), assumption_error);
}

TEST_CASE("stage 2 rejects a repeated point") {
    const FieldProbe probe = FieldProbe::from_case(example2());
    CHECK_THROWS_AS(recover_K1_K4(probe, {0.5, 0.5}, {0.5, 0.5}, 1.0),
                    assumption_error);
}

TEST_CASE("stage 3 rejects a repeated time and non-vanishing wall biomass") {
    const FieldProbe e2 = FieldProbe::from_case(example2());
    CHECK_THROWS_AS(recover_K2_K3(e2, 0.5, 0.5, 1.0), assumption_error);

    const FieldProbe flat = FieldProbe::from_case(flat_m_case());
    CHECK_THROWS_AS(recover_K2_K3(flat, 0.5, 1.0, 1.0), assumption_error);
}

TEST_CASE("balance stage is invariant under a common row scaling") {
    const FieldProbe base = FieldProbe::from_case(example1());
    const FieldProbe scaled = FieldProbe::from_case(scaled_case1(137.0));
    const Stage3Result r1 = recover_K2_K3(base, 0.3, 0.8, 1.0);
    const Stage3Result r2 = recover_K2_K3(scaled, 0.3, 0.8, 1.0);
    CHECK(std::abs(r1.K2 - r2.K2) <= 1e-12);
    CHECK(std::abs(r1.K3 - r2.K3) <= 1e-12);
    CHECK(r1.K2 == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(r1.K3 == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("stage 4 rejects non-critical points and coincident M values") {
    const FieldProbe probe = FieldProbe::from_case(example2());
    // dM/dx != 0 at x = 1/4
    CHECK_THROWS_AS(recover_a_b_d2(probe, {0.25, 0.5}, {0.5, 0.5}, {0.5, 0.75},
                                   0.0, 1.0, 1.0),
                    assumption_error);
    // mirrored points share the same M value
    CHECK_THROWS_AS(recover_a_b_d2(probe, {0.4, 0.5}, {0.6, 0.5}, {0.5, 0.5},
                                   0.0, 1.0, 1.0),
                    assumption_error);
}

TEST_CASE("assembled vector from recover_all is always admissible") {
    const FieldProbe probe = FieldProbe::from_case(example2());
    const RecoveryResult res = recover_all(probe, scan_points(probe));
    CHECK(ParamVector::admissible(res.params.values()));
    CHECK(res.params.K2() >= 0.0); // true value 0: snap keeps it admissible
    CHECK(res.params.a() >= 0.0);
    CHECK(res.params.b() >= 1.0);
}
