// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "vdrt/special.hpp"
#include "vdrt/utd.hpp"

using namespace vdrt;

namespace {

const double kLam = kC0 / 2e9;
const double kK = 2 * kPi / kLam;

double rad(double deg) { return deg * kPi / 180; }

// half-plane with plane-wave incidence in the plane normal to the edge
cplx diffracted(double phi, double phip, double rho, bool soft) {
    WedgeAngles a{phi, phip, kPi / 2, 2.0, rho};
    EdgeCoeffs c = edge_coefficient(a, kK);
    return (soft ? c.Ds : c.Dh) * std::polar(1.0, -kK * rho) / std::sqrt(rho);
}

cplx geometric(double phi, double phip, double rho, bool soft) {
    cplx u;
    if (phi < kPi + phip) u += std::polar(1.0, kK * rho * std::cos(phi - phip));
    if (phi < kPi - phip) u += (soft ? -1.0 : 1.0) * std::polar(1.0, kK * rho * std::cos(phi + phip));
    return u;
}

}  // namespace

TEST_CASE("uniform coefficient reduces to Keller away from the boundaries") {
    double phip = rad(45);
    for (double phi : {rad(170), rad(185), rad(200)}) {
        WedgeAngles a{phi, phip, kPi / 2, 2.0, 2000 * kLam};
        EdgeCoeffs u = edge_coefficient(a, kK), k = keller_coefficient(a, kK);
        CHECK(std::abs(u.Ds - k.Ds) / std::abs(k.Ds) < 0.01);
        CHECK(std::abs(u.Dh - k.Dh) / std::abs(k.Dh) < 0.01);
    }
}

TEST_CASE("coefficient reciprocity") {
    for (double n : {1.5, 1.9, 2.0}) {
        WedgeAngles a{rad(150), rad(40), rad(70), n, 3.0};
        WedgeAngles b = a;
        std::swap(b.phi, b.phip);
        EdgeCoeffs ca = edge_coefficient(a, kK), cb = edge_coefficient(b, kK);
        CHECK(std::abs(ca.Ds - cb.Ds) < 1e-12 * std::abs(ca.Ds));
        CHECK(std::abs(ca.Dh - cb.Dh) < 1e-12 * std::abs(ca.Dh));
    }
}

TEST_CASE("coefficients stay finite on the boundaries") {
    double phip = rad(45);
    for (double phi : {kPi + phip, kPi - phip, kPi + phip + 1e-8, kPi - phip - 1e-8}) {
        EdgeCoeffs c = edge_coefficient({phi, phip, kPi / 2, 1.7, 1.0}, kK);
        CHECK(std::isfinite(std::abs(c.Ds)));
        CHECK(std::isfinite(std::abs(c.Dh)));
    }
}

TEST_CASE("half-plane total field is continuous across the shadow and reflection boundaries") {
    double phip = rad(45), rho = 10 * kLam, d = 1e-7;
    for (bool soft : {true, false})
        for (double b : {kPi + phip, kPi - phip}) {
            cplx lo = geometric(b - d, phip, rho, soft) + diffracted(b - d, phip, rho, soft);
            cplx hi = geometric(b + d, phip, rho, soft) + diffracted(b + d, phip, rho, soft);
            CAPTURE(soft);
            CAPTURE(b);
            CHECK(std::abs(hi - lo) / std::abs(lo) < 1e-3);
        }
}

TEST_CASE("cascade blend") {
    BlendConfig cfg;
    bool clamped = true;
    CHECK(regime_b_scale(0.0, cfg, clamped) == 1.0);
    CHECK_FALSE(clamped);
    regime_b_scale(1.0, cfg, clamped);
    CHECK(clamped);
    CHECK(regime_b_scale(0.999999999, cfg, clamped) == cfg.clamp);
    CHECK(regime_b_weight(cfg.a_lo, cfg) == 1.0);
    CHECK(regime_b_weight(cfg.a_hi, cfg) == 0.0);
    CHECK(std::abs(regime_b_weight(cfg.a_lo + 1e-9, cfg) - 1.0) < 1e-6);
    CHECK(std::abs(regime_b_weight(cfg.a_hi - 1e-9, cfg)) < 1e-6);
}

TEST_CASE("plane propagation keeps amplitude, spherical spreading is 1/r") {
    Wave w;
    w.E = CVec3(Vec3{0, 1, 0});
    w.k = {1, 0, 0};
    Wave p = propagate(w, 3.0, kK);
    CHECK(std::abs(p.E.y) == doctest::Approx(1.0));
    w.r1 = w.r2 = 2.0;
    p = propagate(w, 6.0, kK);
    CHECK(std::abs(p.E.y) == doctest::Approx(0.25));
}

TEST_CASE("reflection off a PEC plane") {
    Wave w;
    w.E = CVec3(Vec3{1, 0, 0});
    w.k = normalize(Vec3{1, 0, -1});
    Wave r = reflect(w, {0, 0, 1});
    CHECK(std::abs(r.E.x + 1.0) < 1e-15);
    CHECK(norm(r.k - normalize(Vec3{1, 0, 1})) < 1e-15);
}
