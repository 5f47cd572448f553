// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>

#include "vdrt/mesh.hpp"
#include "vdrt/vec3.hpp"

namespace vdrt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Local ray field: complex vector at a point plus the ray-tube description.
struct Wave {
    CVec3 E;
    Vec3 k;               // unit propagation direction
    double r1 = kInf;     // principal radii of curvature, inf = plane
    double r2 = kInf;
    Vec3 u1;              // principal direction belonging to r1
};

Wave propagate(const Wave& w, double d, double k0);
Wave reflect(const Wave& w, const Vec3& normal);

// Wavefront curvature of `w` along the direction of `t` projected on the wavefront.
double curvature_along(const Wave& w, const Vec3& t);

struct WedgeAngles {
    double phi = 0, phip = 0;  // diffraction and incidence azimuth from the 0-face
    double beta0 = kPi / 2;
    double n = 2;
    double L = 0;
};

struct EdgeCoeffs {
    cplx Ds, Dh;
    double a_min = kInf;  // smallest kL a_i over the four terms
};

// Four-term uniform wedge coefficient with the transition function on each term.
EdgeCoeffs edge_coefficient(const WedgeAngles& a, double k0);
// Same four terms, each scaled by the share vertex_share(kL a_i, bv) of the corner
// product that belongs to this edge (used by the endpoint term with transition argument bv).
EdgeCoeffs edge_coefficient_shared(const WedgeAngles& a, double k0, double bv);
// Fraction of F(c) F(b) carried by the edge with transition argument c at a corner whose
// endpoint argument is b. vertex_share(c, b) + vertex_share(b, c) = 1.
cplx vertex_share(double c, double b);
// Keller's non-uniform coefficient, valid away from shadow and reflection boundaries.
EdgeCoeffs keller_coefficient(const WedgeAngles& a, double k0);

// Azimuth of `d` about the wedge (0-face = 0). Returns false if `d` lies inside the solid.
bool wedge_azimuth(const Wedge& w, const Vec3& d, double& phi, double tol = 1e-7);

struct EdgeOptions {
    bool soft_slope = false;  // keep d/dphi of the soft coefficient for a later slope term
};

struct EdgeResult {
    bool ok = false;
    Wave out;            // diffracted wave at the downstream point
    double a_min = kInf;
    bool grazing = false;
    // soft-slope data (for the grazing double-edge term)
    cplx dDs_dphi, dDs_dphip;
    Vec3 beta_in, beta_out;  // soft basis vectors
    double amp = 0;          // spreading factor used
};

// Diffract `inc` (the incident wave at the edge point q) toward a point at distance s along sdir.
EdgeResult diffract_edge(const Wave& inc, const Wedge& w, const Vec3& q, const Vec3& sdir, double s,
                         double k0, const EdgeOptions& opt = {});

struct EndpointResult {
    bool ok = false;
    CVec3 E;          // field at the downstream point
    Wave out;         // E with the ray tube of the edge this term belongs to
    double qp = 0;    // tangential phase gradient into the edge
    double b = 0;     // vertex transition argument
};

struct EndpointOptions {
    bool force_outside = false;  // Keller point snapped onto this corner
    double b_scale = 1.0;        // b -> b * b_scale (cascade regime B)
    double blend = 0.0;          // weight of the b_scale result (0 = plain b)
};

// Endpoint (vertex) contribution of wedge `w` at its endpoint `at_p0 ? p0 : p1`.
EndpointResult vertex_endpoint(const Wave& inc, const Wedge& w, bool at_p0, const Vec3& sdir,
                               double s, double k0, const EndpointOptions& opt = {});

// Edge-vertex cascade blend: weight of regime B for edge transition argument a.
struct BlendConfig {
    double a_lo = 1.0;
    double a_hi = 4.0;
    double clamp = 1e3;
};
double regime_b_weight(double a, const BlendConfig& cfg);
// 1/sqrt(1-w^2) with the clamp; sets `clamped` when the ceiling applies.
double regime_b_scale(double w, const BlendConfig& cfg, bool& clamped);

}  // namespace vdrt
