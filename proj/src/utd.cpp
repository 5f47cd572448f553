// SPDX-License-Identifier: Apache-2.0
#include "vdrt/utd.hpp"

#include <algorithm>

#include "vdrt/special.hpp"

namespace vdrt {

namespace {

const cplx kEPi4 = std::polar(1.0, kPi / 4);
const cplx kEmPi4 = std::polar(1.0, -kPi / 4);

double inv(double r) { return std::isinf(r) ? 0.0 : 1.0 / r; }

struct Term {
    cplx v;
    double x;
};

// cot((pi + sign*beta)/(2n)) F(kL a_sign(beta)), with the finite limit at the pole.
// With bv >= 0 the term is scaled by the share of the corner product owned by this edge.
Term kp_term(double beta, int sign, double n, double kL, double bv = -1) {
    double N, eps;
    if (sign > 0) {
        N = std::round((beta + kPi) / (2 * kPi * n));
        eps = kPi + beta - 2 * kPi * n * N;
    } else {
        N = std::round((beta - kPi) / (2 * kPi * n));
        eps = kPi - beta + 2 * kPi * n * N;
    }
    double c = std::cos(0.5 * (2 * kPi * n * N - beta));
    double x = kL * 2 * c * c;
    cplx w = bv >= 0 ? vertex_share(x, bv) : cplx(1.0);
    if (std::abs(eps) < 1e-8) {
        double sg = eps < 0 ? -1.0 : 1.0;
        return {w * n * (std::sqrt(2 * kPi * kL) * sg - 2 * kL * eps * kEPi4) * kEPi4, x};
    }
    double arg = (kPi + sign * beta) / (2 * n);
    return {w * fresnel_transition(x) / std::tan(arg), x};
}

void dyad_basis(const Vec3& e, const Vec3& sp, const Vec3& sd, Vec3& php, Vec3& bp, Vec3& ph,
                Vec3& b) {
    php = normalize(-cross(e, sp));
    bp = cross(sp, php);
    ph = normalize(cross(e, sd));
    b = cross(sd, ph);
}

bool grazing_incidence(double phip, double n) { return phip < 1e-9 || phip > n * kPi - 1e-9; }

}  // namespace

Wave propagate(const Wave& w, double d, double k0) {
    Wave o = w;
    double f1 = std::isinf(w.r1) ? 1.0 : w.r1 / (w.r1 + d);
    double f2 = std::isinf(w.r2) ? 1.0 : w.r2 / (w.r2 + d);
    o.E = w.E * (std::sqrt(f1 * f2) * std::polar(1.0, -k0 * d));
    o.r1 = w.r1 + d;
    o.r2 = w.r2 + d;
    return o;
}

Wave reflect(const Wave& w, const Vec3& nrm) {
    Wave o = w;
    cplx en = dot(w.E, nrm);
    o.E = nrm * (2.0 * en) - w.E;
    o.k = w.k - nrm * (2 * dot(w.k, nrm));
    o.u1 = w.u1 - nrm * (2 * dot(w.u1, nrm));
    return o;
}

double curvature_along(const Wave& w, const Vec3& t) {
    Vec3 tp = t - w.k * dot(t, w.k);
    double tt = norm2(tp);
    if (tt < 1e-24) return 0.0;
    double c = dot(tp, w.u1);
    c = c * c / tt;
    return c * inv(w.r1) + (1 - c) * inv(w.r2);
}

EdgeCoeffs edge_coefficient(const WedgeAngles& a, double k0) { return edge_coefficient_shared(a, k0, -1); }

EdgeCoeffs edge_coefficient_shared(const WedgeAngles& a, double k0, double bv) {
    double kL = k0 * a.L;
    double bm = a.phi - a.phip, bpl = a.phi + a.phip;
    Term t1 = kp_term(bm, +1, a.n, kL, bv), t2 = kp_term(bm, -1, a.n, kL, bv);
    Term t3 = kp_term(bpl, +1, a.n, kL, bv), t4 = kp_term(bpl, -1, a.n, kL, bv);
    cplx pref = -kEmPi4 / (2 * a.n * std::sqrt(2 * kPi * k0) * std::sin(a.beta0));
    cplx di = t1.v + t2.v, dr = t3.v + t4.v;
    return {pref * (di - dr), pref * (di + dr), std::min({t1.x, t2.x, t3.x, t4.x})};
}

EdgeCoeffs keller_coefficient(const WedgeAngles& a, double k0) {
    double n = a.n;
    double cn = std::cos(kPi / n);
    cplx pref = kEmPi4 * std::sin(kPi / n) / (n * std::sqrt(2 * kPi * k0) * std::sin(a.beta0));
    double ti = 1.0 / (cn - std::cos((a.phi - a.phip) / n));
    double tr = 1.0 / (cn - std::cos((a.phi + a.phip) / n));
    return {pref * (ti - tr), pref * (ti + tr), kInf};
}

bool wedge_azimuth(const Wedge& w, const Vec3& d, double& phi, double tol) {
    phi = std::atan2(dot(d, w.n0), dot(d, w.t0));
    if (phi < 0) phi += 2 * kPi;
    double top = w.n * kPi;
    if (phi <= top) return true;
    if (phi - top <= tol) {
        phi = top;
        return true;
    }
    if (2 * kPi - phi <= tol) {
        phi = 0;
        return true;
    }
    return false;
}

EdgeResult diffract_edge(const Wave& inc, const Wedge& w, const Vec3& /*q*/, const Vec3& sd,
                         double s, double k0, const EdgeOptions& opt) {
    EdgeResult r;
    const Vec3& sp = inc.k;
    double phip, phi;
    if (!wedge_azimuth(w, -sp, phip) || !wedge_azimuth(w, sd, phi)) return r;
    double ci = dot(sp, w.e), cd = dot(sd, w.e);
    double s2 = std::sqrt((1 - ci * ci) * (1 - cd * cd));
    if (s2 < 1e-12) return r;
    double kap_e = curvature_along(inc, w.e);
    double L = s * s2 * (1 + kap_e * s) / ((1 + inv(inc.r1) * s) * (1 + inv(inc.r2) * s));
    WedgeAngles ang{phi, phip, std::asin(std::min(1.0, std::sqrt(s2))), w.n, L};
    EdgeCoeffs c = edge_coefficient(ang, k0);
    r.grazing = grazing_incidence(phip, w.n);
    double g = r.grazing ? 0.5 : 1.0;
    Vec3 php, bp, ph, b;
    dyad_basis(w.e, sp, sd, php, bp, ph, b);
    double A = 1.0 / std::sqrt(s * (1 + kap_e * s));
    cplx ph_s = std::polar(A * g, -k0 * s);
    r.out.E = b * (-dot(inc.E, bp) * c.Ds * ph_s) + ph * (-dot(inc.E, php) * c.Dh * ph_s);
    r.out.k = sd;
    r.out.r1 = s;
    r.out.u1 = ph;
    r.out.r2 = kap_e == 0 ? kInf : 1.0 / kap_e + s;
    r.a_min = c.a_min;
    r.amp = A;
    r.beta_in = bp;
    r.beta_out = b;
    if (opt.soft_slope) {
        // the stencil stays between the faces and off the shadow boundaries, where the
        // coefficient jumps
        const double h = 1e-5;
        auto slope = [&](double WedgeAngles::*x, double other) {
            auto at = [&](double v) {
                WedgeAngles t = ang;
                t.*x = v;
                return edge_coefficient(t, k0).Ds;
            };
            double v = ang.*x, lo = 0, hi = w.n * kPi;
            bool on_boundary = false;
            for (int N = -1; N <= 1; ++N)
                for (double sg : {-1.0, 1.0})
                    for (double b : {other + 2 * kPi * w.n * N + sg * kPi,
                                     -other + 2 * kPi * w.n * N + sg * kPi}) {
                        if (std::abs(b - v) <= 1e-12) on_boundary = true;
                        else if (b > v) hi = std::min(hi, b);
                        else lo = std::max(lo, b);
                    }
            double right = hi - v, left = v - lo;
            if (!on_boundary && right >= 2 * h && left >= 2 * h)
                return g * (at(v + h) - at(v - h)) / (2 * h);
            if (right >= left) {
                double d = std::min(h, right / 3);
                return g * (at(v + 2 * d) - at(v + d)) / d;
            }
            double d = std::min(h, left / 3);
            return g * (at(v - d) - at(v - 2 * d)) / d;
        };
        r.dDs_dphi = slope(&WedgeAngles::phi, ang.phip);
        r.dDs_dphip = slope(&WedgeAngles::phip, ang.phi);
    }
    r.ok = finite(r.out.E);
    return r;
}

EndpointResult vertex_endpoint(const Wave& inc, const Wedge& w, bool at_p0, const Vec3& sd,
                               double s, double k0, const EndpointOptions& opt) {
    EndpointResult r;
    const Vec3& sp = inc.k;
    double phip, phi;
    if (!wedge_azimuth(w, -sp, phip) || !wedge_azimuth(w, sd, phi)) return r;
    double ci = dot(sp, w.e), cd = dot(sd, w.e);
    double sin2i = 1 - ci * ci, sin2d = 1 - cd * cd;
    if (sin2i < 1e-12 || sin2d < 1e-12) return r;
    Vec3 u = at_p0 ? w.e : -w.e;
    double qp = dot(sp, u) - dot(sd, u);
    double kap_e = curvature_along(inc, w.e);
    double qpp = sin2i * kap_e + sin2d / s;
    double s2 = std::sqrt(sin2i * sin2d);
    double L = s * s2 * (1 + kap_e * s) / ((1 + inv(inc.r1) * s) * (1 + inv(inc.r2) * s));
    WedgeAngles ang{phi, phip, std::asin(std::min(1.0, std::sqrt(s2))), w.n, L};
    double g = grazing_incidence(phip, w.n) ? 0.5 : 1.0;
    Vec3 php, bp, ph, b;
    dyad_basis(w.e, sp, sd, php, bp, ph, b);
    double A = 1.0 / std::sqrt(s * (1 + kap_e * s));
    cplx eb = dot(inc.E, bp), eph = dot(inc.E, php);
    cplx amp = g * A * std::sqrt(k0 * qpp / (2 * kPi)) * kEPi4;

    double q = opt.force_outside ? std::abs(qp) : qp;
    double bv = k0 * q * q / (2 * qpp);
    // the scaled argument also enters the 1/sqrt(b) normalization, which keeps the
    // q' = 0 limit (half the edge term) independent of the scale
    auto term = [&](double scale) -> CVec3 {
        cplx T;
        if (std::abs(q) < 1e-14)
            T = std::sqrt(kPi / (2 * k0 * qpp)) * kEPi4 / kJ;
        else
            T = fresnel_transition(bv * scale) / (kJ * k0 * q * std::sqrt(scale));
        EdgeCoeffs c = edge_coefficient_shared(ang, k0, bv * scale);
        CVec3 f = b * (-eb * c.Ds) + ph * (-eph * c.Dh);
        return f * (amp * T);
    };
    CVec3 T = term(1.0);
    if (opt.blend > 0) T = T * (1 - opt.blend) + term(opt.b_scale) * opt.blend;
    r.E = T * std::polar(1.0, -k0 * s);
    r.out.E = r.E;
    r.out.k = sd;
    r.out.r1 = s;
    r.out.u1 = ph;
    r.out.r2 = kap_e == 0 ? kInf : 1.0 / kap_e + s;
    r.qp = qp;
    r.b = bv;
    r.ok = finite(r.E);
    return r;
}

cplx vertex_share(double c, double b) { return gfi_share(c, b); }

double regime_b_weight(double a, const BlendConfig& cfg) {
    if (a <= cfg.a_lo) return 1.0;
    if (a >= cfg.a_hi) return 0.0;
    return (cfg.a_hi - a) / (cfg.a_hi - cfg.a_lo);
}

double regime_b_scale(double w, const BlendConfig& cfg, bool& clamped) {
    clamped = false;
    double d = 1 - w * w;
    if (d <= 0 || 1.0 / std::sqrt(d) > cfg.clamp) {
        clamped = true;
        return cfg.clamp;
    }
    return 1.0 / std::sqrt(d);
}

}  // namespace vdrt
