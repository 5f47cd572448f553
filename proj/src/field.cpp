// SPDX-License-Identifier: Apache-2.0
#include "vdrt/field.hpp"

namespace vdrt {

namespace {

Wave point_wave(const CVec3& E, const Vec3& k, double r) {
    Wave w;
    w.E = E;
    w.k = k;
    w.r1 = w.r2 = r;
    w.u1 = any_perp(k);
    return w;
}

}  // namespace

FieldEvaluator::FieldEvaluator(const PathTracer& tracer, const FieldOptions& opt)
    : tr_(tracer), opt_(opt) {}

Wave FieldEvaluator::incident_wave(const Vec3& p) const {
    const Source& s = tr_.source();
    if (s.plane()) {
        Wave w;
        w.E = CVec3(s.pol) * std::polar(1.0, -opt_.k0 * dot(s.dir, p));
        w.k = s.dir;
        w.u1 = any_perp(s.dir);
        return w;
    }
    Vec3 d = p - s.pos;
    double r = norm(d);
    Vec3 k = d / r;
    Vec3 pol = s.pol - k * dot(s.pol, k);
    return point_wave(CVec3(pol) * (std::polar(1.0, -opt_.k0 * r) / r), k, r);
}

std::vector<EndpointResult> FieldEvaluator::corner_terms(const Wave& inc, int corner,
                                                        const Vec3& up_point, bool up_is_source,
                                                        const Vec3& down, double blend,
                                                        double b_scale) const {
    const WedgeSet& ws = tr_.wedges();
    const Corner& c = ws.corners[corner];
    Vec3 d = down - c.pos;
    double s = norm(d);
    d = d / s;
    std::vector<EndpointResult> out;
    for (int wi : c.wedges) {
        const Wedge& w = ws.wedges[wi];
        bool at_p0 = w.v0 == c.vertex;
        EndpointOptions eo;
        eo.force_outside = tr_.snapped_at(wi, at_p0, up_is_source ? nullptr : &up_point, down);
        eo.blend = blend;
        eo.b_scale = b_scale;
        auto r = vertex_endpoint(inc, w, at_p0, d, s, opt_.k0, eo);
        if (r.ok) out.push_back(r);
    }
    return out;
}

CVec3 FieldEvaluator::corner_field(const Wave& inc, int corner, const Vec3& up_point,
                                   bool up_is_source, const Vec3& down, double blend,
                                   double b_scale) const {
    CVec3 sum;
    for (const auto& r : corner_terms(inc, corner, up_point, up_is_source, down, blend, b_scale))
        sum += r.E;
    return sum;
}

PathField FieldEvaluator::path_field(const InteractionPath& p, const Vec3& obs, FieldStats* st) const {
    const WedgeSet& ws = tr_.wedges();
    const Source& src = tr_.source();
    const double k0 = opt_.k0;
    PathField out;
    auto fail = [&]() {
        if (st) ++st->dropped;
        return PathField{};
    };
    auto dir_len = [](const Vec3& a, const Vec3& b, double& l) {
        Vec3 d = b - a;
        l = norm(d);
        return d / l;
    };
    // regime-B scaling for a vertex that sits one leg away from an edge
    auto cascade_w = [&](const Vec3& first, double s2, double s3) {
        if (src.plane()) return std::sqrt(s3 / (s2 + s3));
        double s1 = norm(first - src.pos);
        return std::sqrt(s1 * s3 / ((s1 + s2) * (s2 + s3)));
    };
    auto scale_for = [&](double w) {
        bool clamped = false;
        double v = regime_b_scale(w, opt_.blend, clamped);
        if (clamped && st) ++st->clamp_hits;
        return v;
    };

    switch (p.mech) {
        case Mech::LOS: {
            Wave w = incident_wave(obs);
            return {true, w.E, w.k};
        }
        case Mech::R:
        case Mech::RR: {
            Wave w = incident_wave(p.nodes[0].pos);
            for (int i = 0; i < p.nnodes; ++i) {
                w = reflect(w, tr_.patch_normals()[p.nodes[i].ref]);
                Vec3 next = i + 1 < p.nnodes ? p.nodes[i + 1].pos : obs;
                w = propagate(w, norm(next - p.nodes[i].pos), k0);
            }
            out = {finite(w.E), w.E, w.k};
            break;
        }
        case Mech::E: {
            const Vec3& q = p.nodes[0].pos;
            double s;
            Vec3 d = dir_len(q, obs, s);
            auto r = diffract_edge(incident_wave(q), ws.wedges[p.nodes[0].ref], q, d, s, k0);
            if (!r.ok) return fail();
            out = {true, r.out.E, d};
            break;
        }
        case Mech::V: {
            const Vec3& c = p.nodes[0].pos;
            auto terms = corner_terms(incident_wave(c), p.nodes[0].ref, src.pos, true, obs, 0, 1);
            if (terms.empty()) return fail();
            CVec3 E;
            for (const auto& t : terms) E += t.E;
            double s;
            out = {finite(E), E, dir_len(c, obs, s)};
            break;
        }
        case Mech::EE: {
            const Vec3 &p1 = p.nodes[0].pos, &p2 = p.nodes[1].pos;
            const Wedge& w1 = ws.wedges[p.nodes[0].ref];
            const Wedge& w2 = ws.wedges[p.nodes[1].ref];
            double s2, s3;
            Vec3 d12 = dir_len(p1, p2, s2), d3 = dir_len(p2, obs, s3);
            Wave inc = incident_wave(p1);
            EdgeOptions eo;
            eo.soft_slope = opt_.soft_slope;
            auto r1 = diffract_edge(inc, w1, p1, d12, s2, k0, eo);
            if (!r1.ok) return fail();
            auto r2 = diffract_edge(r1.out, w2, p2, d3, s3, k0, eo);
            if (!r2.ok) return fail();
            CVec3 E = r2.out.E;
            if (opt_.soft_slope && r2.grazing) {
                // grazing exit from the first edge along the shared face: the soft part of the
                // first diffracted field vanishes there, so carry its normal derivative instead
                int patch = -1;
                for (int pi : {w1.patch0, w1.patchn})
                    if (pi == w2.patch0 || pi == w2.patchn) patch = pi;
                if (patch >= 0) {
                    const Vec3& nu = tr_.patch_normals()[patch];
                    double sig1 = patch == w1.patch0 ? 1.0 : -1.0;
                    Vec3 php2 = normalize(-cross(w2.e, d12));
                    double sig = sig1 * (dot(php2, nu) >= 0 ? 1.0 : -1.0);
                    double sb1 = norm(cross(d12, w1.e));
                    cplx e0b = dot(inc.E, r1.beta_in);
                    CVec3 dE1 = r1.beta_out * (-e0b * r1.dDs_dphi * r1.amp * std::polar(1.0, -k0 * s2));
                    CVec3 dEn = dE1 * (sig / (s2 * sb1));
                    cplx comp = dot(dEn, r2.beta_in);
                    E += r2.beta_out *
                         (-comp * r2.dDs_dphip * r2.amp * std::polar(1.0, -k0 * s3) / (kJ * k0));
                }
            }
            out = {finite(E), E, d3};
            break;
        }
        case Mech::EV: {
            const Vec3 &p1 = p.nodes[0].pos, &c = p.nodes[1].pos;
            double s2, s3;
            Vec3 d12 = dir_len(p1, c, s2), d3 = dir_len(c, obs, s3);
            auto r1 = diffract_edge(incident_wave(p1), ws.wedges[p.nodes[0].ref], p1, d12, s2, k0);
            if (!r1.ok) return fail();
            double lam = regime_b_weight(r1.a_min, opt_.blend);
            double bs = lam > 0 ? scale_for(cascade_w(p1, s2, s3)) : 1.0;
            auto terms = corner_terms(r1.out, p.nodes[1].ref, p1, false, obs, lam, bs);
            if (terms.empty()) return fail();
            CVec3 E;
            for (const auto& t : terms) E += t.E;
            out = {finite(E), E, d3};
            break;
        }
        case Mech::VE: {
            const Vec3 &c = p.nodes[0].pos, &p2 = p.nodes[1].pos;
            const Wedge& w2 = ws.wedges[p.nodes[1].ref];
            double s2, s3;
            Vec3 d12 = dir_len(c, p2, s2), d3 = dir_len(p2, obs, s3);
            Wave inc = incident_wave(c);
            // dry run with a unit spherical wave to find the edge transition argument
            Wave probe = point_wave(CVec3(any_perp(d12)), d12, s2);
            auto dry = diffract_edge(probe, w2, p2, d3, s3, k0);
            if (!dry.ok) return fail();
            double lam = regime_b_weight(dry.a_min, opt_.blend);
            double bs = lam > 0 ? scale_for(cascade_w(c, s2, s3)) : 1.0;
            // each endpoint term reaches the edge with the ray tube of its own wedge
            auto terms = corner_terms(inc, p.nodes[0].ref, src.pos, true, p2, lam, bs);
            if (terms.empty()) return fail();
            CVec3 E;
            for (const auto& t : terms) {
                auto r2 = diffract_edge(t.out, w2, p2, d3, s3, k0);
                if (!r2.ok) return fail();
                E += r2.out.E;
            }
            out = {finite(E), E, d3};
            break;
        }
        case Mech::RE: {
            const Vec3 &q = p.nodes[0].pos, &pe = p.nodes[1].pos;
            double s2, s3;
            Vec3 d2 = dir_len(q, pe, s2), d3 = dir_len(pe, obs, s3);
            Wave w = propagate(reflect(incident_wave(q), tr_.patch_normals()[p.nodes[0].ref]), s2, k0);
            w.k = d2;
            auto r = diffract_edge(w, ws.wedges[p.nodes[1].ref], pe, d3, s3, k0);
            if (!r.ok) return fail();
            out = {true, r.out.E, d3};
            break;
        }
        case Mech::ER: {
            const Vec3 &pe = p.nodes[0].pos, &q = p.nodes[1].pos;
            double s2, s3;
            Vec3 d2 = dir_len(pe, q, s2), d3 = dir_len(q, obs, s3);
            auto r = diffract_edge(incident_wave(pe), ws.wedges[p.nodes[0].ref], pe, d2, s2, k0);
            if (!r.ok) return fail();
            Wave w = propagate(reflect(r.out, tr_.patch_normals()[p.nodes[1].ref]), s3, k0);
            out = {finite(w.E), w.E, d3};
            break;
        }
        default:
            return fail();
    }
    if (!out.ok) return fail();
    return out;
}

cplx FieldEvaluator::project(const PathField& f) const {
    if (opt_.output == Output::VV) return dot(f.E, opt_.out_normal);
    return dot(cross(f.k, f.E), opt_.out_normal);
}

PointField FieldEvaluator::evaluate(const Vec3& obs, FieldStats* st) const {
    PointField r;
    Wave inc = incident_wave(obs);
    r.incident = project({true, inc.E, inc.k});
    for (const auto& p : tr_.trace(obs)) {
        PathField f = path_field(p, obs, st);
        if (!f.ok) continue;
        r.total += project(f);
        ++r.counts[static_cast<int>(p.mech)];
    }
    return r;
}

}  // namespace vdrt
