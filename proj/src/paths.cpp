// SPDX-License-Identifier: Apache-2.0
#include "vdrt/paths.hpp"

#include <algorithm>

#include "vdrt/bvh.hpp"
#include "vdrt/utd.hpp"

namespace vdrt {

const char* to_string(Mech m) {
    switch (m) {
        case Mech::LOS: return "LOS";
        case Mech::R: return "R";
        case Mech::RR: return "RR";
        case Mech::E: return "E";
        case Mech::V: return "V";
        case Mech::EE: return "EE";
        case Mech::EV: return "EV";
        case Mech::VE: return "VE";
        case Mech::RE: return "RE";
        case Mech::ER: return "ER";
        default: return "?";
    }
}

double InteractionPath::length() const {
    double s = 0;
    for (int i = 0; i < nlegs; ++i) s += legs[i];
    return s;
}

std::optional<double> edge_stationary_z(const Vec3& p0, const Vec3& e, const Source& src,
                                        const Vec3& obs) {
    if (!src.plane()) return edge_stationary_z_point(p0, e, src.pos, obs);
    double c = dot(src.dir, e);
    double zo = dot(obs - p0, e);
    double rho = norm(obs - p0 - e * zo);
    if (rho < 1e-12 || std::abs(c) >= 1.0 - 1e-15) return std::nullopt;
    return zo - c * rho / std::sqrt(1 - c * c);
}

std::optional<double> edge_stationary_z_point(const Vec3& p0, const Vec3& e, const Vec3& up,
                                              const Vec3& obs) {
    double zs = dot(up - p0, e), zo = dot(obs - p0, e);
    double rs = norm(up - p0 - e * zs), ro = norm(obs - p0 - e * zo);
    if (rs + ro < 1e-12 || ro < 1e-12) return std::nullopt;
    return zs + (zo - zs) * rs / (rs + ro);
}

std::optional<std::array<double, 2>> double_edge_stationary(const Vec3& a0, const Vec3& e1,
                                                            double len1, const Vec3& b0,
                                                            const Vec3& e2, double len2,
                                                            const Vec3& nu, const Source& src,
                                                            const Vec3& obs) {
    Vec3 m1 = normalize(cross(nu, e1));
    if (dot(m1, b0 + e2 * (0.5 * len2) - a0) > 0) m1 = -m1;
    Vec3 m2 = normalize(cross(nu, e2));
    if (dot(m2, a0 + e1 * (0.5 * len1) - b0) > 0) m2 = -m2;

    double zo = dot(obs - b0, e2);
    double ro = norm(obs - b0 - e2 * zo);
    Vec3 Op = b0 + e2 * zo + m2 * ro;

    Vec3 d;
    double tmax = 1e300;
    if (src.plane()) {
        double c1 = dot(src.dir, e1);
        if (std::abs(c1) >= 1 - 1e-12) return std::nullopt;
        d = e1 * c1 - m1 * std::sqrt(1 - c1 * c1);
    } else {
        double zs = dot(src.pos - a0, e1);
        double rs = norm(src.pos - a0 - e1 * zs);
        Vec3 Sp = a0 + e1 * zs + m1 * rs;
        d = Op - Sp;
        tmax = norm(d);
        if (tmax < 1e-12) return std::nullopt;
        d = d / tmax;
    }
    auto hit = [&](const Vec3& p, const Vec3& e, double& tau, double& z) {
        double den = dot(cross(d, e), nu);
        if (std::abs(den) < 1e-12) return false;
        tau = dot(cross(Op - p, e), nu) / den;
        z = dot(Op - d * tau - p, e);
        return true;
    };
    double t1, t2, z1, z2;
    if (!hit(a0, e1, t1, z1) || !hit(b0, e2, t2, z2)) return std::nullopt;
    if (!(t2 > 0 && t1 > t2 && t1 < tmax)) return std::nullopt;
    return std::array<double, 2>{z1, z2};
}

double keller_residual(const Vec3& in, const Vec3& out, const Vec3& e) {
    auto ang = [&](const Vec3& v) {
        return std::acos(std::clamp(dot(normalize(v), e), -1.0, 1.0));
    };
    return std::abs(ang(in) - ang(out));
}

PathTracer::PathTracer(const FacetMesh& mesh, const WedgeSet& ws, const Source& src,
                       const Toggles& tg, const Options& opt)
    : mesh_(mesh), ws_(ws), src_(src), tg_(tg), opt_(opt) {
    eps_ = opt_.eps_rel * mesh_.diameter;
    center_ = (mesh_.lo + mesh_.hi) * 0.5;
    far_ = 2 * mesh_.diameter + 1.0;
    src_.dir = normalize(src_.dir);
    patch_normal_.assign(ws_.num_patches, {});
    patch_facets_.assign(ws_.num_patches, {});
    for (int f = 0; f < static_cast<int>(mesh_.facets.size()); ++f) {
        int p = ws_.facet_patch[f];
        if (patch_facets_[p].empty()) patch_normal_[p] = mesh_.normals[f];
        patch_facets_[p].push_back(f);
    }
    precompute();
}

bool PathTracer::visible(const Vec3& a, const Vec3& b, std::span<const int> skip) const {
    if (opt_.brute_occlusion) return !occluded_brute(mesh_, a, b, eps_, skip);
    return !mesh_.bvh->occluded(a, b, eps_, skip);
}

Vec3 PathTracer::incident_dir(const Vec3& p) const {
    return src_.plane() ? src_.dir : normalize(p - src_.pos);
}

double PathTracer::source_leg(const Vec3& p) const {
    return src_.plane() ? dot(src_.dir, p - center_) + far_ : norm(p - src_.pos);
}

bool PathTracer::lit(const Vec3& p, std::span<const int> skip) const {
    if (src_.plane()) return visible(p - src_.dir * (2 * far_), p, skip);
    return visible(src_.pos, p, skip);
}

std::vector<int> PathTracer::wedge_skip(int w) const {
    return {ws_.wedges[w].face0, ws_.wedges[w].facen};
}

int PathTracer::patch_facet_containing(int patch, const Vec3& p) const {
    for (int f : patch_facets_[patch]) {
        const auto& t = mesh_.facets[f];
        const Vec3 &a = mesh_.vertices[t[0]], &b = mesh_.vertices[t[1]], &c = mesh_.vertices[t[2]];
        Vec3 n = cross(b - a, c - a);
        double nn = norm2(n);
        double u = dot(cross(c - b, p - b), n) / nn;
        double v = dot(cross(a - c, p - c), n) / nn;
        double w = 1 - u - v;
        const double tol = -1e-9;
        if (u >= tol && v >= tol && w >= tol) return f;
    }
    return -1;
}

bool PathTracer::exterior_ok(int wi, const Vec3& in_dir, const Vec3& out_dir) const {
    double a, b;
    const Wedge& w = ws_.wedges[wi];
    return wedge_azimuth(w, -in_dir, a) && wedge_azimuth(w, out_dir, b);
}

bool PathTracer::corner_exterior(int ci, const Vec3& dir) const {
    // a corner on an open boundary has no interior solid angle
    for (int wi : ws_.corners[ci].wedges)
        if (ws_.wedges[wi].facen < 0) return true;
    double best = -1e300;
    for (int f : ws_.corners[ci].facets) best = std::max(best, dot(dir, mesh_.normals[f]));
    return best >= -1e-9;
}

bool PathTracer::snapped_at(int wi, bool at_p0, const Vec3* up, const Vec3& down) const {
    const Wedge& w = ws_.wedges[wi];
    auto z = up ? edge_stationary_z_point(w.p0, w.e, *up, down) : edge_stationary_z(w.p0, w.e, src_, down);
    if (!z) return false;
    double lim = opt_.snap_frac * w.length;
    return at_p0 ? (*z >= 0 && *z <= lim) : (*z >= w.length - lim && *z <= w.length);
}

void PathTracer::precompute() {
    const int nc = static_cast<int>(ws_.corners.size());
    const int nw = static_cast<int>(ws_.wedges.size());
    corner_lit_.assign(nc, 0);
    for (int c = 0; c < nc; ++c) {
        const Corner& cr = ws_.corners[c];
        corner_lit_[c] = corner_exterior(c, -incident_dir(cr.pos)) && lit(cr.pos, cr.facets);
    }
    if (tg_.EE)
        for (int p = 0; p < ws_.num_patches; ++p)
            for (int a : ws_.patch_wedges[p])
                for (int b : ws_.patch_wedges[p])
                    if (a != b) ee_.push_back({a, b, p});
    if (tg_.EV) {
        for (int wi = 0; wi < nw; ++wi) {
            const Wedge& w = ws_.wedges[wi];
            auto wskip = wedge_skip(wi);
            for (int c = 0; c < nc; ++c) {
                const Corner& cr = ws_.corners[c];
                if (cr.vertex == w.v0 || cr.vertex == w.v1) continue;
                auto z = edge_stationary_z(w.p0, w.e, src_, cr.pos);
                double lim = opt_.snap_frac * w.length;
                if (!z || *z <= lim || *z >= w.length - lim) continue;
                Vec3 p1 = w.p0 + w.e * *z;
                double s2 = norm(cr.pos - p1);
                if (s2 < opt_.min_leg) continue;
                Vec3 out = (cr.pos - p1) / s2;
                if (!exterior_ok(wi, incident_dir(p1), out) || !corner_exterior(c, -out)) continue;
                std::vector<int> skip = cr.facets;
                skip.insert(skip.end(), wskip.begin(), wskip.end());
                if (!lit(p1, wskip) || !visible(p1, cr.pos, skip)) continue;
                ev_.push_back({wi, c, *z, p1});
            }
        }
    }
    if (tg_.VE) {
        for (int c = 0; c < nc; ++c) {
            if (!corner_lit_[c]) continue;
            const Corner& cr = ws_.corners[c];
            for (int wi = 0; wi < nw; ++wi) {
                const Wedge& w = ws_.wedges[wi];
                if (cr.vertex == w.v0 || cr.vertex == w.v1) continue;
                std::vector<int> skip = cr.facets;
                skip.push_back(w.face0);
                skip.push_back(w.facen);
                bool any = false;
                for (int k = 1; k <= 5 && !any; ++k) {
                    Vec3 p = lerp(w.p0, w.p1, k / 6.0);
                    Vec3 d = normalize(p - cr.pos);
                    double a;
                    any = corner_exterior(c, d) && wedge_azimuth(w, -d, a) && visible(cr.pos, p, skip);
                }
                if (any) ve_.push_back({c, wi});
            }
        }
    }
}

void PathTracer::trace_direct_and_reflections(const Vec3& obs, std::vector<InteractionPath>& out) const {
    // an observation point on top of a point source has no direct ray
    bool on_source = !src_.plane() && norm(obs - src_.pos) < opt_.min_leg;
    if (tg_.los && !on_source && lit(obs, {})) {
        InteractionPath p;
        p.mech = Mech::LOS;
        p.legs[0] = source_leg(obs);
        p.nlegs = 1;
        out.push_back(p);
    }
    if (tg_.reflection_order < 1) return;
    const int np = ws_.num_patches;
    auto mirror = [](const Vec3& x, const Vec3& p0, const Vec3& n) {
        return x - n * (2 * dot(x - p0, n));
    };
    // reflection point on patch `p` for an upstream point/direction and a downstream point
    auto refl_point = [&](int p, bool plane, const Vec3& dir, const Vec3& up, const Vec3& down,
                          Vec3& q) {
        const Vec3& n = patch_normal_[p];
        const Vec3& p0 = mesh_.vertices[mesh_.facets[patch_facets_[p][0]][0]];
        if (dot(down - p0, n) <= 0) return false;
        if (plane) {
            if (dot(dir, n) >= -1e-12) return false;
            Vec3 r = dir - n * (2 * dot(dir, n));
            q = down - r * (dot(down - p0, n) / dot(r, n));
        } else {
            if (dot(up - p0, n) <= 0) return false;
            Vec3 im = mirror(up, p0, n);
            Vec3 d = down - im;
            double den = dot(d, n);
            if (den <= 0) return false;
            q = im + d * (dot(p0 - im, n) / den);
        }
        return true;
    };
    for (int p = 0; p < np; ++p) {
        Vec3 q;
        if (!refl_point(p, src_.plane(), src_.dir, src_.pos, obs, q)) continue;
        int f = patch_facet_containing(p, q);
        if (f < 0) continue;
        double l2 = norm(obs - q);
        if (l2 < opt_.min_leg || (!src_.plane() && norm(q - src_.pos) < opt_.min_leg)) continue;
        int sk[1] = {f};
        if (!lit(q, sk) || !visible(q, obs, sk)) continue;
        InteractionPath path;
        path.mech = Mech::R;
        path.nodes[0] = {NodeKind::Reflection, q, p, 0};
        path.nnodes = 1;
        path.legs = {source_leg(q), l2, 0};
        path.nlegs = 2;
        out.push_back(path);
    }
    if (tg_.reflection_order < 2) return;
    for (int a = 0; a < np; ++a) {
        const Vec3& na = patch_normal_[a];
        const Vec3& pa = mesh_.vertices[mesh_.facets[patch_facets_[a][0]][0]];
        for (int b = 0; b < np; ++b) {
            if (a == b) continue;
            Vec3 q1, q2;
            if (src_.plane()) {
                if (dot(src_.dir, na) >= -1e-12) continue;
                Vec3 d1 = src_.dir - na * (2 * dot(src_.dir, na));
                if (!refl_point(b, true, d1, {}, obs, q2)) continue;
                if (dot(q2 - pa, na) <= 0) continue;
                q1 = q2 - d1 * (dot(q2 - pa, na) / dot(d1, na));
            } else {
                if (dot(src_.pos - pa, na) <= 0) continue;
                Vec3 s1 = mirror(src_.pos, pa, na);
                if (!refl_point(b, false, {}, s1, obs, q2)) continue;
                Vec3 d = q2 - s1;
                double den = dot(d, na);
                if (den <= 0 || dot(q2 - pa, na) <= 0) continue;
                q1 = s1 + d * (dot(pa - s1, na) / den);
            }
            int fa = patch_facet_containing(a, q1), fb = patch_facet_containing(b, q2);
            if (fa < 0 || fb < 0) continue;
            double l2 = norm(q2 - q1), l3 = norm(obs - q2);
            if (l2 < opt_.min_leg || l3 < opt_.min_leg) continue;
            int s1k[1] = {fa}, s2k[2] = {fa, fb}, s3k[1] = {fb};
            if (!lit(q1, s1k) || !visible(q1, q2, s2k) || !visible(q2, obs, s3k)) continue;
            InteractionPath path;
            path.mech = Mech::RR;
            path.nodes[0] = {NodeKind::Reflection, q1, a, 0};
            path.nodes[1] = {NodeKind::Reflection, q2, b, 0};
            path.nnodes = 2;
            path.legs = {source_leg(q1), l2, l3};
            path.nlegs = 3;
            out.push_back(path);
        }
    }
}

std::optional<InteractionNode> PathTracer::find_edge_diffraction_point(int wi, const Vec3& obs) const {
    const Wedge& w = ws_.wedges[wi];
    auto z = edge_stationary_z(w.p0, w.e, src_, obs);
    double lim = opt_.snap_frac * w.length;
    if (!z || *z <= lim || *z >= w.length - lim) return std::nullopt;
    Vec3 q = w.p0 + w.e * *z;
    double l = norm(obs - q);
    if (l < opt_.min_leg) return std::nullopt;
    if (!src_.plane() && norm(q - src_.pos) < opt_.min_leg) return std::nullopt;
    if (!exterior_ok(wi, incident_dir(q), (obs - q) / l)) return std::nullopt;
    int sk[2] = {w.face0, w.facen};
    if (!lit(q, sk) || !visible(q, obs, sk)) return std::nullopt;
    return InteractionNode{NodeKind::Edge, q, wi, *z / w.length};
}

void PathTracer::find_edge_paths(const Vec3& obs, std::vector<InteractionPath>& out) const {
    for (int wi = 0; wi < static_cast<int>(ws_.wedges.size()); ++wi) {
        auto nd = find_edge_diffraction_point(wi, obs);
        if (!nd) continue;
        InteractionPath p;
        p.mech = Mech::E;
        p.nodes[0] = *nd;
        p.nnodes = 1;
        p.legs = {source_leg(nd->pos), norm(obs - nd->pos), 0};
        p.nlegs = 2;
        out.push_back(p);
    }
}

void PathTracer::find_vertex_paths(const Vec3& obs, std::vector<InteractionPath>& out) const {
    for (int c = 0; c < static_cast<int>(ws_.corners.size()); ++c) {
        if (!corner_lit_[c]) continue;
        const Corner& cr = ws_.corners[c];
        double l = norm(obs - cr.pos);
        if (l < opt_.min_leg || !corner_exterior(c, (obs - cr.pos) / l)) continue;
        if (!visible(cr.pos, obs, cr.facets)) continue;
        InteractionPath p;
        p.mech = Mech::V;
        p.nodes[0] = {NodeKind::Vertex, cr.pos, c, 0};
        p.nnodes = 1;
        p.legs = {source_leg(cr.pos), l, 0};
        p.nlegs = 2;
        out.push_back(p);
    }
}

std::optional<std::array<InteractionNode, 2>> PathTracer::find_double_edge_points(int i1, int i2, int patch,
                                                                                  const Vec3& obs) const {
    const Wedge& w1 = ws_.wedges[i1];
    const Wedge& w2 = ws_.wedges[i2];
    auto zz = double_edge_stationary(w1.p0, w1.e, w1.length, w2.p0, w2.e, w2.length,
                                     patch_normal_[patch], src_, obs);
    if (!zz) return std::nullopt;
    double l1 = opt_.snap_frac * w1.length, l2 = opt_.snap_frac * w2.length;
    double z1 = (*zz)[0], z2 = (*zz)[1];
    if (z1 <= l1 || z1 >= w1.length - l1 || z2 <= l2 || z2 >= w2.length - l2) return std::nullopt;
    Vec3 p1 = w1.p0 + w1.e * z1, p2 = w2.p0 + w2.e * z2;
    double s2 = norm(p2 - p1), s3 = norm(obs - p2);
    if (s2 < opt_.min_leg || s3 < opt_.min_leg) return std::nullopt;
    if (!src_.plane() && norm(p1 - src_.pos) < opt_.min_leg) return std::nullopt;
    Vec3 d12 = (p2 - p1) / s2;
    if (!exterior_ok(i1, incident_dir(p1), d12) || !exterior_ok(i2, d12, (obs - p2) / s3))
        return std::nullopt;
    int sk1[2] = {w1.face0, w1.facen}, sk2[2] = {w2.face0, w2.facen};
    int sk12[4] = {w1.face0, w1.facen, w2.face0, w2.facen};
    if (!lit(p1, sk1) || !visible(p1, p2, sk12) || !visible(p2, obs, sk2)) return std::nullopt;
    return std::array<InteractionNode, 2>{InteractionNode{NodeKind::Edge, p1, i1, z1 / w1.length},
                                          InteractionNode{NodeKind::Edge, p2, i2, z2 / w2.length}};
}

void PathTracer::find_cascade_paths(const Vec3& obs, std::vector<InteractionPath>& out) const {
    if (tg_.EE) {
        for (const auto& [a, b, p] : ee_) {
            auto nd = find_double_edge_points(a, b, p, obs);
            if (!nd) continue;
            InteractionPath path;
            path.mech = Mech::EE;
            path.nodes = *nd;
            path.nnodes = 2;
            path.legs = {source_leg((*nd)[0].pos), norm((*nd)[1].pos - (*nd)[0].pos),
                         norm(obs - (*nd)[1].pos)};
            path.nlegs = 3;
            out.push_back(path);
        }
    }
    const int nc = static_cast<int>(ws_.corners.size());
    std::vector<signed char> cvis(nc, -1);
    auto corner_sees_obs = [&](int c) {
        if (cvis[c] < 0) {
            const Corner& cr = ws_.corners[c];
            double l = norm(obs - cr.pos);
            cvis[c] = l >= opt_.min_leg && corner_exterior(c, (obs - cr.pos) / l) &&
                      visible(cr.pos, obs, cr.facets);
        }
        return cvis[c] == 1;
    };
    if (tg_.EV) {
        for (const auto& pr : ev_) {
            if (!corner_sees_obs(pr.corner)) continue;
            const Corner& cr = ws_.corners[pr.corner];
            InteractionPath path;
            path.mech = Mech::EV;
            path.nodes[0] = {NodeKind::Edge, pr.p1, pr.wedge, pr.z / ws_.wedges[pr.wedge].length};
            path.nodes[1] = {NodeKind::Vertex, cr.pos, pr.corner, 0};
            path.nnodes = 2;
            path.legs = {source_leg(pr.p1), norm(cr.pos - pr.p1), norm(obs - cr.pos)};
            path.nlegs = 3;
            out.push_back(path);
        }
    }
    if (tg_.VE) {
        for (const auto& [c, wi] : ve_) {
            const Corner& cr = ws_.corners[c];
            const Wedge& w = ws_.wedges[wi];
            auto z = edge_stationary_z_point(w.p0, w.e, cr.pos, obs);
            double lim = opt_.snap_frac * w.length;
            if (!z || *z <= lim || *z >= w.length - lim) continue;
            Vec3 p2 = w.p0 + w.e * *z;
            double s2 = norm(p2 - cr.pos), s3 = norm(obs - p2);
            if (s2 < opt_.min_leg || s3 < opt_.min_leg) continue;
            Vec3 d = (p2 - cr.pos) / s2;
            if (!corner_exterior(c, d) || !exterior_ok(wi, d, (obs - p2) / s3)) continue;
            std::vector<int> skip = cr.facets;
            skip.push_back(w.face0);
            skip.push_back(w.facen);
            int sk2[2] = {w.face0, w.facen};
            if (!visible(cr.pos, p2, skip) || !visible(p2, obs, sk2)) continue;
            InteractionPath path;
            path.mech = Mech::VE;
            path.nodes[0] = {NodeKind::Vertex, cr.pos, c, 0};
            path.nodes[1] = {NodeKind::Edge, p2, wi, *z / w.length};
            path.nnodes = 2;
            path.legs = {source_leg(cr.pos), s2, s3};
            path.nlegs = 3;
            out.push_back(path);
        }
    }
}

void PathTracer::find_hybrid_paths(const Vec3& obs, std::vector<InteractionPath>& out) const {
    const int np = ws_.num_patches;
    const int nw = static_cast<int>(ws_.wedges.size());
    auto mirror = [](const Vec3& x, const Vec3& p0, const Vec3& n) {
        return x - n * (2 * dot(x - p0, n));
    };
    for (int p = 0; p < np; ++p) {
        const Vec3& n = patch_normal_[p];
        const Vec3& p0 = mesh_.vertices[mesh_.facets[patch_facets_[p][0]][0]];
        for (int wi = 0; wi < nw; ++wi) {
            const Wedge& w = ws_.wedges[wi];
            if (w.patch0 == p || w.patchn == p) continue;
            double lim = opt_.snap_frac * w.length;
            int skw[2] = {w.face0, w.facen};
            if (tg_.RE) {
                // reflect first: the reflected source is an image point or a mirrored direction
                Source img = src_;
                bool ok = true;
                if (src_.plane()) {
                    ok = dot(src_.dir, n) < -1e-12;
                    img.dir = src_.dir - n * (2 * dot(src_.dir, n));
                } else {
                    ok = dot(src_.pos - p0, n) > 0;
                    img.pos = mirror(src_.pos, p0, n);
                }
                auto z = ok ? edge_stationary_z(w.p0, w.e, img, obs) : std::nullopt;
                if (z && *z > lim && *z < w.length - lim) {
                    Vec3 pe = w.p0 + w.e * *z;
                    Vec3 din = img.plane() ? img.dir : normalize(pe - img.pos);
                    double h = dot(pe - p0, n), dn = dot(din, n);
                    if (h > 0 && dn > 1e-12) {
                        Vec3 q = pe - din * (h / dn);
                        int f = patch_facet_containing(p, q);
                        double s2 = norm(pe - q), s3 = norm(obs - pe);
                        if (f >= 0 && s2 > opt_.min_leg && s3 > opt_.min_leg &&
                            exterior_ok(wi, din, (obs - pe) / s3)) {
                            int skf[1] = {f};
                            int skfw[3] = {f, w.face0, w.facen};
                            if (lit(q, skf) && visible(q, pe, skfw) && visible(pe, obs, skw)) {
                                InteractionPath path;
                                path.mech = Mech::RE;
                                path.nodes[0] = {NodeKind::Reflection, q, p, 0};
                                path.nodes[1] = {NodeKind::Edge, pe, wi, *z / w.length};
                                path.nnodes = 2;
                                path.legs = {source_leg(q), s2, s3};
                                path.nlegs = 3;
                                out.push_back(path);
                            }
                        }
                    }
                }
            }
            if (tg_.ER) {
                if (dot(obs - p0, n) <= 0) continue;
                Vec3 oi = mirror(obs, p0, n);
                auto z = edge_stationary_z(w.p0, w.e, src_, oi);
                if (!z || *z <= lim || *z >= w.length - lim) continue;
                Vec3 pe = w.p0 + w.e * *z;
                double h = dot(pe - p0, n);
                if (h <= 0) continue;
                Vec3 d = oi - pe;
                Vec3 q = pe + d * (h / (h - dot(oi - p0, n)));
                int f = patch_facet_containing(p, q);
                double s2 = norm(q - pe), s3 = norm(obs - q);
                if (f < 0 || s2 < opt_.min_leg || s3 < opt_.min_leg) continue;
                if (!exterior_ok(wi, incident_dir(pe), (q - pe) / s2)) continue;
                int skf[1] = {f};
                int skfw[3] = {f, w.face0, w.facen};
                if (!lit(pe, skw) || !visible(pe, q, skfw) || !visible(q, obs, skf)) continue;
                InteractionPath path;
                path.mech = Mech::ER;
                path.nodes[0] = {NodeKind::Edge, pe, wi, *z / w.length};
                path.nodes[1] = {NodeKind::Reflection, q, p, 0};
                path.nnodes = 2;
                path.legs = {source_leg(pe), s2, s3};
                path.nlegs = 3;
                out.push_back(path);
            }
        }
    }
}

std::vector<InteractionPath> PathTracer::trace(const Vec3& obs) const {
    std::vector<InteractionPath> out;
    trace_direct_and_reflections(obs, out);
    if (tg_.E) find_edge_paths(obs, out);
    if (tg_.V) find_vertex_paths(obs, out);
    find_cascade_paths(obs, out);
    if (tg_.RE || tg_.ER) find_hybrid_paths(obs, out);
    std::stable_sort(out.begin(), out.end(), [](const InteractionPath& a, const InteractionPath& b) {
        if (a.mech != b.mech) return a.mech < b.mech;
        return a.length() < b.length();
    });
    return out;
}

}  // namespace vdrt
