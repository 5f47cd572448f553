// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <numeric>

#include "vdrt/mesh.hpp"

namespace vdrt {

namespace {

int find(std::vector<int>& parent, int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
}

int third_vertex(const FacetMesh& m, int f, int a, int b) {
    for (int k = 0; k < 3; ++k)
        if (m.facets[f][k] != a && m.facets[f][k] != b) return m.facets[f][k];
    return m.facets[f][0];
}

Vec3 in_face_dir(const FacetMesh& m, int /*f*/, const Vec3& a, const Vec3& e, int c) {
    Vec3 d = m.vertices[c] - a;
    return normalize(d - e * dot(d, e));
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Under: return "under";
        case Verdict::Adequate: return "adequate";
        case Verdict::Over: return "over";
    }
    return "?";
}

WedgeSet extract_wedges_and_corners(const FacetMesh& m, const ExtractOptions& opt) {
    WedgeSet ws;
    const double flat = opt.flat_threshold_deg * kPi / 180.0;
    int nf = static_cast<int>(m.facets.size());

    std::vector<int> parent(nf);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<Wedge> cand;

    for (int ei = 0; ei < static_cast<int>(m.edges.size()); ++ei) {
        const MeshEdge& me = m.edges[ei];
        const Vec3 a = m.vertices[me.v0], b = m.vertices[me.v1];
        Vec3 dir = normalize(b - a);
        Wedge w;
        w.edge = ei;
        w.face0 = me.f0;
        w.n0 = m.normals[me.f0];
        w.t0 = in_face_dir(m, me.f0, a, dir, third_vertex(m, me.f0, me.v0, me.v1));
        w.e = normalize(cross(w.t0, w.n0));
        if (me.f1 < 0) {
            if (!opt.boundary_edges) continue;
            w.n = 2.0;
            w.tn = w.t0;
            w.nn = -w.n0;
        } else {
            w.facen = me.f1;
            w.nn = m.normals[me.f1];
            w.tn = in_face_dir(m, me.f1, a, dir, third_vertex(m, me.f1, me.v0, me.v1));
            double ang = std::atan2(dot(w.tn, w.n0), dot(w.tn, w.t0));
            if (ang < 0) ang += 2 * kPi;
            w.n = ang / kPi;
            if (std::abs(w.n - 1.0) * kPi <= flat) {
                parent[find(parent, me.f0)] = find(parent, me.f1);
                continue;
            }
        }
        if (opt.excluded_group >= 0 &&
            (m.facet_group[w.face0] == opt.excluded_group ||
             (w.facen >= 0 && m.facet_group[w.facen] == opt.excluded_group)))
            continue;
        if (dot(b - a, w.e) >= 0) {
            w.p0 = a, w.p1 = b, w.v0 = me.v0, w.v1 = me.v1;
        } else {
            w.p0 = b, w.p1 = a, w.v0 = me.v1, w.v1 = me.v0;
        }
        w.length = norm(w.p1 - w.p0);
        cand.push_back(w);
    }

    // planar patches
    ws.facet_patch.assign(nf, -1);
    std::vector<int> root_id(nf, -1);
    for (int f = 0; f < nf; ++f) {
        int r = find(parent, f);
        if (root_id[r] < 0) root_id[r] = ws.num_patches++;
        ws.facet_patch[f] = root_id[r];
    }
    ws.patch_wedges.assign(ws.num_patches, {});
    for (auto& w : cand) {
        w.patch0 = ws.facet_patch[w.face0];
        w.patchn = w.facen >= 0 ? ws.facet_patch[w.facen] : w.patch0;
        int id = static_cast<int>(ws.wedges.size());
        ws.patch_wedges[w.patch0].push_back(id);
        if (w.patchn != w.patch0) ws.patch_wedges[w.patchn].push_back(id);
        ws.wedges.push_back(w);
    }

    // corners
    int nv = static_cast<int>(m.vertices.size());
    std::vector<std::vector<int>> vw(nv);
    for (int i = 0; i < static_cast<int>(ws.wedges.size()); ++i) {
        vw[ws.wedges[i].v0].push_back(i);
        vw[ws.wedges[i].v1].push_back(i);
    }
    ws.vertex_corner.assign(nv, -1);
    for (int v = 0; v < nv; ++v) {
        if (static_cast<int>(vw[v].size()) < opt.min_corner_wedges || vw[v].empty()) continue;
        if (opt.excluded_group >= 0) {
            bool touches = false;
            for (int f : m.vertex_facets[v]) touches |= m.facet_group[f] == opt.excluded_group;
            if (touches) continue;
        }
        Corner c;
        c.vertex = v;
        c.pos = m.vertices[v];
        c.facets = m.vertex_facets[v];
        Vec3 axis;
        for (int f : c.facets) axis += m.normals[f];
        axis = norm(axis) > 1e-12 ? normalize(axis) : Vec3{0, 0, 1};
        Vec3 u = any_perp(axis), w2 = cross(axis, u);
        std::vector<std::pair<double, int>> ord;
        for (int wi : vw[v]) {
            const Wedge& w = ws.wedges[wi];
            Vec3 d = (w.v0 == v ? w.p1 : w.p0) - c.pos;
            ord.push_back({std::atan2(dot(d, w2), dot(d, u)), wi});
        }
        std::sort(ord.begin(), ord.end());
        for (auto& [ang, wi] : ord) c.wedges.push_back(wi);
        ws.vertex_corner[v] = static_cast<int>(ws.corners.size());
        ws.corners.push_back(std::move(c));
    }
    return ws;
}

double chord_sagitta(double R, double E) {
    if (!std::isfinite(R)) return 0.0;
    double h = R * R - 0.25 * E * E;
    return h > 0 ? R - std::sqrt(h) : R;
}

DiscretizationReport discretization_report(const FacetMesh& m, double lambda, double hint,
                                           const ExtractOptions& opt) {
    if (lambda <= 0) throw MeshError("wavelength must be positive");
    DiscretizationReport r;
    r.wavelength = lambda;
    double total = 0;
    for (const auto& e : m.edges) total += norm(m.vertices[e.v1] - m.vertices[e.v0]);
    r.mean_edge = m.edges.empty() ? 0 : total / m.edges.size();

    ExtractOptions o = opt;
    o.boundary_edges = false;
    WedgeSet ws = extract_wedges_and_corners(m, o);

    // facet width across the curvature direction: strip facets use their short side
    auto facet_len = [&](int f) {
        double l[3];
        for (int k = 0; k < 3; ++k)
            l[k] = norm(m.vertices[m.facets[f][(k + 1) % 3]] - m.vertices[m.facets[f][k]]);
        double lo = std::min({l[0], l[1], l[2]}), hi = std::max({l[0], l[1], l[2]});
        return hi > 3 * lo ? lo : (l[0] + l[1] + l[2]) / 3.0;
    };

    std::vector<Vec3> pc(ws.num_patches);
    std::vector<double> pa(ws.num_patches, 0.0);
    for (int f = 0; f < static_cast<int>(m.facets.size()); ++f) {
        pc[ws.facet_patch[f]] += m.centroid(f) * m.areas[f];
        pa[ws.facet_patch[f]] += m.areas[f];
    }
    for (int p = 0; p < ws.num_patches; ++p) pc[p] = pc[p] / pa[p];

    std::vector<char> used(m.facets.size(), 0);
    std::vector<double> radii;
    double esum = 0;
    int ecount = 0;
    for (const auto& w : ws.wedges) {
        if (w.facen < 0) continue;
        double turn = std::abs(w.n - 1.0) * kPi;
        if (turn > kPi / 4) continue;  // sharp feature, not discretized curvature
        for (int f : {w.face0, w.facen})
            if (!used[f]) {
                used[f] = 1;
                double l = facet_len(f);
                esum += l;
                ++ecount;
                r.edge_wl.push_back(l / lambda);
            }
        Vec3 d = pc[w.patchn] - pc[w.patch0];
        d -= w.e * dot(d, w.e);
        radii.push_back(norm(d) / turn);
    }
    if (ecount == 0) {
        r.flat = true;
        r.R = std::numeric_limits<double>::infinity();
        r.E = r.mean_edge;
        r.E_wl = r.E / lambda;
        r.verdict = Verdict::Adequate;
        r.note = "no measurable curvature";
        return r;
    }
    r.E = esum / ecount;
    if (hint > 0) {
        r.R = hint;
    } else {
        std::nth_element(radii.begin(), radii.begin() + radii.size() / 2, radii.end());
        r.R = radii[radii.size() / 2];
    }
    r.E_wl = r.E / lambda;
    r.ratio = r.E * r.E / (r.R * lambda);
    r.sagitta = chord_sagitta(r.R, r.E);
    r.sagitta_wl = r.sagitta / lambda;
    if (r.ratio > 0.9)
        r.verdict = Verdict::Under;
    else if (r.ratio < 0.6 || r.E < 1.5 * lambda)
        r.verdict = Verdict::Over;
    else
        r.verdict = Verdict::Adequate;
    return r;
}

}  // namespace vdrt
