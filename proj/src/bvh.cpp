// SPDX-License-Identifier: Apache-2.0
#include "vdrt/bvh.hpp"

#include <algorithm>
#include <array>
#include <limits>

#include "vdrt/mesh.hpp"

namespace vdrt {

HitKind segment_hits_triangle(const Vec3& a, const Vec3& d, double tmin, double tmax,
                              const Vec3& v0, const Vec3& v1, const Vec3& v2, double* w) {
    // Moller-Trumbore with d unnormalized, t in segment units
    const double bt = 1e-9;
    Vec3 e1 = v1 - v0, e2 = v2 - v0;
    Vec3 p = cross(d, e2);
    double det = dot(e1, p);
    double scale = norm(e1) * norm(e2) * norm(d);
    if (std::abs(det) <= 1e-12 * scale) return HitKind::None;
    double inv = 1.0 / det;
    Vec3 s = a - v0;
    double u = dot(s, p) * inv;
    if (u < -bt || u > 1.0 + bt) return HitKind::None;
    Vec3 q = cross(s, e1);
    double v = dot(d, q) * inv;
    if (v < -bt || u + v > 1.0 + bt) return HitKind::None;
    double t = dot(e2, q) * inv;
    if (!(t > tmin && t < tmax)) return HitKind::None;
    double w0 = 1 - u - v;
    if (w) {
        w[0] = w0;
        w[1] = u;
        w[2] = v;
    }
    if (u > bt && v > bt && w0 > bt) return HitKind::Interior;
    return HitKind::Boundary;
}

bool boundary_contact_enters(const FacetMesh& m, int f, const double* w, const Vec3& dir) {
    const double bt = 1e-9, tau = 1e-9;
    Vec3 d = normalize(dir);
    int zeros = 0, k0 = -1, kv = -1;
    for (int k = 0; k < 3; ++k) {
        if (w[k] <= bt) {
            ++zeros;
            k0 = k;
        } else {
            kv = k;
        }
    }
    if (zeros == 1) {
        int h = 3 * f + (k0 + 1) % 3;
        int t = m.twin[h];
        const Vec3& n1 = m.normals[f];
        if (t < 0) return false;
        int g = t / 3;
        const Vec3& n2 = m.normals[g];
        const Vec3& apex = m.vertices[m.facets[g][(t % 3 + 2) % 3]];
        double side = dot(apex - m.vertices[m.facets[f][0]], n1);
        double d1 = dot(d, n1), d2 = dot(d, n2);
        double tol = 1e-9 * m.diameter;
        if (side < -tol) return d1 < -tau && d2 < -tau;  // convex edge
        if (side > tol) return d1 < -tau || d2 < -tau;   // reflex edge
        return d1 < -tau;
    }
    // vertex contact: the remaining weight sits on one vertex
    int vtx = m.facets[f][kv];
    double best = -1e300;
    for (int g : m.vertex_facets[vtx]) best = std::max(best, dot(d, m.normals[g]));
    return best < -tau;
}

namespace {

bool slab(const Vec3& a, const Vec3& inv, double tmin, double tmax, const Vec3& lo, const Vec3& hi) {
    for (int i = 0; i < 3; ++i) {
        double t0 = (lo[i] - a[i]) * inv[i];
        double t1 = (hi[i] - a[i]) * inv[i];
        if (t0 > t1) std::swap(t0, t1);
        // NaN (0*inf) keeps the box
        if (t0 > tmin) tmin = t0;
        if (t1 < tmax) tmax = t1;
        if (tmin > tmax) return false;
    }
    return true;
}

bool skipped(std::span<const int> skip, int f) {
    for (int s : skip)
        if (s == f) return true;
    return false;
}

}  // namespace

Bvh::Bvh(const FacetMesh& m) {
    auto topo = std::make_shared<FacetMesh>();
    topo->vertices = m.vertices;
    topo->facets = m.facets;
    topo->normals = m.normals;
    topo->twin = m.twin;
    topo->vertex_facets = m.vertex_facets;
    topo->diameter = m.diameter;
    topo_ = topo;
    int nf = static_cast<int>(m.facets.size());
    order_.resize(nf);
    cen_.resize(nf);
    tri_.resize(nf);
    for (int f = 0; f < nf; ++f) {
        order_[f] = f;
        for (int k = 0; k < 3; ++k) tri_[f][k] = m.vertices[m.facets[f][k]];
        cen_[f] = (tri_[f][0] + tri_[f][1] + tri_[f][2]) / 3.0;
    }
    nodes_.reserve(2 * nf + 1);
    if (nf > 0) build(0, nf, 0);
}

int Bvh::build(int first, int count, int depth) {
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (int i = first; i < first + count; ++i)
        for (const auto& v : tri_[order_[i]])
            for (int k = 0; k < 3; ++k) {
                lo[k] = std::min(lo[k], v[k]);
                hi[k] = std::max(hi[k], v[k]);
            }
    nodes_[id].lo = lo;
    nodes_[id].hi = hi;
    if (count <= 4 || depth > 40) {
        nodes_[id].first = first;
        nodes_[id].count = count;
        return id;
    }
    int axis = 0;
    Vec3 ext = hi - lo;
    if (ext.y > ext.x) axis = 1;
    if (ext.z > ext[axis]) axis = 2;
    int mid = first + count / 2;
    std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                     [&](int a, int b) {
                         if (cen_[a][axis] != cen_[b][axis]) return cen_[a][axis] < cen_[b][axis];
                         return a < b;
                     });
    int l = build(first, mid - first, depth + 1);
    int r = build(mid, first + count - mid, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
}

bool Bvh::occluded(const Vec3& a, const Vec3& b, double eps, std::span<const int> skip) const {
    if (nodes_.empty()) return false;
    Vec3 d = b - a;
    double len = norm(d);
    if (len <= 2 * eps) return false;
    double tmin = eps / len, tmax = 1.0 - eps / len;
    Vec3 inv{1.0 / d.x, 1.0 / d.y, 1.0 / d.z};
    int stack[128];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& nd = nodes_[stack[--sp]];
        if (!slab(a, inv, 0.0, 1.0, nd.lo, nd.hi)) continue;
        if (nd.left < 0) {
            for (int i = nd.first; i < nd.first + nd.count; ++i) {
                int f = order_[i];
                if (skipped(skip, f)) continue;
                double w[3];
                HitKind h = segment_hits_triangle(a, d, tmin, tmax, tri_[f][0], tri_[f][1], tri_[f][2], w);
                if (h == HitKind::Interior) return true;
                if (h == HitKind::Boundary && boundary_contact_enters(*topo_, f, w, d)) return true;
            }
        } else {
            stack[sp++] = nd.left;
            stack[sp++] = nd.right;
        }
    }
    return false;
}

bool occluded_brute(const FacetMesh& m, const Vec3& a, const Vec3& b, double eps,
                    std::span<const int> skip) {
    Vec3 d = b - a;
    double len = norm(d);
    if (len <= 2 * eps) return false;
    double tmin = eps / len, tmax = 1.0 - eps / len;
    for (int f = 0; f < static_cast<int>(m.facets.size()); ++f) {
        if (skipped(skip, f)) continue;
        const auto& t = m.facets[f];
        double w[3];
        HitKind h = segment_hits_triangle(a, d, tmin, tmax, m.vertices[t[0]], m.vertices[t[1]],
                                          m.vertices[t[2]], w);
        if (h == HitKind::Interior) return true;
        if (h == HitKind::Boundary && boundary_contact_enters(m, f, w, d)) return true;
    }
    return false;
}

}  // namespace vdrt
