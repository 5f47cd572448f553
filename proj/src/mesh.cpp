// SPDX-License-Identifier: Apache-2.0
#include "vdrt/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "vdrt/bvh.hpp"

namespace vdrt {

bool FacetMesh::closed() const {
    return std::all_of(twin.begin(), twin.end(), [](int t) { return t >= 0; });
}

Vec3 FacetMesh::centroid(int f) const {
    const auto& t = facets[f];
    return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
}

FacetMesh build_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> facets,
                     std::vector<int> groups, const BuildOptions& opt) {
    FacetMesh m;
    m.vertices = std::move(vertices);
    m.facets = std::move(facets);
    int nv = static_cast<int>(m.vertices.size());
    int nf = static_cast<int>(m.facets.size());
    if (nv < 3 || nf < 1) throw MeshError("mesh needs at least 3 vertices and 1 facet");
    m.facet_group = groups.empty() ? std::vector<int>(nf, 0) : std::move(groups);
    if (static_cast<int>(m.facet_group.size()) != nf) throw MeshError("facet group count mismatch");

    m.normals.resize(nf);
    m.areas.resize(nf);
    m.vertex_facets.assign(nv, {});
    for (int f = 0; f < nf; ++f) {
        const auto& t = m.facets[f];
        for (int k = 0; k < 3; ++k)
            if (t[k] < 0 || t[k] >= nv)
                throw MeshError("facet " + std::to_string(f) + " references vertex out of range");
        Vec3 c = cross(m.vertices[t[1]] - m.vertices[t[0]], m.vertices[t[2]] - m.vertices[t[0]]);
        double a2 = norm(c);
        if (0.5 * a2 <= 1e-12)
            throw MeshError("facet " + std::to_string(f) + " has zero area");
        m.areas[f] = 0.5 * a2;
        m.normals[f] = c / a2;
        for (int k = 0; k < 3; ++k) m.vertex_facets[t[k]].push_back(f);
    }

    // directed half-edge lookup
    std::map<std::pair<int, int>, std::vector<int>> directed;
    for (int f = 0; f < nf; ++f)
        for (int k = 0; k < 3; ++k)
            directed[{m.facets[f][k], m.facets[f][(k + 1) % 3]}].push_back(3 * f + k);

    m.twin.assign(3 * nf, -1);
    m.half_edge_edge.assign(3 * nf, -1);
    auto edge_name = [](int a, int b) {
        return std::to_string(std::min(a, b) + 1) + "-" + std::to_string(std::max(a, b) + 1);
    };
    for (int f = 0; f < nf; ++f) {
        for (int k = 0; k < 3; ++k) {
            int h = 3 * f + k;
            if (m.half_edge_edge[h] >= 0) continue;
            int a = m.facets[f][k], b = m.facets[f][(k + 1) % 3];
            const auto& same = directed[{a, b}];
            auto it = directed.find({b, a});
            std::size_t opp = it == directed.end() ? 0 : it->second.size();
            if (same.size() > 1 || opp > 1) {
                m.nonmanifold.push_back(edge_name(a, b));
                for (int hh : same) m.half_edge_edge[hh] = static_cast<int>(m.edges.size());
                if (opp)
                    for (int hh : it->second) m.half_edge_edge[hh] = static_cast<int>(m.edges.size());
                m.edges.push_back({a, b, f, -1});
                continue;
            }
            MeshEdge e{a, b, f, -1};
            m.half_edge_edge[h] = static_cast<int>(m.edges.size());
            if (opp == 1) {
                int t = it->second[0];
                m.twin[h] = t;
                m.twin[t] = h;
                e.f1 = t / 3;
                m.half_edge_edge[t] = static_cast<int>(m.edges.size());
            }
            m.edges.push_back(e);
        }
    }
    if (static_cast<int>(m.nonmanifold.size()) > opt.max_nonmanifold) {
        std::string msg = "non-manifold edges:";
        for (const auto& s : m.nonmanifold) msg += " " + s;
        throw MeshError(msg);
    }

    m.lo = {1e300, 1e300, 1e300};
    m.hi = {-1e300, -1e300, -1e300};
    for (const auto& v : m.vertices)
        for (int k = 0; k < 3; ++k) {
            m.lo[k] = std::min(m.lo[k], v[k]);
            m.hi[k] = std::max(m.hi[k], v[k]);
        }
    m.diameter = norm(m.hi - m.lo);
    m.bvh = std::make_shared<Bvh>(m);
    return m;
}

namespace {

FacetMesh load_text(std::istream& in, const BuildOptions& opt) {
    std::vector<Vec3> v;
    std::vector<std::array<int, 3>> f;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ss >> p.x >> p.y >> p.z))
                throw MeshError("line " + std::to_string(lineno) + ": bad vertex");
            v.push_back(p);
        } else if (tag == "f") {
            std::array<int, 3> t{};
            for (auto& i : t) {
                std::string tok;
                if (!(ss >> tok)) throw MeshError("line " + std::to_string(lineno) + ": bad facet");
                // accept "i/j/k" style tokens, keep the position index
                i = std::stoi(tok.substr(0, tok.find('/'))) - 1;
            }
            f.push_back(t);
        } else {
            throw MeshError("line " + std::to_string(lineno) + ": unknown record '" + tag + "'");
        }
    }
    if (v.size() < 4 || f.size() < 4) throw MeshError("mesh needs at least 4 vertices and 4 facets");
    return build_mesh(std::move(v), std::move(f), {}, opt);
}

FacetMesh load_stl(std::istream& in, const BuildOptions& opt) {
    char header[80];
    std::uint32_t count = 0;
    if (!in.read(header, 80) || !in.read(reinterpret_cast<char*>(&count), 4))
        throw MeshError("truncated binary mesh header");
    std::vector<Vec3> v;
    std::vector<std::array<int, 3>> f;
    std::map<std::array<float, 3>, int> weld;
    for (std::uint32_t i = 0; i < count; ++i) {
        float buf[12];
        std::uint16_t attr;
        if (!in.read(reinterpret_cast<char*>(buf), 48) || !in.read(reinterpret_cast<char*>(&attr), 2))
            throw MeshError("truncated binary mesh at facet " + std::to_string(i));
        std::array<int, 3> t{};
        for (int k = 0; k < 3; ++k) {
            std::array<float, 3> key{buf[3 + 3 * k], buf[4 + 3 * k], buf[5 + 3 * k]};
            auto [it, fresh] = weld.emplace(key, static_cast<int>(v.size()));
            if (fresh) v.push_back({key[0], key[1], key[2]});
            t[k] = it->second;
        }
        f.push_back(t);
    }
    if (v.size() < 4 || f.size() < 4) throw MeshError("mesh needs at least 4 vertices and 4 facets");
    return build_mesh(std::move(v), std::move(f), {}, opt);
}

}  // namespace

FacetMesh load_mesh(const std::string& path, MeshFormat fmt, const BuildOptions& opt) {
    std::ifstream in(path, fmt == MeshFormat::Text ? std::ios::in : std::ios::binary);
    if (!in) throw MeshError("cannot open mesh file " + path);
    return fmt == MeshFormat::Text ? load_text(in, opt) : load_stl(in, opt);
}

void save_mesh_text(const FacetMesh& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MeshError("cannot write mesh file " + path);
    out << std::setprecision(17);
    for (const auto& v : m.vertices) out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
    for (const auto& t : m.facets) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

FacetMesh generate_prism_cylinder(int sides, double radius, double length, double phase_rad) {
    if (sides < 3 || radius <= 0 || length <= 0) throw MeshError("invalid prism parameters");
    std::vector<Vec3> v;
    std::vector<std::array<int, 3>> f;
    std::vector<int> g;
    double h = 0.5 * length;
    for (int i = 0; i < sides; ++i) {
        double a = phase_rad + 2 * kPi * i / sides;
        v.push_back({radius * std::cos(a), radius * std::sin(a), -h});
        v.push_back({radius * std::cos(a), radius * std::sin(a), h});
    }
    int cb = static_cast<int>(v.size());
    v.push_back({0, 0, -h});
    int ct = cb + 1;
    v.push_back({0, 0, h});
    for (int i = 0; i < sides; ++i) {
        int j = (i + 1) % sides;
        int bi = 2 * i, ti = 2 * i + 1, bj = 2 * j, tj = 2 * j + 1;
        f.push_back({bi, bj, tj});
        g.push_back(0);
        f.push_back({bi, tj, ti});
        g.push_back(0);
        f.push_back({ct, ti, tj});
        g.push_back(1);
        f.push_back({cb, bj, bi});
        g.push_back(1);
    }
    return build_mesh(std::move(v), std::move(f), std::move(g));
}

std::vector<std::array<int, 3>> convex_hull(const std::vector<Vec3>& p) {
    int n = static_cast<int>(p.size());
    if (n < 4) throw MeshError("hull needs at least 4 points");
    // initial tetrahedron from well separated points
    int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
    double best = 0;
    for (int i = 1; i < n; ++i)
        if (double d = norm(p[i] - p[i0]); d > best) best = d, i1 = i;
    best = 0;
    for (int i = 0; i < n; ++i)
        if (double d = norm(cross(p[i1] - p[i0], p[i] - p[i0])); d > best) best = d, i2 = i;
    best = 0;
    Vec3 nrm = cross(p[i1] - p[i0], p[i2] - p[i0]);
    for (int i = 0; i < n; ++i)
        if (double d = std::abs(dot(nrm, p[i] - p[i0])); d > best) best = d, i3 = i;
    if (i1 < 0 || i2 < 0 || i3 < 0 || best <= 0) throw MeshError("degenerate hull input");

    struct Face {
        int a, b, c;
        Vec3 n;
        double d;
        bool alive;
    };
    std::vector<Face> faces;
    Vec3 inner = (p[i0] + p[i1] + p[i2] + p[i3]) / 4.0;
    double scale = 0;
    for (const auto& q : p) scale = std::max(scale, norm(q - inner));
    double eps = 1e-12 * scale;
    auto add = [&](int a, int b, int c) {
        Vec3 nn = normalize(cross(p[b] - p[a], p[c] - p[a]));
        if (dot(nn, p[a] - inner) < 0) {
            std::swap(b, c);
            nn = -nn;
        }
        faces.push_back({a, b, c, nn, dot(nn, p[a]), true});
    };
    add(i0, i1, i2);
    add(i0, i1, i3);
    add(i0, i2, i3);
    add(i1, i2, i3);
    for (int i = 0; i < n; ++i) {
        if (i == i0 || i == i1 || i == i2 || i == i3) continue;
        std::vector<int> visible;
        for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi)
            if (faces[fi].alive && dot(faces[fi].n, p[i]) - faces[fi].d > eps) visible.push_back(fi);
        if (visible.empty()) continue;  // interior point, dropped
        std::map<std::pair<int, int>, int> horizon;
        for (int fi : visible) {
            faces[fi].alive = false;
            const int vs[3] = {faces[fi].a, faces[fi].b, faces[fi].c};
            for (int k = 0; k < 3; ++k) {
                int a = vs[k], b = vs[(k + 1) % 3];
                auto it = horizon.find({b, a});
                if (it != horizon.end())
                    horizon.erase(it);
                else
                    horizon[{a, b}] = 1;
            }
        }
        for (const auto& [e, unused] : horizon) {
            Vec3 nn = normalize(cross(p[e.second] - p[e.first], p[i] - p[e.first]));
            faces.push_back({e.first, e.second, i, nn, dot(nn, p[i]), true});
        }
    }
    std::vector<std::array<int, 3>> out;
    for (const auto& f : faces)
        if (f.alive) out.push_back({f.a, f.b, f.c});
    return out;
}

FacetMesh generate_fibonacci_sphere(int points, double radius) {
    if (points < 4 || radius <= 0) throw MeshError("invalid sphere parameters");
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    std::vector<Vec3> v;
    for (int i = 0; i < points; ++i) {
        double z = 1.0 - (2.0 * i + 1.0) / points;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double a = golden * i;
        v.push_back(Vec3{r * std::cos(a), r * std::sin(a), z} * radius);
    }
    auto f = convex_hull(v);
    return build_mesh(std::move(v), std::move(f));
}

FacetMesh generate_box(const Vec3& lo, const Vec3& hi) {
    std::vector<Vec3> v;
    for (int i = 0; i < 8; ++i)
        v.push_back({(i & 1) ? hi.x : lo.x, (i & 2) ? hi.y : lo.y, (i & 4) ? hi.z : lo.z});
    auto f = convex_hull(v);
    return build_mesh(std::move(v), std::move(f));
}

FacetMesh generate_plate(const Vec3& o, const Vec3& u, const Vec3& w) {
    std::vector<Vec3> v{o, o + u, o + u + w, o + w};
    std::vector<std::array<int, 3>> f{{0, 1, 2}, {0, 2, 3}};
    return build_mesh(std::move(v), std::move(f));
}

}  // namespace vdrt
