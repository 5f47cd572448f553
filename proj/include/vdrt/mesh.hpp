// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "vdrt/vec3.hpp"

namespace vdrt {

class Bvh;

struct MeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MeshEdge {
    int v0 = -1, v1 = -1;
    int f0 = -1, f1 = -1;  // f1 < 0 on an open boundary
};

struct BuildOptions {
    int max_nonmanifold = 0;  // tolerated non-manifold edges before build() throws
};

struct FacetMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> facets;
    std::vector<int> facet_group;  // generator tag: 0 = body, 1 = cap
    std::vector<Vec3> normals;
    std::vector<double> areas;

    // half-edge h = 3*f + k runs facets[f][k] -> facets[f][(k+1)%3]; twin < 0 on a boundary
    std::vector<int> twin;
    std::vector<int> half_edge_edge;
    std::vector<MeshEdge> edges;
    std::vector<std::vector<int>> vertex_facets;
    std::vector<std::string> nonmanifold;

    Vec3 lo, hi;
    double diameter = 0;
    std::shared_ptr<const Bvh> bvh;

    std::size_t num_vertices() const { return vertices.size(); }
    std::size_t num_facets() const { return facets.size(); }
    bool closed() const;
    Vec3 centroid(int f) const;
};

// Builds adjacency, normals and the BVH. Throws MeshError on bad input.
FacetMesh build_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> facets,
                     std::vector<int> groups = {}, const BuildOptions& opt = {});

enum class MeshFormat { Text, BinaryStl };

FacetMesh load_mesh(const std::string& path, MeshFormat fmt = MeshFormat::Text,
                    const BuildOptions& opt = {});
void save_mesh_text(const FacetMesh& m, const std::string& path);

FacetMesh generate_prism_cylinder(int sides, double radius, double length, double phase_rad = 0.0);
FacetMesh generate_fibonacci_sphere(int points, double radius);
FacetMesh generate_box(const Vec3& lo, const Vec3& hi);
FacetMesh generate_plate(const Vec3& origin, const Vec3& u, const Vec3& v);

// Convex hull of a point set (all points are kept as vertices, outward CCW facets).
std::vector<std::array<int, 3>> convex_hull(const std::vector<Vec3>& pts);

struct Wedge {
    int edge = -1;
    Vec3 p0, p1;  // ordered so that p1 - p0 runs along e
    int v0 = -1, v1 = -1;
    Vec3 e;       // unit tangent, e = t0 x n0
    double length = 0;
    int face0 = -1, facen = -1;  // facen < 0 for a half-plane (open boundary)
    double n = 2;                // exterior angle is n*pi
    Vec3 t0, n0;                 // zero-face in-plane direction (away from edge) and normal
    Vec3 tn, nn;                 // same for the n-face
    int patch0 = -1, patchn = -1;
};

struct Corner {
    int vertex = -1;
    Vec3 pos;
    std::vector<int> wedges;  // cyclic order around the vertex
    std::vector<int> facets;
};

struct ExtractOptions {
    double flat_threshold_deg = 0.5;
    bool boundary_edges = false;  // open-mesh edges become half-plane wedges
    int excluded_group = -1;      // facets of this group neither diffract nor form corners
    int min_corner_wedges = 1;
};

struct WedgeSet {
    std::vector<Wedge> wedges;
    std::vector<Corner> corners;
    std::vector<int> facet_patch;   // planar patch id per facet
    int num_patches = 0;
    std::vector<std::vector<int>> patch_wedges;
    std::vector<int> vertex_corner;  // -1 if the vertex is not a corner
};

WedgeSet extract_wedges_and_corners(const FacetMesh& m, const ExtractOptions& opt = {});

enum class Verdict { Under, Adequate, Over };
const char* to_string(Verdict v);

struct DiscretizationReport {
    double E = 0;
    double R = 0;
    double wavelength = 0;
    double ratio = 0;  // E^2 / (R lambda)
    double sagitta = 0;
    double sagitta_wl = 0;
    double E_wl = 0;
    double mean_edge = 0;
    std::vector<double> edge_wl;  // per curvature-wedge facet width in wavelengths
    Verdict verdict = Verdict::Adequate;
    bool flat = false;
    std::string note;
};

double chord_sagitta(double R, double E);

DiscretizationReport discretization_report(const FacetMesh& m, double wavelength,
                                           double curvature_radius_hint = 0.0,
                                           const ExtractOptions& opt = {});

}  // namespace vdrt
