// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "vdrt/mesh.hpp"
#include "vdrt/vec3.hpp"

namespace vdrt {

enum class Mech : int { LOS, R, RR, E, V, EE, EV, VE, RE, ER, Count };
inline constexpr int kMechCount = static_cast<int>(Mech::Count);
const char* to_string(Mech m);

enum class NodeKind { Reflection, Edge, Vertex };

struct InteractionNode {
    NodeKind kind = NodeKind::Reflection;
    Vec3 pos;
    int ref = -1;    // patch (reflection), wedge (edge) or corner (vertex) index
    double t = 0;    // edge parameter in [0,1]
};

struct InteractionPath {
    Mech mech = Mech::LOS;
    std::array<InteractionNode, 2> nodes{};
    int nnodes = 0;
    std::array<double, 3> legs{};
    int nlegs = 0;
    double length() const;
};

struct Source {
    enum class Kind { PlaneWave, Point } kind = Kind::PlaneWave;
    Vec3 dir{-1, 0, 0};  // propagation direction (plane wave)
    Vec3 pos;            // point source position
    Vec3 pol{0, 1, 0};   // electric field direction at the source
    bool plane() const { return kind == Kind::PlaneWave; }
};

struct Toggles {
    bool los = true;
    int reflection_order = 1;
    bool E = true, V = true, EE = true, EV = true, VE = true;
    bool RE = false, ER = false;
};

// Closed-form stationary point on the infinite line p0 + z e for a downstream point.
// Upstream is a plane-wave direction or a point. Returns z (length units), or nothing
// when the geometry is degenerate.
std::optional<double> edge_stationary_z(const Vec3& p0, const Vec3& e, const Source& src,
                                        const Vec3& obs);
std::optional<double> edge_stationary_z_point(const Vec3& p0, const Vec3& e, const Vec3& up,
                                              const Vec3& obs);

// Coplanar double-edge unfolding in the plane with unit normal nu. Returns (z1, z2).
std::optional<std::array<double, 2>> double_edge_stationary(const Vec3& a0, const Vec3& e1,
                                                            double len1, const Vec3& b0,
                                                            const Vec3& e2, double len2,
                                                            const Vec3& nu, const Source& src,
                                                            const Vec3& obs);

// |angle(incident, e) - angle(diffracted, e)| at an edge point.
double keller_residual(const Vec3& in_dir, const Vec3& out_dir, const Vec3& e);

class PathTracer {
public:
    struct Options {
        double snap_frac = 1e-3;
        double eps_rel = 1e-6;   // occlusion tolerance relative to the scene diameter
        double min_leg = 1e-6;   // metres
        bool brute_occlusion = false;
    };

    PathTracer(const FacetMesh& mesh, const WedgeSet& ws, const Source& src, const Toggles& tg,
               const Options& opt);
    PathTracer(const FacetMesh& mesh, const WedgeSet& ws, const Source& src, const Toggles& tg)
        : PathTracer(mesh, ws, src, tg, Options{}) {}

    // All paths to one observation point, stably sorted by mechanism then length.
    std::vector<InteractionPath> trace(const Vec3& obs) const;

    void trace_direct_and_reflections(const Vec3& obs, std::vector<InteractionPath>& out) const;
    void find_edge_paths(const Vec3& obs, std::vector<InteractionPath>& out) const;
    void find_vertex_paths(const Vec3& obs, std::vector<InteractionPath>& out) const;
    void find_cascade_paths(const Vec3& obs, std::vector<InteractionPath>& out) const;
    void find_hybrid_paths(const Vec3& obs, std::vector<InteractionPath>& out) const;

    std::optional<InteractionNode> find_edge_diffraction_point(int wedge, const Vec3& obs) const;
    std::optional<std::array<InteractionNode, 2>> find_double_edge_points(int w1, int w2, int patch,
                                                                          const Vec3& obs) const;

    // Is the Keller point of `wedge` for (upstream, downstream) snapped onto the corner at
    // its p0 (at_p0) or p1 end.
    bool snapped_at(int wedge, bool at_p0, const Vec3* up_point, const Vec3& down) const;

    bool visible(const Vec3& a, const Vec3& b, std::span<const int> skip) const;
    bool lit(const Vec3& p, std::span<const int> skip) const;  // source -> p
    Vec3 incident_dir(const Vec3& p) const;
    double source_leg(const Vec3& p) const;
    std::vector<int> wedge_skip(int w) const;

    const FacetMesh& mesh() const { return mesh_; }
    const WedgeSet& wedges() const { return ws_; }
    const Source& source() const { return src_; }
    const Toggles& toggles() const { return tg_; }
    const Options& options() const { return opt_; }
    double eps() const { return eps_; }
    const std::vector<Vec3>& patch_normals() const { return patch_normal_; }
    int patch_facet_containing(int patch, const Vec3& p) const;

    struct EvPrefix {
        int wedge, corner;
        double z;
        Vec3 p1;
    };
    const std::vector<EvPrefix>& ev_prefixes() const { return ev_; }

private:
    bool exterior_ok(int wedge, const Vec3& in_dir, const Vec3& out_dir) const;
    bool corner_exterior(int corner, const Vec3& dir) const;
    void precompute();

    const FacetMesh& mesh_;
    const WedgeSet& ws_;
    Source src_;
    Toggles tg_;
    Options opt_;
    double eps_ = 0;
    double far_ = 0;
    Vec3 center_;
    std::vector<Vec3> patch_normal_;
    std::vector<std::vector<int>> patch_facets_;
    std::vector<char> corner_lit_;
    std::vector<EvPrefix> ev_;
    std::vector<std::pair<int, int>> ve_;  // (corner, wedge)
    std::vector<std::array<int, 3>> ee_;   // (w1, w2, patch)
};

}  // namespace vdrt
