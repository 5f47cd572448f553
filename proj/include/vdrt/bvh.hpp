// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "vdrt/vec3.hpp"

namespace vdrt {

struct FacetMesh;

enum class HitKind { None, Interior, Boundary };

// Segment/triangle test. Grazing (parallel) segments never hit. A crossing within a
// small barycentric margin of the triangle boundary is reported as Boundary with the
// barycentric weights of (v0, v1, v2) in `w`.
HitKind segment_hits_triangle(const Vec3& a, const Vec3& d, double tmin, double tmax,
                              const Vec3& v0, const Vec3& v1, const Vec3& v2,
                              double* w = nullptr);

// Does a segment with direction d that touches facet f on its boundary (weights w) pass
// into the solid there? Edge contacts use the two facets at the edge, vertex contacts
// all facets at the vertex.
bool boundary_contact_enters(const FacetMesh& m, int f, const double* w, const Vec3& d);

class Bvh {
public:
    explicit Bvh(const FacetMesh& m);

    // True if the open segment a->b (trimmed by eps at both ends) crosses a facet
    // not listed in `skip`.
    bool occluded(const Vec3& a, const Vec3& b, double eps, std::span<const int> skip) const;

    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        Vec3 lo, hi;
        int left = -1, right = -1;
        int first = 0, count = 0;
    };
    int build(int first, int count, int depth);

    std::shared_ptr<const FacetMesh> topo_;
    std::vector<Node> nodes_;
    std::vector<int> order_;
    std::vector<Vec3> cen_;
    std::vector<std::array<Vec3, 3>> tri_;
};

// Reference implementation without acceleration, for cross-checks.
bool occluded_brute(const FacetMesh& m, const Vec3& a, const Vec3& b, double eps,
                    std::span<const int> skip);

}  // namespace vdrt
