// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "vdrt/paths.hpp"
#include "vdrt/utd.hpp"

namespace vdrt {

enum class Output { HH, VV };

struct FieldOptions {
    double k0 = 0;
    Output output = Output::HH;
    Vec3 out_normal{0, 0, 1};
    BlendConfig blend;
    bool soft_slope = true;  // slope term for grazing soft double-edge paths
};

struct FieldStats {
    long clamp_hits = 0;
    long dropped = 0;  // paths whose field evaluation failed (non-finite or out of domain)
};

struct PathField {
    bool ok = false;
    CVec3 E;
    Vec3 k;  // arrival direction
};

struct PointField {
    cplx total;     // sum of all path contributions, LOS included
    cplx incident;  // incident field at the point, shadowed or not
    std::array<int, kMechCount> counts{};
};

class FieldEvaluator {
public:
    FieldEvaluator(const PathTracer& tracer, const FieldOptions& opt);

    Wave incident_wave(const Vec3& p) const;
    PathField path_field(const InteractionPath& path, const Vec3& obs, FieldStats* st) const;
    cplx project(const PathField& f) const;
    PointField evaluate(const Vec3& obs, FieldStats* st) const;

    // Sum of the endpoint terms of all wedges meeting at `corner`.
    CVec3 corner_field(const Wave& inc, int corner, const Vec3& up_point, bool up_is_source,
                       const Vec3& down, double blend, double b_scale) const;
    std::vector<EndpointResult> corner_terms(const Wave& inc, int corner, const Vec3& up_point,
                                             bool up_is_source, const Vec3& down, double blend,
                                             double b_scale) const;

private:
    const PathTracer& tr_;
    FieldOptions opt_;
};

}  // namespace vdrt
