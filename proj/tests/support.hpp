// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>

#include "vdrt/sweep.hpp"

namespace vdrt::test {

inline std::string scenario_path(const std::string& name) {
    return std::string(VDRT_SCENARIO_DIR) + "/" + name + ".ini";
}

// Mesh, wedges, tracer and evaluator for point-wise field checks.
struct Scene {
    FacetMesh mesh;
    WedgeSet ws;
    std::unique_ptr<PathTracer> tracer;
    std::unique_ptr<FieldEvaluator> fe;

    Scene(FacetMesh m, const ExtractOptions& eo, const Source& src, const Toggles& tg,
          const FieldOptions& fo)
        : mesh(std::move(m)), ws(extract_wedges_and_corners(mesh, eo)) {
        tracer = std::make_unique<PathTracer>(mesh, ws, src, tg);
        fe = std::make_unique<FieldEvaluator>(*tracer, fo);
    }
    Scene(const Scene&) = delete;
    Scene& operator=(const Scene&) = delete;

    static std::unique_ptr<Scene> from(const Scenario& s) {
        FieldOptions fo;
        fo.k0 = s.k0();
        fo.output = s.source.polarization;
        fo.blend = s.blend;
        fo.soft_slope = s.soft_slope;
        return std::make_unique<Scene>(make_mesh(s), make_extract_options(s), make_source(s),
                                       s.toggles, fo);
    }

    PointField at(const Vec3& p) const { return fe->evaluate(p, nullptr); }
};

}  // namespace vdrt::test
