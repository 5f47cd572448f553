// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "vdrt/mesh.hpp"

using namespace vdrt;

namespace {

const double kLam = kC0 / 2e9;

std::string temp_file(const std::string& name, const std::string& text) {
    auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p.string();
}

const char* kTetra =
    "v 1 1 1\nv 1 -1 -1\nv -1 1 -1\nv -1 -1 1\n"
    "f 1 2 3\nf 1 4 2\nf 1 3 4\nf 2 4 3\n";

void check_closed_outward(const FacetMesh& m) {
    Vec3 c;
    for (const auto& v : m.vertices) c += v;
    c = c / static_cast<double>(m.num_vertices());
    CHECK(m.closed());
    for (std::size_t f = 0; f < m.num_facets(); ++f) {
        CHECK(m.areas[f] > 1e-12);
        CHECK(dot(m.normals[f], m.centroid(static_cast<int>(f)) - c) > 0);
    }
    for (const auto& e : m.edges) CHECK(e.f1 >= 0);
}

}  // namespace

TEST_CASE("prism chord length") {
    CHECK(2 * 12.8 * std::sin(kPi / 28) == doctest::Approx(2.866).epsilon(1e-3));
    FacetMesh m = generate_prism_cylinder(28, 12.8 * kLam, 40 * kLam);
    check_closed_outward(m);
    CHECK(norm(m.vertices[2] - m.vertices[0]) / kLam == doctest::Approx(2.866).epsilon(1e-3));
    FacetMesh m12 = generate_prism_cylinder(12, 12.8 * kLam, 40 * kLam);
    CHECK(norm(m12.vertices[2] - m12.vertices[0]) / kLam == doctest::Approx(6.625).epsilon(1e-3));
}

// n is the exterior angle over pi: a regular N-gon turns by 2 pi / N at each lateral edge
TEST_CASE("prism wedges") {
    SUBCASE("square prism has right-angle wedges") {
        WedgeSet ws = extract_wedges_and_corners(generate_prism_cylinder(4, 1, 1));
        CHECK(ws.wedges.size() == 12);
        for (const auto& w : ws.wedges) CHECK(w.n == doctest::Approx(1.5).epsilon(1e-12));
    }
    SUBCASE("28-gon lateral wedges") {
        FacetMesh m = generate_prism_cylinder(28, 12.8 * kLam, 40 * kLam);
        WedgeSet ws = extract_wedges_and_corners(m);
        int lateral = 0;
        for (const auto& w : ws.wedges)
            if (std::abs(std::abs(w.e.z) - 1) < 1e-12) {
                ++lateral;
                CHECK(w.n == doctest::Approx(1 + 2.0 / 28).epsilon(1e-12));
            }
        CHECK(lateral == 28);
        CHECK(ws.wedges.size() == 28 * 3);
        ExtractOptions eo;
        eo.excluded_group = 1;
        CHECK(extract_wedges_and_corners(m, eo).wedges.size() == 28);
    }
}

TEST_CASE("cube wedges and corners") {
    FacetMesh m = generate_box({0, 0, 0}, {1, 1, 1});
    check_closed_outward(m);
    WedgeSet ws = extract_wedges_and_corners(m);
    CHECK(ws.wedges.size() == 12);
    for (const auto& w : ws.wedges) CHECK(w.n == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(ws.corners.size() == 8);
    for (const auto& c : ws.corners) CHECK(c.wedges.size() == 3);
}

TEST_CASE("coplanar triangles have no wedges") {
    FacetMesh m = build_mesh({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 2, 3}});
    CHECK(extract_wedges_and_corners(m).wedges.empty());
    ExtractOptions eo;
    eo.boundary_edges = true;
    WedgeSet open = extract_wedges_and_corners(m, eo);
    CHECK(open.wedges.size() == 4);
    for (const auto& w : open.wedges) {
        CHECK(w.facen < 0);
        CHECK(w.n == 2.0);
    }
}

TEST_CASE("text mesh loading") {
    SUBCASE("regular tetrahedron") {
        FacetMesh m = load_mesh(temp_file("vdrt_tetra.txt", kTetra));
        check_closed_outward(m);
        WedgeSet ws = extract_wedges_and_corners(m);
        REQUIRE(ws.wedges.size() == 6);
        for (const auto& w : ws.wedges) CHECK(w.n == doctest::Approx(ws.wedges[0].n).epsilon(1e-12));
    }
    SUBCASE("duplicated facet names the edge") {
        std::string text = std::string(kTetra) + "f 1 2 3\n";
        try {
            load_mesh(temp_file("vdrt_dup.txt", text));
            FAIL("no error");
        } catch (const MeshError& e) {
            CHECK(std::string(e.what()).find("1-2") != std::string::npos);
        }
    }
    SUBCASE("unknown record") {
        CHECK_THROWS_AS(load_mesh(temp_file("vdrt_bad.txt", "x 1 2 3\n")), MeshError);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(load_mesh("/nonexistent/mesh.txt"), MeshError); }
    SUBCASE("save and reload") {
        FacetMesh a = generate_box({0, 0, 0}, {1, 2, 3});
        auto p = (std::filesystem::temp_directory_path() / "vdrt_box.txt").string();
        save_mesh_text(a, p);
        FacetMesh b = load_mesh(p);
        CHECK(b.vertices == a.vertices);
        CHECK(b.facets == a.facets);
    }
}

TEST_CASE("bundled car body") {
    FacetMesh m = load_mesh(std::string(VDRT_SCENARIO_DIR) + "/car_lowpoly.txt");
    CHECK(m.num_facets() == 220);
    check_closed_outward(m);
}

TEST_CASE("Fibonacci spheres") {
    SUBCASE("four points") {
        FacetMesh m = generate_fibonacci_sphere(4, 1.0);
        CHECK(static_cast<long>(m.num_vertices()) - static_cast<long>(m.edges.size()) +
                  static_cast<long>(m.num_facets()) == 2);
    }
    SUBCASE("230 points") {
        FacetMesh m = generate_fibonacci_sphere(230, 12.8 * kLam);
        check_closed_outward(m);
        auto r = discretization_report(m, kLam, 12.8 * kLam);
        CHECK(r.mean_edge / kLam >= 3.0);
        CHECK(r.mean_edge / kLam <= 3.6);
        CHECK(r.sagitta_wl == doctest::Approx(0.11).epsilon(0.15));
    }
    SUBCASE("500 points is finer") {
        auto r = discretization_report(generate_fibonacci_sphere(500, 12.8 * kLam), kLam, 12.8 * kLam);
        CHECK(r.sagitta_wl < 0.08);
    }
}

TEST_CASE("discretization verdicts") {
    auto report = [](int sides) {
        return discretization_report(generate_prism_cylinder(sides, 12.8 * kLam, 40 * kLam), kLam);
    };
    auto r28 = report(28);
    CHECK(r28.ratio == doctest::Approx(0.642).epsilon(0.01));
    CHECK(r28.R / kLam == doctest::Approx(12.8).epsilon(0.02));
    CHECK(r28.verdict == Verdict::Adequate);
    auto r50 = report(50);
    CHECK(r50.ratio == doctest::Approx(0.20).epsilon(0.05));
    CHECK(r50.verdict == Verdict::Over);
    auto r12 = report(12);
    CHECK(r12.sagitta_wl == doctest::Approx(0.44).epsilon(0.02));
    CHECK(r12.verdict == Verdict::Under);
    CHECK(chord_sagitta(1.0, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("convex hull") {
    std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.1, 0.1, 0.1}};
    auto f = convex_hull(pts);
    CHECK(f.size() == 4);
}
