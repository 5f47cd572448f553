// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vdrt/field.hpp"
#include "vdrt/mesh.hpp"
#include "vdrt/oracle.hpp"

namespace vdrt {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lengths are stored in metres. Scenario files accept a trailing unit on every length:
// `lam` (wavelengths at the scenario frequency) or `m` (default).
struct GeometrySpec {
    enum class Kind { Cylinder, Sphere, Box, Mesh } kind = Kind::Cylinder;
    int sides = 0;           // cylinder
    int points = 0;          // sphere
    double radius = 0;       // cylinder, sphere
    double length = 0;       // cylinder
    double phase_deg = 0;    // cylinder: angular position of the first vertex
    Vec3 lo, hi;             // box
    std::string mesh_path;   // mesh (resolved against the scenario directory)
    MeshFormat format = MeshFormat::Text;
    int max_nonmanifold = 0;
    bool cap_diffraction = false;  // cylinder caps diffract (off: measured in mid-plane)
    double flat_threshold_deg = 0.5;
    bool boundary_edges = false;
};

struct SourceSpec {
    Source::Kind kind = Source::Kind::PlaneWave;
    double elevation_deg = 0;  // plane wave arrives from (az, el) and travels the other way
    double azimuth_deg = 0;
    Vec3 position;             // point source
    Output polarization = Output::HH;
};

struct ObservationSpec {
    enum class Kind { Circle, Line } kind = Kind::Circle;
    Vec3 center;
    double radius = 0;
    double step_deg = 0.5;
    double height = 0;
    Vec3 start, end;  // line
    int points = 0;
};

struct Scenario {
    std::string name;
    double frequency = 2e9;
    GeometrySpec geometry;
    SourceSpec source;
    ObservationSpec observation;
    Toggles toggles;
    BlendConfig blend;
    bool soft_slope = true;
    std::vector<Region> regions;
    enum class Reference { None, Cylinder, Sphere } reference = Reference::None;
    int oracle_extra_terms = 0;

    double wavelength() const { return kC0 / frequency; }
    double k0() const { return 2 * kPi / wavelength(); }
};

// Parses the INI text. `base_dir` resolves relative mesh paths. Throws ValidationError.
Scenario parse_scenario(std::istream& in, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);
// Canonical INI form; parse_scenario(write_scenario(s)) reproduces s.
std::string write_scenario(const Scenario& s);
void validate(const Scenario& s);

Source make_source(const Scenario& s);
FacetMesh make_mesh(const Scenario& s);
ExtractOptions make_extract_options(const Scenario& s);

// Observation abscissa (degrees on a circle, wavelengths along a line) and positions.
std::vector<double> observation_abscissa(const Scenario& s);
std::vector<Vec3> observation_points(const Scenario& s);

// Same four mechanism sets as the timing table.
enum class ToggleSet { RT, V, VEE, All };
const char* to_string(ToggleSet t);
Toggles toggles_for(ToggleSet t, const Toggles& base);

}  // namespace vdrt
