// SPDX-License-Identifier: Apache-2.0
#include "vdrt/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace vdrt {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string vec(const Vec3& v) { return num(v.x) + ' ' + num(v.y) + ' ' + num(v.z); }

std::vector<std::string> words(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string w; is >> w;) out.push_back(w);
    return out;
}

double parse_double(const std::string& w, const std::string& key) {
    double v = 0;
    auto r = std::from_chars(w.data(), w.data() + w.size(), v);
    if (r.ec != std::errc() || r.ptr != w.data() + w.size())
        throw ValidationError("bad number '" + w + "' for " + key);
    return v;
}

// "x [y z] [lam|m]" -> values in metres
std::vector<double> lengths(const std::string& text, const std::string& key, double lambda,
                            std::size_t count) {
    auto ws = words(text);
    double unit = 1.0;
    if (!ws.empty() && (ws.back() == "lam" || ws.back() == "m")) {
        unit = ws.back() == "lam" ? lambda : 1.0;
        ws.pop_back();
    }
    if (ws.size() != count)
        throw ValidationError(key + ": expected " + std::to_string(count) + " value(s)");
    std::vector<double> out;
    for (const auto& w : ws) out.push_back(parse_double(w, key) * unit);
    return out;
}

class Reader {
public:
    Reader(const pt::ptree& t, double lambda) : t_(t), lambda_(lambda) {}

    std::optional<std::string> raw(const std::string& key) const {
        auto v = t_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
        if (!v) return std::nullopt;
        return *v;
    }
    std::string str(const std::string& key, const std::string& def) const {
        auto v = raw(key);
        return v ? *v : def;
    }
    double number(const std::string& key, double def) const {
        auto v = raw(key);
        return v ? parse_double(*v, key) : def;
    }
    int integer(const std::string& key, int def) const {
        double v = number(key, def);
        if (v != std::floor(v)) throw ValidationError(key + " must be an integer");
        return static_cast<int>(v);
    }
    bool flag(const std::string& key, bool def) const {
        auto v = raw(key);
        if (!v) return def;
        if (*v == "true" || *v == "on" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "off" || *v == "0" || *v == "no") return false;
        throw ValidationError("bad flag '" + *v + "' for " + key);
    }
    double length(const std::string& key, double def) const {
        auto v = raw(key);
        return v ? lengths(*v, key, lambda_, 1)[0] : def;
    }
    Vec3 point(const std::string& key, const Vec3& def) const {
        auto v = raw(key);
        if (!v) return def;
        auto l = lengths(*v, key, lambda_, 3);
        return {l[0], l[1], l[2]};
    }

private:
    const pt::ptree& t_;
    double lambda_;
};

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& base_dir) {
    pt::ptree t;
    try {
        pt::read_ini(in, t);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError(std::string("scenario syntax: ") + e.what());
    }
    Scenario s;
    {
        Reader r0(t, 1.0);
        s.name = r0.str("scenario.name", "unnamed");
        s.frequency = r0.number("scenario.frequency", 2e9);
    }
    if (!(s.frequency > 0)) throw ValidationError("frequency must be positive");
    Reader r(t, s.wavelength());

    auto& g = s.geometry;
    std::string kind = r.str("geometry.kind", "");
    if (kind == "cylinder") {
        g.kind = GeometrySpec::Kind::Cylinder;
        g.sides = r.integer("geometry.sides", 0);
        g.radius = r.length("geometry.radius", 0);
        g.length = r.length("geometry.length", 40 * s.wavelength());
        g.phase_deg = r.number("geometry.phase_deg", 0);
        g.cap_diffraction = r.flag("geometry.cap_diffraction", false);
    } else if (kind == "sphere") {
        g.kind = GeometrySpec::Kind::Sphere;
        g.points = r.integer("geometry.points", 0);
        g.radius = r.length("geometry.radius", 0);
    } else if (kind == "box") {
        g.kind = GeometrySpec::Kind::Box;
        g.lo = r.point("geometry.lo", {});
        g.hi = r.point("geometry.hi", {});
    } else if (kind == "mesh") {
        g.kind = GeometrySpec::Kind::Mesh;
        std::string p = r.str("geometry.mesh", "");
        if (p.empty()) throw ValidationError("geometry.mesh is required for kind = mesh");
        fs::path fp(p);
        if (fp.is_relative()) fp = fs::path(base_dir) / fp;
        g.mesh_path = fp.lexically_normal().string();
        std::string fmt = r.str("geometry.format", "text");
        if (fmt == "text") g.format = MeshFormat::Text;
        else if (fmt == "stl") g.format = MeshFormat::BinaryStl;
        else throw ValidationError("geometry.format must be text or stl");
        g.max_nonmanifold = r.integer("geometry.max_nonmanifold", 0);
    } else {
        throw ValidationError("geometry.kind must be cylinder, sphere, box or mesh");
    }
    g.flat_threshold_deg = r.number("geometry.flat_threshold_deg", 0.5);
    g.boundary_edges = r.flag("geometry.boundary_edges", false);

    auto& src = s.source;
    std::string sk = r.str("source.kind", "plane");
    if (sk == "plane") {
        src.kind = Source::Kind::PlaneWave;
        src.azimuth_deg = r.number("source.azimuth_deg", 0);
        src.elevation_deg = r.number("source.elevation_deg", 0);
    } else if (sk == "point") {
        src.kind = Source::Kind::Point;
        src.position = r.point("source.position", {});
    } else {
        throw ValidationError("source.kind must be plane or point");
    }
    std::string pol = r.str("source.polarization", "HH");
    if (pol == "HH") src.polarization = Output::HH;
    else if (pol == "VV") src.polarization = Output::VV;
    else throw ValidationError("source.polarization must be HH or VV");

    auto& ob = s.observation;
    std::string ok = r.str("observation.kind", "circle");
    if (ok == "circle") {
        ob.kind = ObservationSpec::Kind::Circle;
        ob.center = r.point("observation.center", {});
        ob.radius = r.length("observation.radius", 0);
        ob.step_deg = r.number("observation.step_deg", 0.5);
        ob.height = r.length("observation.height", 0);
    } else if (ok == "line") {
        ob.kind = ObservationSpec::Kind::Line;
        ob.start = r.point("observation.start", {});
        ob.end = r.point("observation.end", {});
        ob.points = r.integer("observation.points", 0);
    } else {
        throw ValidationError("observation.kind must be circle or line");
    }

    auto& tg = s.toggles;
    tg.los = r.flag("mechanisms.LOS", true);
    tg.reflection_order = r.integer("mechanisms.reflection_order", 1);
    tg.E = r.flag("mechanisms.E", true);
    tg.V = r.flag("mechanisms.V", true);
    tg.EE = r.flag("mechanisms.EE", true);
    tg.EV = r.flag("mechanisms.EV", true);
    tg.VE = r.flag("mechanisms.VE", true);
    tg.RE = r.flag("mechanisms.RE", false);
    tg.ER = r.flag("mechanisms.ER", false);
    s.soft_slope = r.flag("mechanisms.soft_slope", true);

    s.blend.a_lo = r.number("blend.a_lo", s.blend.a_lo);
    s.blend.a_hi = r.number("blend.a_hi", s.blend.a_hi);
    s.blend.clamp = r.number("blend.clamp", s.blend.clamp);

    if (auto rg = t.get_child_optional("regions")) {
        for (const auto& [name, node] : *rg) {
            auto ws = words(node.data());
            if (ws.size() != 3 || (ws[2] != "scattered" && ws[2] != "total"))
                throw ValidationError("region " + name + ": expected 'lo hi scattered|total'");
            s.regions.push_back({name, parse_double(ws[0], name), parse_double(ws[1], name),
                                 ws[2] == "total"});
        }
    } else if (ob.kind == ObservationSpec::Kind::Circle) {
        s.regions = {{"backscatter", 0, 140, false}, {"shadow", 150, 200, true}};
    }

    std::string ref = r.str("reference.oracle", "none");
    if (ref == "none") s.reference = Scenario::Reference::None;
    else if (ref == "cylinder") s.reference = Scenario::Reference::Cylinder;
    else if (ref == "sphere") s.reference = Scenario::Reference::Sphere;
    else throw ValidationError("reference.oracle must be none, cylinder or sphere");
    s.oracle_extra_terms = r.integer("reference.extra_terms", 0);

    validate(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario " + path);
    return parse_scenario(in, fs::path(path).parent_path().string().empty()
                                  ? "."
                                  : fs::path(path).parent_path().string());
}

std::string write_scenario(const Scenario& s) {
    std::ostringstream o;
    const auto& g = s.geometry;
    o << "[scenario]\nname = " << s.name << "\nfrequency = " << num(s.frequency) << "\n";
    o << "[geometry]\n";
    switch (g.kind) {
        case GeometrySpec::Kind::Cylinder:
            o << "kind = cylinder\nsides = " << g.sides << "\nradius = " << num(g.radius)
              << "\nlength = " << num(g.length) << "\nphase_deg = " << num(g.phase_deg)
              << "\ncap_diffraction = " << (g.cap_diffraction ? "true" : "false") << "\n";
            break;
        case GeometrySpec::Kind::Sphere:
            o << "kind = sphere\npoints = " << g.points << "\nradius = " << num(g.radius) << "\n";
            break;
        case GeometrySpec::Kind::Box:
            o << "kind = box\nlo = " << vec(g.lo) << "\nhi = " << vec(g.hi) << "\n";
            break;
        case GeometrySpec::Kind::Mesh:
            o << "kind = mesh\nmesh = " << g.mesh_path
              << "\nformat = " << (g.format == MeshFormat::Text ? "text" : "stl")
              << "\nmax_nonmanifold = " << g.max_nonmanifold << "\n";
            break;
    }
    o << "flat_threshold_deg = " << num(g.flat_threshold_deg)
      << "\nboundary_edges = " << (g.boundary_edges ? "true" : "false") << "\n";
    o << "[source]\n";
    if (s.source.kind == Source::Kind::PlaneWave)
        o << "kind = plane\nazimuth_deg = " << num(s.source.azimuth_deg)
          << "\nelevation_deg = " << num(s.source.elevation_deg) << "\n";
    else
        o << "kind = point\nposition = " << vec(s.source.position) << "\n";
    o << "polarization = " << (s.source.polarization == Output::HH ? "HH" : "VV") << "\n";
    const auto& ob = s.observation;
    o << "[observation]\n";
    if (ob.kind == ObservationSpec::Kind::Circle)
        o << "kind = circle\ncenter = " << vec(ob.center) << "\nradius = " << num(ob.radius)
          << "\nstep_deg = " << num(ob.step_deg) << "\nheight = " << num(ob.height) << "\n";
    else
        o << "kind = line\nstart = " << vec(ob.start) << "\nend = " << vec(ob.end)
          << "\npoints = " << ob.points << "\n";
    const auto& tg = s.toggles;
    auto b = [](bool v) { return v ? "true" : "false"; };
    o << "[mechanisms]\nLOS = " << b(tg.los) << "\nreflection_order = " << tg.reflection_order
      << "\nE = " << b(tg.E) << "\nV = " << b(tg.V) << "\nEE = " << b(tg.EE)
      << "\nEV = " << b(tg.EV) << "\nVE = " << b(tg.VE) << "\nRE = " << b(tg.RE)
      << "\nER = " << b(tg.ER) << "\nsoft_slope = " << b(s.soft_slope) << "\n";
    o << "[blend]\na_lo = " << num(s.blend.a_lo) << "\na_hi = " << num(s.blend.a_hi)
      << "\nclamp = " << num(s.blend.clamp) << "\n";
    if (!s.regions.empty()) {
        o << "[regions]\n";
        for (const auto& rg : s.regions)
            o << rg.name << " = " << num(rg.lo_deg) << ' ' << num(rg.hi_deg) << ' '
              << (rg.total ? "total" : "scattered") << "\n";
    }
    const char* ref[] = {"none", "cylinder", "sphere"};
    o << "[reference]\noracle = " << ref[static_cast<int>(s.reference)]
      << "\nextra_terms = " << s.oracle_extra_terms << "\n";
    return o.str();
}

void validate(const Scenario& s) {
    const auto& g = s.geometry;
    if (!(s.frequency > 0)) throw ValidationError("frequency must be positive");
    switch (g.kind) {
        case GeometrySpec::Kind::Cylinder:
            if (g.sides < 3 || !(g.radius > 0) || !(g.length > 0))
                throw ValidationError("cylinder needs sides >= 3, radius > 0, length > 0");
            break;
        case GeometrySpec::Kind::Sphere:
            if (g.points < 4 || !(g.radius > 0))
                throw ValidationError("sphere needs points >= 4 and radius > 0");
            break;
        case GeometrySpec::Kind::Box:
            if (!(g.hi.x > g.lo.x && g.hi.y > g.lo.y && g.hi.z > g.lo.z))
                throw ValidationError("box needs hi > lo on every axis");
            break;
        case GeometrySpec::Kind::Mesh:
            break;
    }
    if (!(g.flat_threshold_deg >= 0)) throw ValidationError("flat_threshold_deg must be >= 0");
    const auto& ob = s.observation;
    if (ob.kind == ObservationSpec::Kind::Circle) {
        if (!(ob.radius > 0)) throw ValidationError("observation radius must be positive");
        if (!(ob.step_deg > 0)) throw ValidationError("observation step must be positive");
        double n = 360.0 / ob.step_deg;
        if (std::abs(n - std::round(n)) > 1e-9 * n)
            throw ValidationError("observation step must divide 360 degrees evenly");
    } else if (ob.points < 2) {
        throw ValidationError("line observation needs at least 2 points");
    }
    const auto& tg = s.toggles;
    if (tg.reflection_order < 0 || tg.reflection_order > 2)
        throw ValidationError("reflection_order must be 0, 1 or 2");
    if (tg.EE && !tg.E) throw ValidationError("EE needs E");
    if ((tg.EV || tg.VE) && !(tg.E && tg.V)) throw ValidationError("EV and VE need E and V");
    for (const auto& r : s.regions) {
        if (!(r.lo_deg >= 0 && r.hi_deg < 360 && r.lo_deg < r.hi_deg))
            throw ValidationError("region " + r.name + " must satisfy 0 <= lo < hi < 360");
    }
    if (s.source.kind == Source::Kind::PlaneWave && std::abs(s.source.elevation_deg) >= 90)
        throw ValidationError("plane-wave elevation must be within (-90, 90) degrees");
    if (s.reference != Scenario::Reference::None) {
        bool plane = s.source.kind == Source::Kind::PlaneWave && s.source.azimuth_deg == 0 &&
                     s.source.elevation_deg == 0;
        bool circle = ob.kind == ObservationSpec::Kind::Circle && ob.center == Vec3{} &&
                      ob.height == 0;
        if (!plane || !circle)
            throw ValidationError("oracle reference needs the canonical plane wave and an "
                                  "origin-centred circle at zero height");
        if (s.reference == Scenario::Reference::Cylinder && g.kind != GeometrySpec::Kind::Cylinder)
            throw ValidationError("cylinder oracle needs cylinder geometry");
        if (s.reference == Scenario::Reference::Sphere && g.kind != GeometrySpec::Kind::Sphere)
            throw ValidationError("sphere oracle needs sphere geometry");
        if (ob.radius <= g.radius) throw ValidationError("observation circle inside the body");
    }
}

Source make_source(const Scenario& s) {
    Source src;
    const auto& sp = s.source;
    const Vec3 z{0, 0, 1};
    if (sp.kind == Source::Kind::PlaneWave) {
        double el = sp.elevation_deg * kPi / 180, az = sp.azimuth_deg * kPi / 180;
        src.kind = Source::Kind::PlaneWave;
        src.dir = -Vec3{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
    } else {
        src.kind = Source::Kind::Point;
        src.pos = sp.position;
        Vec3 to = -sp.position;
        to.z = 0;
        src.dir = norm(to) > 0 ? normalize(to) : Vec3{-1, 0, 0};
    }
    if (sp.polarization == Output::HH) src.pol = normalize(cross(src.dir, z));
    else src.pol = normalize(z - src.dir * dot(src.dir, z));
    return src;
}

FacetMesh make_mesh(const Scenario& s) {
    const auto& g = s.geometry;
    switch (g.kind) {
        case GeometrySpec::Kind::Cylinder:
            return generate_prism_cylinder(g.sides, g.radius, g.length, g.phase_deg * kPi / 180);
        case GeometrySpec::Kind::Sphere:
            return generate_fibonacci_sphere(g.points, g.radius);
        case GeometrySpec::Kind::Box:
            return generate_box(g.lo, g.hi);
        case GeometrySpec::Kind::Mesh:
            return load_mesh(g.mesh_path, g.format, BuildOptions{g.max_nonmanifold});
    }
    throw ValidationError("unknown geometry kind");
}

ExtractOptions make_extract_options(const Scenario& s) {
    ExtractOptions eo;
    eo.flat_threshold_deg = s.geometry.flat_threshold_deg;
    eo.boundary_edges = s.geometry.boundary_edges;
    if (s.geometry.kind == GeometrySpec::Kind::Cylinder && !s.geometry.cap_diffraction)
        eo.excluded_group = 1;
    return eo;
}

std::vector<double> observation_abscissa(const Scenario& s) {
    const auto& ob = s.observation;
    std::vector<double> a;
    if (ob.kind == ObservationSpec::Kind::Circle) {
        int n = static_cast<int>(std::lround(360.0 / ob.step_deg));
        for (int i = 0; i < n; ++i) a.push_back(i * ob.step_deg);
    } else {
        double len = norm(ob.end - ob.start) / s.wavelength();
        for (int i = 0; i < ob.points; ++i) a.push_back(len * i / (ob.points - 1));
    }
    return a;
}

std::vector<Vec3> observation_points(const Scenario& s) {
    const auto& ob = s.observation;
    std::vector<Vec3> p;
    if (ob.kind == ObservationSpec::Kind::Circle) {
        for (double deg : observation_abscissa(s)) {
            double a = deg * kPi / 180;
            p.push_back(ob.center + Vec3{ob.radius * std::cos(a), ob.radius * std::sin(a), ob.height});
        }
    } else {
        for (int i = 0; i < ob.points; ++i)
            p.push_back(lerp(ob.start, ob.end, static_cast<double>(i) / (ob.points - 1)));
    }
    return p;
}

const char* to_string(ToggleSet t) {
    switch (t) {
        case ToggleSet::RT: return "RT";
        case ToggleSet::V: return "V";
        case ToggleSet::VEE: return "V+EE";
        case ToggleSet::All: return "V+EE+EV+VE";
    }
    return "?";
}

Toggles toggles_for(ToggleSet t, const Toggles& base) {
    Toggles tg = base;
    tg.E = true;
    tg.V = t != ToggleSet::RT;
    tg.EE = t == ToggleSet::VEE || t == ToggleSet::All;
    tg.EV = tg.VE = t == ToggleSet::All;
    return tg;
}

}  // namespace vdrt
