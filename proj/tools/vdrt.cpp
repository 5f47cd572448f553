// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>

#include "vdrt/special.hpp"
#include "vdrt/sweep.hpp"

using namespace vdrt;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kFailure = 1, kValidation = 2, kDomain = 3 };

ToggleSet parse_set(const std::string& s) {
    if (s == "RT") return ToggleSet::RT;
    if (s == "V") return ToggleSet::V;
    if (s == "V+EE" || s == "VEE") return ToggleSet::VEE;
    if (s == "all" || s == "V+EE+EV+VE") return ToggleSet::All;
    throw ValidationError("unknown mechanism set '" + s + "' (RT, V, V+EE, all)");
}

std::vector<ToggleSet> parse_sets(const std::string& list) {
    std::vector<ToggleSet> out;
    std::stringstream ss(list);
    for (std::string w; std::getline(ss, w, ',');)
        if (!w.empty()) out.push_back(parse_set(w));
    return out;
}

std::string default_csv(const Scenario& s, const char* suffix = "") {
    return s.name + suffix + ".csv";
}

void print_summary(const SweepResult& r) {
    std::array<long, kCensusColumns> census{};
    for (const auto& row : r.rows)
        for (int c = 0; c < kCensusColumns; ++c) census[c] += row.census[c];
    std::fprintf(stderr, "%s: %zu points, %zu facets, %zu wedges, %zu corners\n",
                 r.scenario.name.c_str(), r.rows.size(), r.facets, r.wedges, r.corners);
    std::fprintf(stderr, "paths:");
    for (int c = 0; c < kCensusColumns; ++c) std::fprintf(stderr, " %s=%ld", census_name(c), census[c]);
    std::fprintf(stderr, "\ndropped %ld, clamp hits %ld\n", r.dropped, r.clamp_hits);
    std::fprintf(stderr, "time: setup %.3f s, trace %.3f s, field %.3f s (summed over %d workers), wall %.3f s\n",
                 r.setup_s, r.trace_s, r.field_s, r.workers, r.wall_s);
}

// "key=value,key=value" on top of a canonical reference scenario
Scenario oracle_scenario(const std::string& body, const std::string& params) {
    if (body != "cylinder" && body != "sphere")
        throw ValidationError("oracle body must be cylinder or sphere");
    if (fs::is_regular_file(params)) {
        Scenario s = load_scenario(params);
        s.reference = body == "cylinder" ? Scenario::Reference::Cylinder : Scenario::Reference::Sphere;
        validate(s);
        return s;
    }
    std::map<std::string, std::string> kv{{"radius", "12.8 lam"}, {"freq", "2e9"},
                                          {"obs", "60 lam"},      {"step", "0.5"},
                                          {"pol", "HH"},          {"extra", "0"}};
    std::stringstream ss(params);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw ValidationError("oracle parameter without '=': " + item);
        std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        if (!kv.count(key)) throw ValidationError("unknown oracle parameter " + key);
        std::smatch m;
        if (std::regex_match(val, m, std::regex(R"(\s*([^\s]+?)\s*(lam|m)\s*)")))
            val = m[1].str() + " " + m[2].str();
        kv[key] = val;
    }
    std::ostringstream ini;
    ini << "[scenario]\nname = " << body << "_oracle\nfrequency = " << kv["freq"]
        << "\n[geometry]\nkind = " << body << "\nradius = " << kv["radius"]
        << (body == "cylinder" ? "\nsides = 360\n" : "\npoints = 1000\n")
        << "[source]\nkind = plane\npolarization = " << kv["pol"]
        << "\n[observation]\nkind = circle\nradius = " << kv["obs"] << "\nstep_deg = " << kv["step"]
        << "\n[reference]\noracle = " << body << "\nextra_terms = " << kv["extra"] << "\n";
    std::istringstream in(ini.str());
    return parse_scenario(in);
}

FacetMesh mesh_from_argument(const std::string& arg) {
    fs::path p(arg);
    auto ext = p.extension().string();
    if (ext == ".ini") {
        Scenario s = load_scenario(arg);
        return make_mesh(s);
    }
    return load_mesh(arg, ext == ".stl" ? MeshFormat::BinaryStl : MeshFormat::Text);
}

std::vector<std::string> expand_scenario_list(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    for (const auto& a : args) {
        if (fs::path(a).extension() == ".ini") {
            out.push_back(a);
            continue;
        }
        std::ifstream f(a);
        if (!f) throw ValidationError("cannot open scenario list " + a);
        fs::path dir = fs::path(a).parent_path();
        for (std::string line; std::getline(f, line);) {
            auto b = line.find_first_not_of(" \t");
            if (b == std::string::npos || line[b] == '#') continue;
            line = line.substr(b, line.find_last_not_of(" \t\r") - b + 1);
            fs::path sp(line);
            out.push_back((sp.is_relative() ? dir / sp : sp).string());
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vdrt: vertex-diffraction ray tracer for faceted PEC bodies"};
    app.require_subcommand(1);
    int workers = 0;
    app.add_option("-j,--workers", workers, "worker threads (default: VDRT_WORKERS or all cores)");

    auto* run = app.add_subcommand("run", "sweep a scenario and write the CSV");
    std::string scenario_path, out_path, plot_stem, set_name;
    std::vector<std::string> disable;
    run->add_option("scenario", scenario_path, "scenario file")->required();
    run->add_option("-o,--output", out_path, "CSV path ('-' for stdout, default <name>.csv)");
    run->add_option("--plot", plot_stem, "also write <stem>_Es.dat and <stem>_Et.dat");
    run->add_option("--mechanisms", set_name, "override the mechanism set: RT, V, V+EE, all");
    run->add_option("--disable", disable, "switch off mechanisms (LOS, R, E, V, EE, EV, VE)");
    bool with_oracle = false;
    run->add_flag("--compare", with_oracle, "print RMSE against the scenario's analytic reference");

    auto* cmp = app.add_subcommand("compare", "RMSE of sweeps against a reference");
    std::vector<std::string> cmp_args;
    std::string delta_path;
    cmp->add_option("sweeps", cmp_args, "<sweep.csv>... <reference.csv | oracle>")->required()->expected(2, -1);
    cmp->add_option("--delta", delta_path, "per-angle dB differences of the first sweep");

    auto* orc = app.add_subcommand("oracle", "analytic reference sweep");
    std::string body, params;
    orc->add_option("body", body, "cylinder or sphere")->required();
    orc->add_option("params", params,
                    "scenario file, or key=value list: radius, freq, obs, step, pol, extra")
        ->default_val("");
    orc->add_option("-o,--output", out_path, "CSV path ('-' for stdout)");

    auto* rep = app.add_subcommand("report-discretization", "facet size against the wavelength");
    std::string mesh_arg;
    double freq = 0, radius_hint = 0;
    rep->add_option("mesh", mesh_arg, "mesh file (.txt/.stl) or scenario (.ini)")->required();
    rep->add_option("freq", freq, "frequency in Hz")->required();
    rep->add_option("--radius", radius_hint, "curvature radius in metres (default: estimated)");

    auto* tim = app.add_subcommand("timing", "time each scenario under the four mechanism sets");
    std::vector<std::string> tim_args;
    std::string sets_arg = "RT,V,V+EE,all", json_path;
    int repeats = 1;
    double step = 0;
    tim->add_option("scenarios", tim_args, "scenario files or list files")->required();
    tim->add_option("--sets", sets_arg, "comma-separated mechanism sets");
    tim->add_option("--json", json_path, "write the table as JSON");
    tim->add_option("--repeats", repeats, "best of N runs")->check(CLI::PositiveNumber);
    tim->add_option("--step", step, "override the angular step (degrees)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*run) {
            Scenario s = load_scenario(scenario_path);
            if (!set_name.empty()) s.toggles = toggles_for(parse_set(set_name), s.toggles);
            for (const auto& m : disable) {
                auto& t = s.toggles;
                if (m == "LOS") t.los = false;
                else if (m == "R") t.reflection_order = 0;
                else if (m == "E") t.E = false;
                else if (m == "V") t.V = false;
                else if (m == "EE") t.EE = false;
                else if (m == "EV") t.EV = false;
                else if (m == "VE") t.VE = false;
                else throw ValidationError("unknown mechanism " + m);
            }
            if (!s.toggles.E) s.toggles.EE = s.toggles.EV = s.toggles.VE = false;
            if (!s.toggles.V) s.toggles.EV = s.toggles.VE = false;
            auto r = run_sweep(s, workers);
            if (out_path == "-") write_csv(std::cout, r);
            else write_csv(out_path.empty() ? default_csv(s) : out_path, r);
            if (!plot_stem.empty()) write_plot_data(plot_stem, r);
            print_summary(r);
            if (with_oracle) {
                auto c = compare(r, run_oracle(s));
                for (const auto& row : c.rows)
                    std::fprintf(stderr, "%-12s %7.3f dB (%d points, %d excluded)\n",
                                 row.region.name.c_str(), row.result.rmse_db, row.result.used,
                                 row.result.excluded);
            }
        } else if (*cmp) {
            std::string ref_arg = cmp_args.back();
            cmp_args.pop_back();
            std::optional<SweepResult> ref;
            if (ref_arg != "oracle") ref = read_csv(ref_arg);
            std::vector<std::string> names;
            std::vector<Region> regions;
            std::vector<CompareReport> reports;
            for (const auto& path : cmp_args) {
                SweepResult t = read_csv(path);
                CompareReport c = compare(t, ref ? *ref : run_oracle(t.scenario));
                if (c.resampled)
                    std::fprintf(stderr, "warning: %s: reference resampled at the nearest angle\n",
                                 path.c_str());
                if (reports.empty()) {
                    for (const auto& row : c.rows) regions.push_back(row.region);
                    if (!delta_path.empty()) {
                        std::ofstream f(delta_path);
                        if (!f) throw std::runtime_error("cannot write " + delta_path);
                        write_delta_csv(f, c);
                    }
                }
                names.push_back(t.scenario.name);
                reports.push_back(std::move(c));
            }
            std::printf("%-24s", "scenario");
            for (const auto& rg : regions) std::printf(" %12s", rg.name.c_str());
            std::printf("\n");
            for (std::size_t i = 0; i < reports.size(); ++i) {
                std::printf("%-24s", names[i].c_str());
                for (const auto& rg : regions) {
                    auto it = std::find_if(reports[i].rows.begin(), reports[i].rows.end(),
                                           [&](const CompareRow& r) { return r.region.name == rg.name; });
                    if (it == reports[i].rows.end()) std::printf(" %12s", "-");
                    else std::printf(" %12.3f", it->result.rmse_db);
                }
                std::printf("\n");
            }
        } else if (*orc) {
            Scenario s = oracle_scenario(body, params);
            auto r = run_oracle(s);
            if (out_path == "-") write_csv(std::cout, r);
            else write_csv(out_path.empty() ? default_csv(s) : out_path, r);
            std::vector<std::pair<double, double>> cp;
            std::vector<Vec3> sp;
            auto pts = observation_points(s);
            for (std::size_t i = 0; i < pts.size(); i += std::max<std::size_t>(1, pts.size() / 36)) {
                cp.push_back({s.observation.radius, std::atan2(pts[i].y, pts[i].x)});
                sp.push_back(pts[i]);
            }
            bool hh = s.source.polarization == Output::HH;
            double cert = s.reference == Scenario::Reference::Cylinder
                              ? cylinder_certificate(s.geometry.radius, s.k0(),
                                                     hh ? CylinderSeries::Pol::TE : CylinderSeries::Pol::TM, cp)
                              : mie_certificate(s.geometry.radius, s.k0(),
                                                hh ? MieSeries::Pol::HH : MieSeries::Pol::VV, sp);
            std::fprintf(stderr, "%s: order %d, %zu points, certificate (+10 terms) %.3g\n",
                         s.name.c_str(), r.oracle_order, r.rows.size(), cert);
        } else if (*rep) {
            if (!(freq > 0)) throw ValidationError("frequency must be positive");
            double lambda = kC0 / freq;
            FacetMesh m = mesh_from_argument(mesh_arg);
            auto d = discretization_report(m, lambda, radius_hint);
            std::printf("facets %zu, mean edge %.4g m, wavelength %.4g m\n", m.num_facets(),
                        d.mean_edge, lambda);
            if (d.flat) {
                std::printf("facet size E %.4g m (%.3g lambda); %s\n", d.E, d.E_wl, d.note.c_str());
            } else {
                std::printf("facet width E %.4g m (%.3g lambda), radius R %.4g m\n", d.E, d.E_wl, d.R);
                std::printf("E^2/(R lambda) %.3f, sagitta %.4g m (%.3g lambda)\n", d.ratio, d.sagitta,
                            d.sagitta_wl);
            }
            std::printf("verdict: %s\n", to_string(d.verdict));
        } else if (*tim) {
            auto sets = parse_sets(sets_arg);
            std::vector<Scenario> scenarios;
            for (const auto& p : expand_scenario_list(tim_args)) {
                Scenario s = load_scenario(p);
                if (step > 0) s.observation.step_deg = step;
                validate(s);
                scenarios.push_back(s);
            }
            auto cells = timing_report(scenarios, sets, workers, repeats);
            std::printf("%-24s", "scenario");
            for (auto set : sets) std::printf(" %12s", to_string(set));
            std::printf("\n");
            nlohmann::json js = nlohmann::json::array();
            for (std::size_t i = 0; i < scenarios.size(); ++i) {
                std::printf("%-24s", scenarios[i].name.c_str());
                for (std::size_t j = 0; j < sets.size(); ++j) {
                    const auto& c = cells[i * sets.size() + j];
                    std::printf(" %12.3f", c.seconds);
                    js.push_back({{"scenario", c.scenario}, {"set", to_string(c.set)},
                                  {"seconds", c.seconds}, {"wall_seconds", c.wall_s}, {"paths", c.paths}});
                }
                std::printf("\n");
            }
            if (!json_path.empty()) {
                std::ofstream f(json_path);
                if (!f) throw std::runtime_error("cannot write " + json_path);
                f << js.dump(2) << "\n";
            }
        }
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kValidation;
    } catch (const MeshError& e) {
        std::fprintf(stderr, "mesh error: %s\n", e.what());
        return kValidation;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return kDomain;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailure;
    }
    return kOk;
}
