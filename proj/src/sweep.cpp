// SPDX-License-Identifier: Apache-2.0
#include "vdrt/sweep.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <time.h>

namespace vdrt {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// per-thread CPU seconds, so preemption by other processes does not count
double thread_cpu() {
    timespec ts;
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return ts.tv_sec + 1e-9 * ts.tv_nsec;
}

std::string num(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double parse_num(const std::string& w) {
    double v = 0;
    auto r = std::from_chars(w.data(), w.data() + w.size(), v);
    if (r.ec != std::errc() || r.ptr != w.data() + w.size())
        throw ValidationError("bad number in CSV: '" + w + "'");
    return v;
}

const char* const kColumns[] = {"angle_deg", "Es_re", "Es_im", "Et_re", "Et_im", "Es_db", "Et_db",
                                "n_paths_LOS", "n_paths_R", "n_paths_E", "n_paths_V",
                                "n_paths_EE", "n_paths_EV", "n_paths_VE"};
constexpr int kNumColumns = 14;

}  // namespace

const char* census_name(int column) {
    static const char* names[] = {"LOS", "R", "E", "V", "EE", "EV", "VE"};
    return names[column];
}

int census_column(Mech m) {
    switch (m) {
        case Mech::LOS: return 0;
        case Mech::R:
        case Mech::RR: return 1;
        case Mech::E:
        case Mech::RE:
        case Mech::ER: return 2;
        case Mech::V: return 3;
        case Mech::EE: return 4;
        case Mech::EV: return 5;
        case Mech::VE: return 6;
        default: return -1;
    }
}

int default_workers() {
    if (const char* e = std::getenv("VDRT_WORKERS")) {
        int n = std::atoi(e);
        if (n > 0) return n;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

int oracle_order(const Scenario& s) {
    switch (s.reference) {
        case Scenario::Reference::Cylinder:
            return series_order(s.k0() * s.geometry.radius) + s.oracle_extra_terms;
        case Scenario::Reference::Sphere:
            return MieSeries(s.geometry.radius, s.k0(),
                             s.source.polarization == Output::HH ? MieSeries::Pol::HH
                                                                 : MieSeries::Pol::VV,
                             s.oracle_extra_terms)
                .order();
        case Scenario::Reference::None:
            break;
    }
    return 0;
}

SweepResult run_sweep(const Scenario& s, int workers) {
    validate(s);
    SweepResult res;
    res.scenario = s;
    res.oracle_order = oracle_order(s);
    res.workers = workers > 0 ? workers : default_workers();
    auto t0 = Clock::now();

    FacetMesh mesh = make_mesh(s);
    WedgeSet ws = extract_wedges_and_corners(mesh, make_extract_options(s));
    PathTracer tracer(mesh, ws, make_source(s), s.toggles);
    FieldOptions fo;
    fo.k0 = s.k0();
    fo.output = s.source.polarization;
    fo.blend = s.blend;
    fo.soft_slope = s.soft_slope;
    FieldEvaluator fe(tracer, fo);
    res.facets = mesh.num_facets();
    res.wedges = ws.wedges.size();
    res.corners = ws.corners.size();
    res.setup_s = since(t0);

    auto abscissa = observation_abscissa(s);
    auto points = observation_points(s);
    res.rows.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) res.rows[i].angle = abscissa[i];

    struct Local {
        FieldStats stats;
        double trace_s = 0, field_s = 0;
    };
    int nw = std::min<int>(res.workers, std::max<std::size_t>(1, points.size()));
    std::vector<Local> local(nw);
    std::atomic<std::size_t> next{0};
    auto work = [&](Local& loc) {
        for (std::size_t i; (i = next.fetch_add(1)) < points.size();) {
            double ta = thread_cpu();
            auto paths = tracer.trace(points[i]);
            double tb = thread_cpu();
            SweepRow& row = res.rows[i];
            cplx los;
            for (const auto& p : paths) {
                PathField f = fe.path_field(p, points[i], &loc.stats);
                if (!f.ok) continue;
                cplx v = fe.project(f);
                if (p.mech == Mech::LOS) los += v;
                else row.Es += v;
                int c = census_column(p.mech);
                if (c >= 0) ++row.census[c];
            }
            row.Et = row.Es + los;
            loc.trace_s += tb - ta;
            loc.field_s += thread_cpu() - tb;
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < nw; ++w) pool.emplace_back(work, std::ref(local[w]));
    work(local[0]);
    for (auto& t : pool) t.join();
    for (const auto& l : local) {
        res.dropped += l.stats.dropped;
        res.clamp_hits += l.stats.clamp_hits;
        res.trace_s += l.trace_s;
        res.field_s += l.field_s;
    }
    res.wall_s = since(t0);
    return res;
}

SweepResult run_oracle(const Scenario& s) {
    validate(s);
    if (s.reference == Scenario::Reference::None)
        throw ValidationError("scenario " + s.name + " has no analytic reference");
    SweepResult res;
    res.kind = SweepResult::Kind::Oracle;
    res.scenario = s;
    res.oracle_order = oracle_order(s);
    auto t0 = Clock::now();
    auto abscissa = observation_abscissa(s);
    auto points = observation_points(s);
    bool hh = s.source.polarization == Output::HH;
    const double R = s.geometry.radius, k = s.k0();
    if (s.reference == Scenario::Reference::Cylinder) {
        CylinderSeries cs(R, k, hh ? CylinderSeries::Pol::TE : CylinderSeries::Pol::TM,
                          s.oracle_extra_terms);
        for (std::size_t i = 0; i < points.size(); ++i) {
            auto f = cs.at(s.observation.radius, abscissa[i] * kPi / 180);
            res.rows.push_back({abscissa[i], f.scattered, f.total(), {}});
        }
    } else {
        MieSeries ms(R, k, hh ? MieSeries::Pol::HH : MieSeries::Pol::VV, s.oracle_extra_terms);
        for (std::size_t i = 0; i < points.size(); ++i) {
            auto f = ms.at(points[i]);
            cplx es = hh ? f.Hs.z : f.Es.z, ei = hh ? f.Hi.z : f.Ei.z;
            res.rows.push_back({abscissa[i], es, es + ei, {}});
        }
    }
    res.wall_s = since(t0);
    return res;
}

void write_csv(std::ostream& out, const SweepResult& r) {
    out << "# ; vdrt sweep\n";
    std::istringstream ini(write_scenario(r.scenario));
    for (std::string line; std::getline(ini, line);) out << "# " << line << "\n";
    out << "# [run]\n# kind = " << (r.kind == SweepResult::Kind::Oracle ? "oracle" : "simulation")
        << "\n# oracle_order = " << r.oracle_order << "\n# mesh_facets = " << r.facets
        << "\n# wedges = " << r.wedges << "\n# corners = " << r.corners
        << "\n# dropped_paths = " << r.dropped << "\n# clamp_hits = " << r.clamp_hits
        << "\n# rows = " << r.rows.size() << "\n";
    for (int c = 0; c < kNumColumns; ++c) out << (c ? "," : "") << kColumns[c];
    out << "\n";
    for (const auto& row : r.rows) {
        out << num(row.angle) << ',' << num(row.Es.real()) << ',' << num(row.Es.imag()) << ','
            << num(row.Et.real()) << ',' << num(row.Et.imag()) << ',' << num(to_db(row.Es)) << ','
            << num(to_db(row.Et));
        for (int n : row.census) out << ',' << n;
        out << "\n";
    }
}

void write_csv(const std::string& path, const SweepResult& r) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    write_csv(f, r);
    if (!f) throw std::runtime_error("write failed: " + path);
}

SweepResult read_csv(std::istream& in) {
    SweepResult r;
    std::string meta, line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.rfind("#", 0) == 0) {
            meta += line.substr(std::min<std::size_t>(2, line.size())) + "\n";
            continue;
        }
        if (line.empty()) continue;
        if (!header) {
            std::string expect;
            for (int c = 0; c < kNumColumns; ++c) expect += std::string(c ? "," : "") + kColumns[c];
            if (line != expect) throw ValidationError("unexpected CSV header: " + line);
            header = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
        if (f.size() != kNumColumns) throw ValidationError("bad CSV row: " + line);
        SweepRow row;
        row.angle = parse_num(f[0]);
        row.Es = {parse_num(f[1]), parse_num(f[2])};
        row.Et = {parse_num(f[3]), parse_num(f[4])};
        for (int c = 0; c < kCensusColumns; ++c) row.census[c] = std::stoi(f[7 + c]);
        r.rows.push_back(row);
    }
    if (!header) throw ValidationError("CSV has no header row");
    {
        std::istringstream ms(meta);
        r.scenario = parse_scenario(ms);
    }
    boost::property_tree::ptree t;
    std::istringstream ms(meta);
    boost::property_tree::read_ini(ms, t);
    r.kind = t.get<std::string>("run.kind", "simulation") == "oracle" ? SweepResult::Kind::Oracle
                                                                     : SweepResult::Kind::Simulation;
    r.oracle_order = t.get<int>("run.oracle_order", 0);
    r.facets = t.get<std::size_t>("run.mesh_facets", 0);
    r.wedges = t.get<std::size_t>("run.wedges", 0);
    r.corners = t.get<std::size_t>("run.corners", 0);
    r.dropped = t.get<long>("run.dropped_paths", 0);
    r.clamp_hits = t.get<long>("run.clamp_hits", 0);
    return r;
}

SweepResult read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open " + path);
    return read_csv(f);
}

void write_plot_data(const std::string& stem, const SweepResult& r) {
    const char* unit = r.scenario.observation.kind == ObservationSpec::Kind::Circle ? "angle_deg"
                                                                                   : "offset_lam";
    for (bool total : {false, true}) {
        std::string path = stem + (total ? "_Et.dat" : "_Es.dat");
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot write " + path);
        f << "# " << unit << ' ' << (total ? "Et_db" : "Es_db") << "\n";
        for (const auto& row : r.rows) f << num(row.angle) << ' ' << num(to_db(total ? row.Et : row.Es)) << "\n";
    }
}

CompareReport compare(const SweepResult& test, const SweepResult& ref, std::vector<Region> regions) {
    if (regions.empty()) regions = test.scenario.regions;
    if (test.rows.empty() || ref.rows.empty()) throw ValidationError("empty sweep");
    CompareReport rep;
    bool circle = test.scenario.observation.kind == ObservationSpec::Kind::Circle;
    std::vector<std::size_t> idx(test.rows.size());
    bool same = test.rows.size() == ref.rows.size();
    for (std::size_t i = 0; same && i < test.rows.size(); ++i)
        same = test.rows[i].angle == ref.rows[i].angle;
    if (same) {
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    } else {
        rep.resampled = true;
        double step = circle ? 360.0 : kInf;
        for (std::size_t j = 1; j < ref.rows.size(); ++j)
            step = std::min(step, std::abs(ref.rows[j].angle - ref.rows[j - 1].angle));
        auto dist = [&](double a, double b) {
            double d = std::abs(a - b);
            return circle ? std::min(d, 360 - d) : d;
        };
        for (std::size_t i = 0; i < idx.size(); ++i) {
            std::size_t best = 0;
            for (std::size_t j = 1; j < ref.rows.size(); ++j)
                if (dist(test.rows[i].angle, ref.rows[j].angle) <
                    dist(test.rows[i].angle, ref.rows[best].angle))
                    best = j;
            if (dist(test.rows[i].angle, ref.rows[best].angle) > 0.5 * step + 1e-9)
                throw ValidationError("reference grid does not cover angle " +
                                      num(test.rows[i].angle));
            idx[i] = best;
        }
    }
    std::vector<double> ang, tes, tet, res, ret;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const auto &a = test.rows[i], &b = ref.rows[idx[i]];
        ang.push_back(a.angle);
        tes.push_back(to_db(a.Es));
        tet.push_back(to_db(a.Et));
        res.push_back(to_db(b.Es));
        ret.push_back(to_db(b.Et));
        rep.angle.push_back(a.angle);
        rep.delta_es_db.push_back(tes.back() - res.back());
        rep.delta_et_db.push_back(tet.back() - ret.back());
    }
    for (const auto& rg : regions)
        rep.rows.push_back({rg, rmse_db(ang, rg.total ? tet : tes, rg.total ? ret : res, rg)});
    return rep;
}

void write_delta_csv(std::ostream& out, const CompareReport& r) {
    out << "angle_deg,dEs_db,dEt_db\n";
    for (std::size_t i = 0; i < r.angle.size(); ++i)
        out << num(r.angle[i]) << ',' << num(r.delta_es_db[i]) << ',' << num(r.delta_et_db[i]) << "\n";
}

std::vector<TimingCell> timing_report(const std::vector<Scenario>& scenarios,
                                      const std::vector<ToggleSet>& sets, int workers,
                                      int repeats) {
    std::vector<TimingCell> out;
    std::vector<Scenario> runs;
    for (const auto& s : scenarios)
        for (ToggleSet set : sets) {
            Scenario t = s;
            t.toggles = toggles_for(set, s.toggles);
            runs.push_back(t);
            out.push_back({s.name, set, kInf, kInf, 0});
        }
    // repeats interleave the cells so slow drift in machine load hits every cell alike
    for (int rep = 0; rep < std::max(1, repeats); ++rep)
        for (std::size_t i = 0; i < runs.size(); ++i) {
            auto r = run_sweep(runs[i], workers);
            TimingCell& cell = out[i];
            cell.seconds = std::min(cell.seconds, r.trace_s + r.field_s);
            cell.wall_s = std::min(cell.wall_s, r.wall_s);
            cell.paths = 0;
            for (const auto& row : r.rows)
                for (int n : row.census) cell.paths += n;
        }
    return out;
}

}  // namespace vdrt
