// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "vdrt/scenario.hpp"

namespace vdrt {

// CSV census columns: LOS, R (RR folded in), E (RE and ER folded in), V, EE, EV, VE.
inline constexpr int kCensusColumns = 7;
const char* census_name(int column);
int census_column(Mech m);

struct SweepRow {
    double angle = 0;  // degrees on a circle, wavelengths along a line
    cplx Es;           // every path except the direct one
    cplx Et;           // Es plus the direct path where it exists
    std::array<int, kCensusColumns> census{};
};

struct SweepResult {
    enum class Kind { Simulation, Oracle } kind = Kind::Simulation;
    Scenario scenario;
    std::vector<SweepRow> rows;
    int oracle_order = 0;  // truncation order of the reference series, 0 if none
    std::size_t facets = 0, wedges = 0, corners = 0;
    long dropped = 0, clamp_hits = 0;
    // setup and wall are wall-clock seconds; trace and field are thread CPU seconds summed over workers
    double setup_s = 0, trace_s = 0, field_s = 0, wall_s = 0;
    int workers = 1;
};

// VDRT_WORKERS if set, else the hardware concurrency.
int default_workers();

SweepResult run_sweep(const Scenario& s, int workers = 0);
// Analytic reference on the same grid. Throws ValidationError without a reference body.
SweepResult run_oracle(const Scenario& s);
int oracle_order(const Scenario& s);

// CSV with a commented metadata block that reproduces the scenario. Timings stay out.
void write_csv(std::ostream& out, const SweepResult& r);
void write_csv(const std::string& path, const SweepResult& r);
SweepResult read_csv(std::istream& in);
SweepResult read_csv(const std::string& path);
// Two-column dB-vs-abscissa files <stem>_Es.dat and <stem>_Et.dat.
void write_plot_data(const std::string& stem, const SweepResult& r);

struct CompareRow {
    Region region;
    RmseResult result;
};

struct CompareReport {
    std::vector<CompareRow> rows;
    bool resampled = false;  // reference taken at the nearest angle
    std::vector<double> angle, delta_es_db, delta_et_db;
};

// Regions default to the test sweep's regions. Throws ValidationError when a test angle has
// no reference sample within half a grid step.
CompareReport compare(const SweepResult& test, const SweepResult& ref,
                      std::vector<Region> regions = {});
void write_delta_csv(std::ostream& out, const CompareReport& r);

struct TimingCell {
    std::string scenario;
    ToggleSet set = ToggleSet::RT;
    double seconds = 0;  // trace plus field, summed over workers
    double wall_s = 0;
    long paths = 0;
};

// Every scenario under every toggle set, best of `repeats` runs.
std::vector<TimingCell> timing_report(const std::vector<Scenario>& scenarios,
                                      const std::vector<ToggleSet>& sets, int workers = 0,
                                      int repeats = 1);

}  // namespace vdrt
