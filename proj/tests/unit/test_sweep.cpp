// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../support.hpp"

using namespace vdrt;

namespace {

Scenario coarse(const char* name, double step) {
    Scenario s = load_scenario(vdrt::test::scenario_path(name));
    s.observation.step_deg = step;
    return s;
}

std::string csv(const SweepResult& r) {
    std::ostringstream o;
    write_csv(o, r);
    return o.str();
}

}  // namespace

TEST_CASE("CSV layout and metadata") {
    Scenario s = load_scenario(vdrt::test::scenario_path("cylinder28_hh"));
    s.toggles = toggles_for(ToggleSet::RT, s.toggles);
    SweepResult r = run_sweep(s, 1);
    REQUIRE(r.rows.size() == 720);
    std::string text = csv(r);
    std::istringstream in(text);
    int data = 0, header = 0, meta = 0;
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("#", 0) == 0) ++meta;
        else if (line.rfind("angle", 0) == 0) ++header;
        else ++data;
    }
    CHECK(data == 720);
    CHECK(header == 1);
    CHECK(meta > 10);
    for (const char* key : {"a_lo", "a_hi", "flat_threshold_deg", "oracle_order", "backscatter", "shadow"}) {
        CAPTURE(key);
        CHECK(text.find(key) != std::string::npos);
    }
}

TEST_CASE("CSV round trip reproduces the RMSE exactly") {
    Scenario s = coarse("cylinder28_hh", 2.0);
    SweepResult sim = run_sweep(s, 1), ref = run_oracle(s);
    std::istringstream a(csv(sim)), b(csv(ref));
    SweepResult sim2 = read_csv(a), ref2 = read_csv(b);
    CHECK(csv(sim2) == csv(sim));
    CHECK(ref2.kind == SweepResult::Kind::Oracle);
    CHECK(ref2.oracle_order == ref.oracle_order);
    auto r1 = compare(sim, ref), r2 = compare(sim2, ref2);
    REQUIRE(r1.rows.size() == r2.rows.size());
    for (std::size_t i = 0; i < r1.rows.size(); ++i) CHECK(r1.rows[i].result.rmse_db == r2.rows[i].result.rmse_db);
    for (const auto& row : compare(sim, sim).rows) CHECK(row.result.rmse_db == 0.0);
}

TEST_CASE("compare resamples onto a finer reference") {
    Scenario s = coarse("cylinder28_hh", 5.0);
    Scenario fine = s;
    fine.observation.step_deg = 2.5;
    auto rep = compare(run_sweep(s, 1), run_oracle(fine));
    CHECK(rep.resampled);
    Scenario other = s;
    other.observation.step_deg = 10;
    Scenario finer = s;
    finer.observation.step_deg = 1;
    CHECK_NOTHROW(compare(run_sweep(finer, 1), run_oracle(other)));
    SweepResult gap = run_oracle(other);
    gap.rows.erase(gap.rows.begin() + 10, gap.rows.begin() + 20);
    CHECK_THROWS_AS(compare(run_sweep(s, 1), gap), ValidationError);
}

TEST_CASE("scattered and total fields") {
    Scenario s = coarse("cylinder50_hh", 10.0);
    s.toggles = toggles_for(ToggleSet::RT, s.toggles);
    SweepResult r = run_sweep(s, 1);
    for (const auto& row : r.rows) {
        CAPTURE(row.angle);
        if (row.census[0]) CHECK(std::abs(std::abs(row.Et - row.Es) - 1) < 1e-12);
        else CHECK(row.Et == row.Es);
    }
    // the deep shadow of an over-discretized body is out of reach of single diffraction
    const SweepRow& back = r.rows[18];
    REQUIRE(back.angle == 180.0);
    std::string text = csv(r);
    CHECK(to_db(back.Et) == kDbFloor);
    CHECK(text.find("\n180,0,0,0,0,-999,-999,") != std::string::npos);
}

TEST_CASE("census grows with the mechanism set") {
    Scenario s = coarse("sphere100_hh", 10.0);
    std::vector<SweepResult> runs;
    for (ToggleSet t : {ToggleSet::RT, ToggleSet::V, ToggleSet::VEE, ToggleSet::All}) {
        Scenario c = s;
        c.toggles = toggles_for(t, s.toggles);
        runs.push_back(run_sweep(c, 1));
    }
    for (std::size_t k = 1; k < runs.size(); ++k)
        for (std::size_t i = 0; i < runs[k].rows.size(); ++i)
            for (int c = 0; c < kCensusColumns; ++c) CHECK(runs[k].rows[i].census[c] >= runs[k - 1].rows[i].census[c]);
    // every angle sees a corner
    for (const auto& row : runs[1].rows) CHECK(row.census[3] > 0);
}

TEST_CASE("worker count does not change the output") {
    Scenario s = coarse("sphere100_hh", 5.0);
    CHECK(csv(run_sweep(s, 1)) == csv(run_sweep(s, 3)));
}

TEST_CASE("line sweeps and plot data") {
    Scenario s = load_scenario(vdrt::test::scenario_path("fig1_two_edge"));
    s.observation.points = 11;
    SweepResult r = run_sweep(s, 1);
    REQUIRE(r.rows.size() == 11);
    CHECK(r.rows.front().angle == doctest::Approx(0.0));
    CHECK(r.rows.back().angle == doctest::Approx(2.0));
    auto stem = (std::filesystem::temp_directory_path() / "vdrt_plot").string();
    write_plot_data(stem, r);
    std::ifstream es(stem + "_Es.dat"), et(stem + "_Et.dat");
    CHECK(es.good());
    CHECK(et.good());
    CHECK_THROWS_AS(run_oracle(s), ValidationError);
}

TEST_CASE("timing table") {
    Scenario s = coarse("cylinder28_hh", 30.0);
    CHECK(timing_report({s}, {}).empty());
    auto t = timing_report({s}, {ToggleSet::RT, ToggleSet::All}, 1);
    REQUIRE(t.size() == 2);
    CHECK(t[0].set == ToggleSet::RT);
    CHECK(t[1].paths >= t[0].paths);
}
