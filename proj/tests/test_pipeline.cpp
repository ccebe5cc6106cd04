// SPDX-License-Identifier: Apache-2.0
//
// canyon-qd: sub-THz street-canyon channel processing and synthesis
// Copyright (C) 2026 The canyon-qd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "canyon/pipeline.hpp"
#include "canyon/units.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

using namespace canyon;
namespace fs = std::filesystem;

namespace
{
    // Small same-span bands so the end-to-end tests stay quick.
    BandConfig lo_band() { return BandConfig::custom("154GHz", 154e9, 1e9, 64, 256, 26.4); }
    BandConfig hi_band() { return BandConfig::custom("300GHz", 300e9, 2e9, 128, 256, 25.8); }
    AngleGrid scan() { return AngleGrid::uniform(0.0, 9.0, 40); }

    CirRealization planted(const BandConfig &b, std::size_t los_bin, double los_gain_db)
    {
        const double bin = b.delay_bin_s();
        CirRealization r;
        r.band = b.name;
        r.paths = {{PathKind::LoS, static_cast<double>(los_bin) * bin, 0.0, 180.0, los_gain_db},
                   {PathKind::SbNw, static_cast<double>(los_bin + 60) * bin, 45.0, 135.0, los_gain_db - 8.0}};
        return r;
    }

    MeasurementGrid make_grid(const BandConfig &b, const std::string &id, std::size_t los_bin, std::uint64_t seed)
    {
        auto g = render_ctf(planted(b, los_bin, -80.0), b, scan(), 1e-13, seed);
        g.rx_id = id;
        g.tx_rx_distance_m = static_cast<double>(los_bin) * b.delay_bin_s() * kSpeedOfLight;
        return g;
    }

    // Writes grids for the given positions and a manifest; f2 omitted where asked.
    fs::path write_campaign(const fs::path &dir, const std::vector<std::size_t> &los_bins, bool drop_f2 = false)
    {
        nlohmann::json pairs = nlohmann::json::array();
        for (std::size_t i = 0; i < los_bins.size(); ++i)
        {
            const std::string id = "Rx" + std::to_string(i + 1);
            save_grid(make_grid(lo_band(), id, los_bins[i], 10 + i), dir / (id + "_f1"));
            nlohmann::json e = {{"id", id}, {"f1", id + "_f1"}};
            if (!drop_f2)
            {
                save_grid(make_grid(hi_band(), id, los_bins[i], 20 + i), dir / (id + "_f2"));
                e["f2"] = id + "_f2";
            }
            pairs.push_back(e);
        }
        std::ofstream(dir / "pairs.json") << nlohmann::json{{"k", 2}, {"pairs", pairs}}.dump(2);
        return dir / "pairs.json";
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    bool near_bin(const Mpc &m, double tau_s, double bin) { return std::abs(m.delay_s - tau_s) <= 1.01 * bin; }
} // namespace

TEST_CASE("analyze recovers planted paths in both bands")
{
    const auto dir = testing::scratch_dir("pipe_analyze");
    AnalyzeConfig cfg;
    cfg.manifest = write_campaign(dir, {40, 70});
    cfg.out_dir = dir / "out";
    const auto res = cmd_analyze(cfg);
    REQUIRE(res.pairs.size() == 2);
    const std::size_t los_bins[2] = {40, 70};
    for (std::size_t i = 0; i < 2; ++i)
    {
        const auto &pa = res.pairs[i];
        CHECK(pa.k_used == 2);
        for (const auto *ba : {&*pa.f1, &*pa.f2})
        {
            const double bin = ba->filtered.band.delay_bin_s();
            const auto truth = planted(ba->filtered.band, los_bins[i], -80.0);
            for (const auto &p : truth.paths)
            {
                bool found = false;
                for (const auto &m : ba->mpcs)
                    found = found || (near_bin(m, p.delay_s, bin) && m.aod_deg == p.aod_deg && m.aoa_deg == p.aoa_deg);
                CHECK(found);
            }
            for (const auto &m : ba->mpcs)
                CHECK((near_bin(m, truth.paths[0].delay_s, bin) || near_bin(m, truth.paths[1].delay_s, bin)));
            CHECK(std::isfinite(ba->lsp.pl_db));
            CHECK(ba->lsp.k_factor_db == doctest::Approx(8.0).epsilon(0.05));
        }
        CHECK(pa.cluster_report.common_cluster_ids.size() == 2);
    }
    for (const char *f : {"cluster_scatter.csv", "pl.csv", "lsp.json", "pdp_matrix_f1.csv", "pdp_matrix_f2.csv", "run.json"})
        CHECK(fs::exists(cfg.out_dir / f));
    for (const char *f : {"mpcs.csv", "clusters.json", "noise_f1.json", "lsp_f2.json", "pap_tx_f1.csv"})
        CHECK(fs::exists(cfg.out_dir / "Rx1" / f));

    // run.json reproduces the configuration.
    const auto run = nlohmann::json::parse(slurp(cfg.out_dir / "run.json"));
    CHECK(run["command"] == "analyze");
    const auto back = analyze_config_from_json(run["config"]);
    CHECK(back.k == 2);
    CHECK(back.manifest == cfg.manifest);

    ReportConfig rc;
    rc.analysis_dir = cfg.out_dir;
    rc.out_dir = dir / "report";
    const auto rep = cmd_report(rc);
    CHECK(fs::exists(rc.out_dir / "lsp_summary.csv"));
    CHECK(!rep.empty());
}

TEST_CASE("single-band mode runs on common thresholds only")
{
    const auto dir = testing::scratch_dir("pipe_single");
    AnalyzeConfig cfg;
    cfg.manifest = write_campaign(dir, {50}, true);
    cfg.out_dir = dir / "out";
    try
    {
        cmd_analyze(cfg);
        FAIL("expected a missing-grid error");
    }
    catch (const PipelineError &e)
    {
        CHECK(e.stage() == "load");
        CHECK(e.grid_id() == "Rx1");
        CHECK(e.input_error());
    }
    cfg.single_band = true;
    const auto res = cmd_analyze(cfg);
    REQUIRE(res.pairs.size() == 1);
    CHECK(res.pairs[0].f1.has_value());
    CHECK_FALSE(res.pairs[0].f2.has_value());
    CHECK(res.pairs[0].f1->noise_report.raised_bins.empty());
    CHECK(res.pairs[0].f1->noise_report.lowered_bins.empty());
    CHECK(res.pairs[0].f1->mpcs.size() >= 2);
}

TEST_CASE("malformed container fails in the load stage")
{
    const auto dir = testing::scratch_dir("pipe_malformed");
    AnalyzeConfig cfg;
    cfg.manifest = write_campaign(dir, {50});
    cfg.out_dir = dir / "out";
    const auto bin = dir / "Rx1_f2" / "ctf.bin";
    fs::resize_file(bin, fs::file_size(bin) - 8);
    try
    {
        cmd_analyze(cfg);
        FAIL("expected a load error");
    }
    catch (const PipelineError &e)
    {
        CHECK(e.stage() == "load");
        CHECK(e.grid_id() == "Rx1");
        CHECK(e.input_error());
        CHECK(std::string(e.what()).find("payload length mismatch") != std::string::npos);
    }
}

TEST_CASE("synthesize is reproducible and matches the stationary presence")
{
    const auto dir = testing::scratch_dir("pipe_synth");
    SynthesizeConfig cfg;
    cfg.count = 1;
    cfg.seed = 5;
    cfg.render_count = 1;
    cfg.out_dir = dir / "a";
    cmd_synthesize(cfg);
    cfg.out_dir = dir / "b";
    cmd_synthesize(cfg);
    for (const char *f : {"realizations_154GHz.csv", "pdp_154GHz.csv", "summary.json"})
    {
        REQUIRE(fs::exists(dir / "a" / f));
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }

    cfg.count = 1000;
    cfg.render_count = 0;
    cfg.out_dir = dir / "c";
    const auto res = cmd_synthesize(cfg);
    REQUIRE(res.summaries.size() == 1);
    CHECK(std::abs(res.summaries[0].presence_nw - 0.622) < 0.02);
    CHECK(res.summaries[0].expected_presence_nw == doctest::Approx(0.5 / 0.804));
    CHECK(res.summaries[0].random_power_fraction > 0.0);
}

TEST_CASE("overridden arrival rate shows in the summary")
{
    const auto dir = testing::scratch_dir("pipe_rate");
    SynthesizeConfig cfg;
    cfg.count = 1000;
    cfg.render_count = 0;
    cfg.out_dir = dir;
    cfg.params_override = nlohmann::json::parse(R"({"bands": {"154GHz": {"arrival_mean_ns": 10.0}}})");
    const auto res = cmd_synthesize(cfg);
    CHECK(std::abs(res.summaries[0].interarrival_mean_ns - 10.0) < 0.2);
    const auto run = nlohmann::json::parse(slurp(dir / "run.json"));
    CHECK(run["config"]["params_override"]["bands"]["154GHz"]["arrival_mean_ns"] == 10.0);
    CHECK(run["config"]["params_override"]["bands"]["300GHz"]["arrival_mean_ns"] == 64.82);
}

TEST_CASE("fit reads a path-loss csv")
{
    const auto dir = testing::scratch_dir("pipe_fit");
    std::vector<PathLossSample> s;
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> ld(0.0, 3.0);
    std::normal_distribution<double> sh(0.0, 0.85);
    const double fspl1 = fspl_db(1.0, 154e9);
    for (int i = 0; i < 1000; ++i)
    {
        const double d = std::pow(10.0, ld(rng));
        s.push_back({d, fspl1 + 19.4 * std::log10(d) + sh(rng), "154GHz", Scenario::LoS});
    }
    for (double d : {5.0, 10.0, 20.0, 40.0})
        s.push_back({d, 85.65 + 26.2 * std::log10(d), "300GHz", Scenario::NLoS});
    {
        std::ofstream f(dir / "pl.csv");
        write_pl_csv(f, s);
    }
    FitConfig cfg;
    cfg.input = dir / "pl.csv";
    cfg.out_dir = dir / "out";
    const auto groups = cmd_fit(cfg);
    REQUIRE(groups.size() == 2);
    for (const auto &g : groups)
    {
        if (g.band == "154GHz")
        {
            CHECK(std::abs(g.ci.n - 1.94) < 0.03);
            CHECK(std::abs(g.ci.sigma - 0.85) < 0.05);
        }
        else
        {
            CHECK(g.scenario == Scenario::NLoS);
            CHECK(g.fi.alpha == doctest::Approx(2.62).epsilon(1e-9));
            CHECK(g.fi.beta == doctest::Approx(85.65).epsilon(1e-9));
        }
    }
    CHECK(fs::exists(cfg.out_dir / "fits.json"));

    cfg.input = dir / "missing.csv";
    CHECK_THROWS_AS(cmd_fit(cfg), PipelineError);
}

TEST_CASE("parallel_for covers every index and rethrows")
{
    setenv("CANYON_QD_THREADS", "3", 1);
    CHECK(worker_count() == 3);
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits)
        CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i)
                                 { if (i == 7) throw std::runtime_error("boom"); }),
                    std::runtime_error);
    unsetenv("CANYON_QD_THREADS");
}

TEST_CASE("band selection names")
{
    for (auto b : {BandSelection::Low, BandSelection::High, BandSelection::Both})
        CHECK(band_selection_from_string(to_string(b)) == b);
    CHECK_THROWS(band_selection_from_string("60ghz"));
}
