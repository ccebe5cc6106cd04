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
//
// canyon-qd command-line front end.
//
//   canyon-qd analyze    --manifest pairs.json [--k 3] [--single-band]
//   canyon-qd synthesize -n 1000 [--scene scene.json]
//   canyon-qd fit        --input pl.csv
//   canyon-qd report     --analysis-dir out/
//
// Exit codes: 0 success, 1 internal error, 2 input error.

#include "canyon/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace
{
    nlohmann::json read_json_file(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw canyon::PipelineError("config", "", "cannot open " + path, true);
        try
        {
            return nlohmann::json::parse(in);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw canyon::PipelineError("config", "", path + ": " + e.what(), true);
        }
    }

    // Config from a previous run.json, checked against the command.
    nlohmann::json rerun_config(const std::string &path, const std::string &command)
    {
        const auto j = read_json_file(path);
        if (j.value("command", "") != command)
            throw canyon::PipelineError("config", "", path + " was written by '" + j.value("command", "?") + "'", true);
        return j.at("config");
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Sub-THz street-canyon channel processing and QD synthesis"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string band = "both";
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::string params_path;
    std::string config_path;
    app.add_option("--band", band, "154ghz, 300ghz or both")->check(CLI::IsMember({"154ghz", "300ghz", "both"}, CLI::ignore_case));
    app.add_option("--seed", seed, "Base seed");
    app.add_option("--out-dir", out_dir, "Output directory");
    app.add_option("--params", params_path, "JSON file of parameter overrides");
    app.add_option("--config", config_path, "Re-run from a run.json");

    canyon::AnalyzeConfig acfg;
    std::string manifest;
    auto *analyze = app.add_subcommand("analyze", "Noise filter, extract, cluster and characterise grid pairs");
    analyze->add_option("--manifest", manifest, "Grid-pair manifest JSON");
    analyze->add_option("--k", acfg.k, "Number of clusters");
    analyze->add_option("--xi", acfg.xi_db, "Threshold adjustment margin (dB)");
    analyze->add_option("--nu", acfg.nu, "Confidence parameter");
    analyze->add_option("--max-paths", acfg.max_paths, "MPC limit per grid");
    analyze->add_flag("--single-band", acfg.single_band, "Allow positions with one band only");
    analyze->add_flag("--printed-kf", acfg.kf_printed_ratio, "Report the inverse K-factor ratio");

    canyon::SynthesizeConfig scfg;
    std::string scene;
    auto *synth = app.add_subcommand("synthesize", "Generate QD channel realizations");
    synth->add_option("-n,--count", scfg.count, "Realizations per band");
    synth->add_option("--scene", scene, "Scene JSON (walls, Tx, receivers)");
    synth->add_option("--rx-x", scfg.rx_x_m, "Receiver x in the built-in canyon (m)");
    synth->add_flag("--trajectory", scfg.trajectory, "Chain wall presence along the receiver list");
    synth->add_flag("!--no-random", scfg.include_random, "Deterministic paths only");
    synth->add_option("--render", scfg.render_count, "Realizations to render as PDPs");

    canyon::FitConfig fcfg;
    std::string input;
    double fc = 0.0;
    auto *fit = app.add_subcommand("fit", "Fit CI and FI path-loss models to a PL CSV");
    fit->add_option("--input", input, "CSV with distance_m,pl_db,band,scenario");
    fit->add_option("--fc", fc, "Carrier frequency for CI fits (Hz)");

    canyon::ReportConfig rcfg;
    std::string analysis_dir;
    auto *report = app.add_subcommand("report", "Summarise the LSP files of an analyze run");
    report->add_option("--analysis-dir", analysis_dir, "Output directory of analyze");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const bool out_given = app.get_option("--out-dir")->count() > 0;
    try
    {
        if (analyze->parsed())
        {
            if (!config_path.empty())
                acfg = canyon::analyze_config_from_json(rerun_config(config_path, "analyze"));
            else
            {
                if (manifest.empty())
                    throw canyon::PipelineError("config", "", "--manifest is required", true);
                acfg.manifest = manifest;
                acfg.bands = canyon::band_selection_from_string(band);
                acfg.seed = seed;
                if (!params_path.empty())
                {
                    auto j = canyon::to_json(acfg);
                    j.merge_patch(read_json_file(params_path));
                    acfg = canyon::analyze_config_from_json(j);
                }
            }
            if (out_given || config_path.empty())
                acfg.out_dir = out_dir;
            const auto res = canyon::cmd_analyze(acfg);
            std::cout << "analyzed " << res.pairs.size() << " position(s) -> " << acfg.out_dir.string() << '\n';
        }
        else if (synth->parsed())
        {
            if (!config_path.empty())
                scfg = canyon::synthesize_config_from_json(rerun_config(config_path, "synthesize"));
            else
            {
                scfg.bands = canyon::band_selection_from_string(
                    app.get_option("--band")->count() ? band : std::string("154ghz"));
                scfg.seed = seed;
                if (!scene.empty())
                    scfg.scene = scene;
                if (!params_path.empty())
                    scfg.params_override = read_json_file(params_path);
            }
            if (out_given || config_path.empty())
                scfg.out_dir = out_dir;
            const auto res = canyon::cmd_synthesize(scfg);
            for (const auto &s : res.summaries)
                std::cout << s.band << ": " << s.realizations << " realization(s), NW presence " << s.presence_nw
                          << " (stationary " << s.expected_presence_nw << "), mean interarrival "
                          << s.interarrival_mean_ns << " ns\n";
        }
        else if (fit->parsed())
        {
            if (!config_path.empty())
                fcfg = canyon::fit_config_from_json(rerun_config(config_path, "fit"));
            else
            {
                if (input.empty())
                    throw canyon::PipelineError("config", "", "--input is required", true);
                fcfg.input = input;
                fcfg.bands = canyon::band_selection_from_string(band);
                if (fc > 0.0)
                    fcfg.fc_hz = fc;
            }
            if (out_given || config_path.empty())
                fcfg.out_dir = out_dir;
            for (const auto &g : canyon::cmd_fit(fcfg))
                std::cout << g.band << ' ' << canyon::to_string(g.scenario) << ": CI n=" << g.ci.n
                          << " sigma=" << g.ci.sigma << "; FI alpha=" << g.fi.alpha << " beta=" << g.fi.beta
                          << " sigma=" << g.fi.sigma << '\n';
        }
        else if (report->parsed())
        {
            if (!config_path.empty())
                rcfg = canyon::report_config_from_json(rerun_config(config_path, "report"));
            else
            {
                if (analysis_dir.empty())
                    throw canyon::PipelineError("config", "", "--analysis-dir is required", true);
                rcfg.analysis_dir = analysis_dir;
            }
            if (out_given || config_path.empty())
                rcfg.out_dir = out_dir;
            std::cout << canyon::cmd_report(rcfg).dump(2) << '\n';
        }
    }
    catch (const canyon::PipelineError &e)
    {
        std::cerr << "canyon-qd: " << e.what() << '\n';
        return e.input_error() ? 2 : 1;
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "canyon-qd: " << e.what() << '\n';
        return 2;
    }
    catch (const nlohmann::json::exception &e)
    {
        std::cerr << "canyon-qd: config: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "canyon-qd: internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
