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

#ifndef CANYON_PIPELINE_HPP
#define CANYON_PIPELINE_HPP

#include "canyon/lsp.hpp"
#include "canyon/mpc.hpp"
#include "canyon/noise_filter.hpp"
#include "canyon/qd_model.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace canyon
{
    // A stage failure; input_error marks problems with user-supplied data or config.
    class PipelineError : public std::runtime_error
    {
    public:
        PipelineError(std::string stage, std::string grid_id, const std::string &what, bool input_error)
            : std::runtime_error("[" + stage + (grid_id.empty() ? "" : " " + grid_id) + "] " + what),
              stage_(std::move(stage)), grid_id_(std::move(grid_id)), input_error_(input_error)
        {
        }
        const std::string &stage() const { return stage_; }
        const std::string &grid_id() const { return grid_id_; }
        bool input_error() const { return input_error_; }

    private:
        std::string stage_;
        std::string grid_id_;
        bool input_error_;
    };

    enum class BandSelection
    {
        Low,  // 154 GHz / f1
        High, // 300 GHz / f2
        Both
    };

    std::string to_string(BandSelection b);
    BandSelection band_selection_from_string(const std::string &s);

    // Worker count: CANYON_QD_THREADS if set and positive, else hardware concurrency.
    unsigned worker_count();
    // Runs fn(i) for i in [0, n) on up to worker_count() threads; rethrows the first error.
    void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn);

    struct AnalyzeConfig
    {
        std::filesystem::path manifest;
        std::filesystem::path out_dir = "out";
        BandSelection bands = BandSelection::Both;
        // Allow positions with only one band's grid (common thresholds only).
        bool single_band = false;
        std::uint64_t seed = 1;
        int k = 3;
        double xi_db = 1.0;
        double nu = 10.0;
        std::size_t max_paths = 64;
        double stop_db = 6.0;
        double guard_sigma = 3.0;
        double window_cells = 32.0;
        double delay_weight = 8.0;
        double acceptance_window_db = 20.0;
        bool kf_printed_ratio = false;
    };

    struct GridPairEntry
    {
        std::string id;
        std::optional<std::filesystem::path> f1;
        std::optional<std::filesystem::path> f2;
        std::optional<double> expected_los_delay_s;
    };

    struct Manifest
    {
        std::vector<GridPairEntry> pairs;
        std::optional<int> k;
    };

    // {"k": 3, "pairs": [{"id": "Rx1", "f1": "dir", "f2": "dir"}]}; relative paths
    // resolve against the manifest's directory.
    Manifest load_manifest(const std::filesystem::path &path);

    struct BandAnalysis
    {
        PowerGrid filtered;
        NoiseEstimate noise;
        NoiseReport noise_report;
        std::vector<Mpc> mpcs;
        LspReport lsp;
    };

    struct PairAnalysis
    {
        std::string id;
        double distance_m = 0.0;
        std::optional<BandAnalysis> f1;
        std::optional<BandAnalysis> f2;
        ClusterSet clusters;
        ClusterReport cluster_report;
        int k_used = 0;
    };

    struct AnalyzeResult
    {
        std::vector<PairAnalysis> pairs;
    };

    // Processes one already-loaded pair (either grid may be absent).
    PairAnalysis analyze_pair(const std::string &id, const std::optional<MeasurementGrid> &g1,
                              const std::optional<MeasurementGrid> &g2, const AnalyzeConfig &cfg,
                              std::optional<double> expected_los_delay_s = std::nullopt);

    AnalyzeResult cmd_analyze(const AnalyzeConfig &cfg);

    struct SynthesizeConfig
    {
        std::filesystem::path out_dir = "out";
        BandSelection bands = BandSelection::Low;
        std::uint64_t seed = 1;
        std::size_t count = 1000;
        nlohmann::json params_override = nlohmann::json::object();
        std::optional<std::filesystem::path> scene;
        double rx_x_m = 15.0; // receiver position in the built-in canyon when no scene is given
        bool trajectory = false;
        bool include_random = true;
        std::size_t render_count = 10;
    };

    struct BandSynthesisSummary
    {
        std::string band;
        std::size_t realizations = 0;
        double mean_los_pg_db = 0.0;
        double presence_nw = 0.0;
        double presence_sw = 0.0;
        double expected_presence_nw = 0.0;
        double expected_presence_sw = 0.0;
        std::size_t random_paths = 0;
        double interarrival_mean_ns = 0.0; // random-path count over total window
        double expected_interarrival_ns = 0.0;
        double random_power_fraction = 0.0;
    };

    struct SynthesizeResult
    {
        std::vector<BandSynthesisSummary> summaries;
        std::vector<std::vector<CirRealization>> realizations; // per band
    };

    SynthesizeResult cmd_synthesize(const SynthesizeConfig &cfg);

    struct FitConfig
    {
        std::filesystem::path input;
        std::filesystem::path out_dir = "out";
        BandSelection bands = BandSelection::Both;
        std::optional<double> fc_hz; // for CI fits of bands without a known preset
    };

    struct FitGroup
    {
        std::string band;
        Scenario scenario = Scenario::LoS;
        FitResult ci;
        FitResult fi;
    };

    std::vector<FitGroup> cmd_fit(const FitConfig &cfg);

    struct ReportConfig
    {
        std::filesystem::path analysis_dir;
        std::filesystem::path out_dir = "out";
    };

    // Collects the per-position LSP files of an analyze run into one table.
    nlohmann::json cmd_report(const ReportConfig &cfg);

    nlohmann::json to_json(const AnalyzeConfig &c);
    nlohmann::json to_json(const SynthesizeConfig &c);
    nlohmann::json to_json(const FitConfig &c);
    nlohmann::json to_json(const ReportConfig &c);
    AnalyzeConfig analyze_config_from_json(const nlohmann::json &j);
    SynthesizeConfig synthesize_config_from_json(const nlohmann::json &j);
    FitConfig fit_config_from_json(const nlohmann::json &j);
    ReportConfig report_config_from_json(const nlohmann::json &j);

    // {"tool": "canyon-qd", "command": ..., "config": ...}
    void write_run_json(const std::filesystem::path &out_dir, const std::string &command, const nlohmann::json &config);
} // namespace canyon

#endif
