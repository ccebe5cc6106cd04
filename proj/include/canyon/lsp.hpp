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

#ifndef CANYON_LSP_HPP
#define CANYON_LSP_HPP

#include "canyon/mpc.hpp"
#include "canyon/spectra.hpp"

#include <json.hpp>

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace canyon
{
    enum class Scenario
    {
        LoS,
        NLoS
    };

    std::string to_string(Scenario s);
    Scenario scenario_from_string(const std::string &s);

    struct PathLossSample
    {
        double distance_m = 0.0;
        double pl_db = 0.0;
        std::string band;
        Scenario scenario = Scenario::LoS;
    };

    enum class PlModel
    {
        CI,
        FI
    };

    struct FitResult
    {
        PlModel model = PlModel::CI;
        double n = 0.0;     // CI exponent
        double alpha = 0.0; // FI slope
        double beta = 0.0;  // FI intercept, dB
        double sigma = 0.0; // RMS of residuals, N divisor
        std::vector<double> residuals;
    };

    // PL = -(10 log10(sum P) - G_A). Throws on an all-zero grid.
    double omni_path_loss(const PowerGrid &power, double ga_db);

    // 10 log10 of the summed pattern over the scan offsets, for one side.
    double beam_overlap_side_db(const std::vector<double> &axis, double hpbw_deg);
    // Tx side plus Rx side.
    double beam_overlap_gain(const AngleGrid &angles, const BandConfig &band);

    FitResult fit_ci(const std::vector<PathLossSample> &samples, double fc_hz);
    FitResult fit_fi(const std::vector<PathLossSample> &samples);

    // Zeroes entries below max(peak - window_db, floor_db), both in dB of linear power.
    Pdp acceptance_filter(const Pdp &pdp, double window_db = 20.0,
                          double floor_db = -std::numeric_limits<double>::infinity());
    Paps acceptance_filter(const Paps &pap, double window_db = 20.0,
                           double floor_db = -std::numeric_limits<double>::infinity());

    // Power-weighted standard deviation of delay, seconds.
    double delay_spread(const Pdp &pdp);

    // sqrt(-2 ln |R|), R the power-weighted mean unit phasor; |R| is floored at
    // min_resultant.
    double angular_spread(const Paps &pap, double min_resultant = 1e-12);

    // LoS-cluster power over the power of all other clusters, dB. +inf without other
    // clusters. printed_ratio returns the inverse.
    double k_factor(const ClusterSet &cs, int los_cluster_id = 1, bool printed_ratio = false);

    struct LspReport
    {
        std::string rx_id;
        std::string band;
        double pl_db = 0.0;
        double ds_s = 0.0;
        double asd_rad = 0.0;
        double asa_rad = 0.0;
        double k_factor_db = 0.0;
        double dr_db = 0.0;
        double sfdr_db = 0.0;
    };

    nlohmann::json to_json(const LspReport &r);
    nlohmann::json to_json(const FitResult &f);

    // distance_m,pl_db,band,scenario
    void write_pl_csv(std::ostream &out, const std::vector<PathLossSample> &samples);
    std::vector<PathLossSample> read_pl_csv(std::istream &in);
} // namespace canyon

#endif
