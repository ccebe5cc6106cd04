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

#ifndef CANYON_NOISE_FILTER_HPP
#define CANYON_NOISE_FILTER_HPP

#include "canyon/spectra.hpp"

#include <json.hpp>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace canyon
{
    class EstimationError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    struct NoiseEstimate
    {
        double sigma2 = 0.0;           // estimated noise power, linear
        std::size_t n_opt = 0;         // samples used for the estimate
        std::size_t n_samples = 0;     // |H|
        double confidence = 0.0;       // rho = 1 - 1/(nu |H|)
        double nu = 10.0;
        double threshold_common = 0.0; // -sigma2 ln(1 - rho)
    };

    struct NoiseOptions
    {
        double nu = 10.0;
        // Candidate N_opt values: geometric ladder from min_fraction |H| to |H|.
        std::size_t ladder_points = 50;
        double min_fraction = 0.1;
    };

    double confidence_level(double nu, std::size_t n_samples);
    double common_threshold(double sigma2, double confidence);

    // Fits an exponential noise model to the smallest samples; see NoiseOptions.
    NoiseEstimate estimate_noise(std::span<const double> samples, const NoiseOptions &opt = {});
    NoiseEstimate estimate_noise(const PowerGrid &power, const NoiseOptions &opt = {});

    // Per-delay-bin threshold, linear power.
    struct ThresholdProfile
    {
        std::vector<double> threshold;
        double common = 0.0;
        double margin_db = 1.0;

        static ThresholdProfile uniform(std::size_t n_bins, double level, double margin_db = 1.0);
    };

    // Zeroes bins whose power is below the threshold at their delay.
    PowerGrid apply_threshold(const PowerGrid &power, const ThresholdProfile &profile);

    // Delay bins of the PDP that are strictly above both neighbours and above `floor`.
    std::vector<std::size_t> local_peaks(std::span<const double> pdp, double floor);

    struct DualBandThresholds
    {
        ThresholdProfile band1, band2;
        std::vector<std::size_t> peaks1, peaks2;       // M1, M2 (delay bins)
        std::vector<std::size_t> uncommon1, uncommon2; // U1, U2
        std::vector<std::size_t> raised1, raised2;     // bins moved to common + margin
        std::vector<std::size_t> lowered1, lowered2;   // bins moved to common - margin
        // Updates skipped because an earlier update already claimed the bin.
        std::vector<std::size_t> conflicts1, conflicts2;
    };

    // Cross-checks the two bands' PDP peaks and moves individual delay-bin thresholds
    // by +-xi_db around the common thresholds.
    DualBandThresholds dual_band_thresholds(const PowerGrid &p1, const PowerGrid &p2,
                                            const NoiseEstimate &est1, const NoiseEstimate &est2,
                                            double xi_db = 1.0);

    struct NoiseReport
    {
        double sigma2_db = 0.0;
        double zeta_common_db = 0.0;
        std::size_t n_opt = 0;
        double dr_db = 0.0;   // peak over noise floor
        double sfdr_db = 0.0; // peak over threshold
        std::vector<std::size_t> raised_bins;
        std::vector<std::size_t> lowered_bins;
        std::vector<std::size_t> conflict_bins;
    };

    NoiseReport make_noise_report(const PowerGrid &power, const NoiseEstimate &est);
    nlohmann::json to_json(const NoiseReport &r);
} // namespace canyon

#endif
