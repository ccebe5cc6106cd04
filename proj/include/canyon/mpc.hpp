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

#ifndef CANYON_MPC_HPP
#define CANYON_MPC_HPP

#include "canyon/spectra.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace canyon
{
    enum class BandTag
    {
        Unset,
        F1,
        F2
    };

    std::string to_string(BandTag b);
    BandTag band_tag_from_string(const std::string &s);

    struct Mpc
    {
        double delay_s = 0.0;
        double aod_deg = 0.0;
        double aoa_deg = 0.0;
        double power_db = 0.0;
        BandTag band = BandTag::Unset;
        std::optional<int> cluster_id;

        bool operator==(const Mpc &) const = default;
    };

    // 20 log10(300 / 154): free-space offset applied to f2 powers before joint clustering.
    inline const double kBandScalingDb = 20.0 * std::log10(300.0 / 154.0);

    struct ExtractionOptions
    {
        std::size_t max_paths = 64;
        // Stop once the residual peak is less than stop_db above noise_sigma2.
        double stop_db = 6.0;
        double noise_sigma2 = 0.0;
        // Residual within guard_sigma standard deviations of the signal-noise cross
        // term of already-subtracted replicas is treated as explained.
        double guard_sigma = 3.0;
        // Detection threshold of the filtered grid. Residual left in a bin that a replica
        // has touched only counts as signal above this level (plus the guard term).
        double detection_threshold = 0.0;
        // Minimum delay half-window of the replica, in resolution cells. The window widens
        // until the kernel envelope drops below the noise or detection level.
        double window_cells = 32.0;
        BandTag band = BandTag::F1;
    };

    // Successive cancellation on the DDADPS at one-bin resolution. MPC power is the
    // picked peak times the delay-integrated replica energy, which equals the bin
    // power when n_fft == n_subcarriers.
    std::vector<Mpc> extract_mpcs(const PowerGrid &power, const ExtractionOptions &opt);

    std::vector<Mpc> merge_bands(const std::vector<Mpc> &f1, const std::vector<Mpc> &f2,
                                 double scale_db = kBandScalingDb);

    struct Centroid
    {
        double delay_s = 0.0;
        double aod_deg = 0.0;
        double aoa_deg = 0.0;
    };

    struct ClusterSet
    {
        std::vector<Mpc> mpcs;
        int k = 0;
        std::vector<bool> common_flags;   // index id - 1
        std::vector<Centroid> centroids;  // index id - 1
        std::vector<double> objective_history;
        bool f2_scaled = false;
        double scale_db = kBandScalingDb;
    };

    struct KpmOptions
    {
        double delay_weight = 8.0; // zeta of the MCD delay term
        std::size_t max_iterations = 200;
    };

    // Multipath component distance scale for the delay term over a given set.
    double mcd_delay_scale(const std::vector<Mpc> &mpcs, double delay_weight);
    double mcd_squared(const Mpc &a, const Centroid &c, double delay_scale);

    // Power-weighted K-means under the MCD metric. Cluster 1 holds the minimum-delay
    // MPC; the rest are ordered by centroid delay.
    ClusterSet cluster_kpm(const std::vector<Mpc> &merged, int k, std::uint64_t seed, const KpmOptions &opt = {});

    std::pair<ClusterSet, ClusterSet> split_bands(const ClusterSet &cs);

    struct RelativeClusterPower
    {
        int cluster_id = 0;
        double rel_f1_db = 0.0; // cluster PG minus LoS PG at f1
        double rel_f2_db = 0.0;
        double diff_db = 0.0;   // rel_f1 - rel_f2
    };

    struct ClusterReport
    {
        int k = 0;
        int count_f1 = 0;
        int count_f2 = 0;
        int los_cluster_id = 1;
        double los_pg_f1_db = 0.0;
        double los_pg_f2_db = 0.0;
        double nlos_sum_pg_f1_db = 0.0;
        double nlos_sum_pg_f2_db = 0.0;
        std::vector<int> common_cluster_ids;
        std::vector<RelativeClusterPower> relative;
        std::optional<bool> los_geometry_consistent;
    };

    // Powers are read in original units; f2 scaling is undone when present.
    // expected_los_delay_s enables the geometric check of the LoS cluster.
    ClusterReport cluster_stats(const ClusterSet &cs, std::optional<double> expected_los_delay_s = std::nullopt,
                                double los_delay_tolerance_s = 1e-9);

    nlohmann::json to_json(const ClusterReport &r);

    // band,tau_s,aod_deg,aoa_deg,power_db,cluster_id
    void write_mpc_csv(std::ostream &out, const std::vector<Mpc> &mpcs);
    std::vector<Mpc> read_mpc_csv(std::istream &in);
} // namespace canyon

#endif
