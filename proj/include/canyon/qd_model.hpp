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

#ifndef CANYON_QD_MODEL_HPP
#define CANYON_QD_MODEL_HPP

#include "canyon/geometry.hpp"
#include "canyon/spectra.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace canyon
{
    using Matrix2 = std::array<std::array<double, 2>, 2>;

    // Row order of the transition matrices as stored in the parameters.
    enum class StateOrder
    {
        PresentFirst,
        AbsentFirst
    };

    struct BandQdParams
    {
        Matrix2 markov_nw{};
        Matrix2 markov_sw{};
        double arrival_mean_ns = 0.0;
        double slope_a = 0.0;       // dB/ns
        double intercept_b = 0.0;   // dB
        double shadow_sigma = 0.0;  // dB
        double det_amp_sigma_db = 4.0;
        double noise_floor_db = -30.0; // relative to the LoS path gain

        void validate() const;
    };

    struct QdModelParams
    {
        std::map<std::string, BandQdParams> bands; // keyed by BandConfig::name
        StateOrder state_order = StateOrder::PresentFirst;

        const BandQdParams &for_band(const std::string &name) const;
        void validate() const;

        // 154GHz and 300GHz fitted street-canyon values.
        static QdModelParams defaults();
    };

    nlohmann::json to_json(const QdModelParams &p);
    // Fields missing from j keep the values of base.
    QdModelParams params_from_json(const nlohmann::json &j, const QdModelParams &base = QdModelParams::defaults());

    // Probability of "present" under the stationary distribution. T is given with
    // present as state 0. Throws if the chain has no unique stationary distribution.
    double stationary_presence(const Matrix2 &t);

    // n states (true = present). Without a start state the first one is drawn from
    // the stationary distribution.
    std::vector<bool> markov_presence_sequence(const Matrix2 &t, std::size_t n, std::uint64_t seed,
                                               std::optional<bool> start = std::nullopt);

    // Reorders a stored matrix so that present is state 0.
    Matrix2 present_first(const Matrix2 &t, StateOrder order);

    struct QdPath
    {
        PathKind kind = PathKind::LoS;
        double delay_s = 0.0;
        double aod_deg = 0.0;
        double aoa_deg = 0.0;
        double gain_db = 0.0;

        bool operator==(const QdPath &) const = default;
    };

    struct CirRealization
    {
        std::string band;
        std::vector<QdPath> paths;
        std::uint64_t seed = 0;
        double distance_m = 0.0;
        // Excess-delay window over which random arrivals were generated.
        double random_window_s = 0.0;
        std::optional<bool> nw_present;
        std::optional<bool> sw_present;

        std::size_t count(PathKind k) const;
        bool operator==(const CirRealization &) const = default;
    };

    struct WallPresence
    {
        std::optional<bool> nw;
        std::optional<bool> sw;
    };

    // Independent generator stream for (seed, stream).
    std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream);

    // LoS plus whichever single-bounce paths are present. Presence comes from the
    // override or the stationary distribution of the wall's chain.
    std::vector<QdPath> deterministic_component(const GeometryScene &scene, const BandConfig &band,
                                                const QdModelParams &params, std::uint64_t seed,
                                                const WallPresence &presence = {});

    struct RandomComponents
    {
        std::vector<QdPath> paths;
        double window_s = 0.0;
    };

    RandomComponents random_components(double distance_m, const BandConfig &band, const QdModelParams &params,
                                       std::uint64_t seed, const AngleGrid &scan = AngleGrid::preset());

    // Deterministic part of the random-path gain relative to the LoS path gain.
    double random_path_envelope_db(const BandQdParams &p, double excess_delay_ns);

    // Raw draws of the arrival process' interarrival times (s), without the window.
    std::vector<double> interarrival_samples(const BandQdParams &p, std::size_t n, std::uint64_t seed);

    struct SynthesisOptions
    {
        WallPresence presence;
        bool include_random = true;
        AngleGrid scan = AngleGrid::preset();
    };

    CirRealization synthesize(const GeometryScene &scene, const BandConfig &band, const QdModelParams &params,
                              std::uint64_t seed, const SynthesisOptions &opt = {});

    // One realization per receiver; wall presence follows the Markov chains along
    // the receiver order.
    std::vector<CirRealization> synthesize_trajectory(const SceneDescription &desc, const BandConfig &band,
                                                      const QdModelParams &params, std::uint64_t seed,
                                                      const SynthesisOptions &opt = {});

    // Power on the band's delay grid, per-path peak units: a path on a bin with
    // on-grid angles shows its path gain at that bin.
    Pdp render_pdp(const CirRealization &real, const BandConfig &band, const AngleGrid &angles);

    // Directional-scan CTF of a realization with complex Gaussian noise; noise_sigma2
    // is the mean noise power per delay bin after path_gain_scale.
    MeasurementGrid render_ctf(const CirRealization &real, const BandConfig &band, const AngleGrid &angles,
                               double noise_sigma2, std::uint64_t seed);

    struct CensoredFit
    {
        double slope = 0.0;
        double intercept = 0.0;
        double sigma = 0.0;
        std::size_t n = 0;
        std::size_t n_censored = 0;
        int iterations = 0;
    };

    // Maximum-likelihood line fit y = slope x + intercept + N(0, sigma^2) where
    // y < floor is only known to be below the floor.
    CensoredFit fit_censored_line(const std::vector<double> &x, const std::vector<double> &y, double floor);

    // Random paths of a set of realizations: x = excess delay (ns), y = gain - LoS gain (dB).
    void random_path_regression_data(const std::vector<CirRealization> &reals, std::vector<double> &x,
                                     std::vector<double> &y);

    // band,tau_s,aod_deg,aoa_deg,power_db,cluster_id,kind,seed
    void write_realization_csv(std::ostream &out, const std::vector<CirRealization> &reals);
} // namespace canyon

#endif
