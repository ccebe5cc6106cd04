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

#include "canyon/noise_filter.hpp"
#include "canyon/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace canyon
{
    namespace
    {
        // Above this many sorted points the CDF distance is evaluated on a regular
        // stride through H(1:n).
        constexpr std::size_t kMaxCdfPoints = 1u << 16;

        std::vector<std::size_t> ladder(std::size_t n_total, const NoiseOptions &opt)
        {
            const double lo = std::max(1.0, std::ceil(opt.min_fraction * static_cast<double>(n_total)));
            const double hi = static_cast<double>(n_total);
            std::vector<std::size_t> out;
            const std::size_t pts = std::max<std::size_t>(opt.ladder_points, 2);
            for (std::size_t i = 0; i < pts; ++i)
            {
                const double t = static_cast<double>(i) / static_cast<double>(pts - 1);
                out.push_back(static_cast<std::size_t>(std::llround(lo * std::pow(hi / lo, t))));
            }
            out.back() = n_total;
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            return out;
        }

        std::size_t nearest_bin(const PowerGrid &g, double delay_s)
        {
            const double b = g.band.delay_bin_s();
            const auto k = static_cast<long>(std::llround(delay_s / b));
            return static_cast<std::size_t>(std::clamp<long>(k, 0, static_cast<long>(g.power.dim0()) - 1));
        }

        double max_over_angles(const PowerGrid &g, std::size_t k)
        {
            const auto s = g.power.slice(k);
            return s.empty() ? 0.0 : *std::max_element(s.begin(), s.end());
        }

        std::vector<std::size_t> uncommon(const std::vector<std::size_t> &own, const PowerGrid &own_grid,
                                          const std::vector<std::size_t> &other, const PowerGrid &other_grid,
                                          double tol_s)
        {
            std::vector<std::size_t> out;
            for (auto k : own)
            {
                const double t = own_grid.delay_axis_s[k];
                const bool matched = std::any_of(other.begin(), other.end(), [&](std::size_t q)
                                                 { return std::abs(other_grid.delay_axis_s[q] - t) <= tol_s; });
                if (!matched)
                    out.push_back(k);
            }
            return out;
        }
    } // namespace

    double confidence_level(double nu, std::size_t n_samples)
    {
        if (!(nu > 0.0) || n_samples == 0)
            throw std::invalid_argument("confidence_level: nu and |H| must be positive");
        return 1.0 - 1.0 / (nu * static_cast<double>(n_samples));
    }

    double common_threshold(double sigma2, double confidence)
    {
        if (!(confidence > 0.0 && confidence < 1.0))
            throw std::invalid_argument("common_threshold: confidence must lie in (0, 1)");
        return -sigma2 * std::log1p(-confidence);
    }

    NoiseEstimate estimate_noise(std::span<const double> samples, const NoiseOptions &opt)
    {
        const std::size_t n_total = samples.size();
        if (n_total < 100)
            throw EstimationError("estimate_noise: at least 100 samples are required");

        std::vector<double> h(samples.begin(), samples.end());
        std::sort(h.begin(), h.end());
        if (h.front() == h.back())
            throw EstimationError("estimate_noise: degenerate input (all samples equal)");
        if (h.front() < 0.0 || !std::isfinite(h.back()))
            throw EstimationError("estimate_noise: samples must be finite and non-negative");

        std::vector<double> prefix(n_total + 1, 0.0);
        for (std::size_t i = 0; i < n_total; ++i)
            prefix[i + 1] = prefix[i] + h[i];

        const double inv_total = 1.0 / static_cast<double>(n_total);
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_n = n_total;
        for (std::size_t n : ladder(n_total, opt))
        {
            const double mean = prefix[n] / static_cast<double>(n);
            if (!(mean > 0.0))
                continue;
            const std::size_t stride = std::max<std::size_t>(1, n / kMaxCdfPoints);
            double acc = 0.0;
            std::size_t cnt = 0;
            for (std::size_t i = stride - 1; i < n; i += stride)
            {
                const double model = -std::expm1(-h[i] / mean);
                const double meas = static_cast<double>(i + 1) * inv_total;
                acc += (model - meas) * (model - meas);
                ++cnt;
            }
            const double dist = acc / static_cast<double>(cnt);
            if (dist < best)
            {
                best = dist;
                best_n = n;
            }
        }

        NoiseEstimate est;
        est.n_samples = n_total;
        est.n_opt = best_n;
        est.sigma2 = prefix[best_n] / static_cast<double>(best_n);
        est.nu = opt.nu;
        est.confidence = confidence_level(opt.nu, n_total);
        est.threshold_common = common_threshold(est.sigma2, est.confidence);
        return est;
    }

    NoiseEstimate estimate_noise(const PowerGrid &power, const NoiseOptions &opt)
    {
        return estimate_noise(power.power.flat(), opt);
    }

    ThresholdProfile ThresholdProfile::uniform(std::size_t n_bins, double level, double margin_db)
    {
        ThresholdProfile p;
        p.threshold.assign(n_bins, level);
        p.common = level;
        p.margin_db = margin_db;
        return p;
    }

    PowerGrid apply_threshold(const PowerGrid &power, const ThresholdProfile &profile)
    {
        if (profile.threshold.size() != power.power.dim0())
            throw std::invalid_argument("apply_threshold: profile length must equal the number of delay bins");
        PowerGrid out = power;
        for (std::size_t k = 0; k < out.power.dim0(); ++k)
        {
            const double th = profile.threshold[k];
            for (auto &p : out.power.slice(k))
                if (p < th)
                    p = 0.0;
        }
        out.filtered = true;
        return out;
    }

    std::vector<std::size_t> local_peaks(std::span<const double> pdp, double floor)
    {
        std::vector<std::size_t> peaks;
        const std::size_t n = pdp.size();
        for (std::size_t k = 0; k < n; ++k)
        {
            const double v = pdp[k];
            if (!(v > floor))
                continue;
            const bool left = k == 0 || v > pdp[k - 1];
            const bool right = k + 1 == n || v > pdp[k + 1];
            if (left && right)
                peaks.push_back(k);
        }
        return peaks;
    }

    DualBandThresholds dual_band_thresholds(const PowerGrid &p1, const PowerGrid &p2,
                                            const NoiseEstimate &est1, const NoiseEstimate &est2,
                                            double xi_db)
    {
        if (std::abs(p1.band.delay_span_s - p2.band.delay_span_s) > 1e-6 * std::max(p1.band.delay_span_s, p2.band.delay_span_s))
            throw std::invalid_argument("dual_band_thresholds: incompatible delay spans");

        const double zc1 = est1.threshold_common;
        const double zc2 = est2.threshold_common;
        const double up = from_db(xi_db);
        const double down = from_db(-xi_db);

        DualBandThresholds r;
        r.band1 = ThresholdProfile::uniform(p1.power.dim0(), zc1, xi_db);
        r.band2 = ThresholdProfile::uniform(p2.power.dim0(), zc2, xi_db);

        const auto f1 = apply_threshold(p1, r.band1);
        const auto f2 = apply_threshold(p2, r.band2);
        const auto pdp1 = power_delay_profile(f1);
        const auto pdp2 = power_delay_profile(f2);
        r.peaks1 = local_peaks(pdp1.power, zc1);
        r.peaks2 = local_peaks(pdp2.power, zc2);

        // "Same delay" means within one resolution cell of the coarser band.
        const double tol = std::max(p1.band.delay_resolution_s, p2.band.delay_resolution_s);
        r.uncommon1 = uncommon(r.peaks1, p1, r.peaks2, p2, tol);
        r.uncommon2 = uncommon(r.peaks2, p2, r.peaks1, p1, tol);

        std::vector<bool> touched1(p1.power.dim0(), false), touched2(p2.power.dim0(), false);

        struct BandState
        {
            const PowerGrid *grid;
            ThresholdProfile *profile;
            std::vector<bool> *touched;
            std::vector<std::size_t> *raised, *lowered, *conflicts;
            double common;
        };
        BandState s1{&p1, &r.band1, &touched1, &r.raised1, &r.lowered1, &r.conflicts1, zc1};
        BandState s2{&p2, &r.band2, &touched2, &r.raised2, &r.lowered2, &r.conflicts2, zc2};

        auto set = [](BandState &s, std::size_t k, double value, std::vector<std::size_t> &log)
        {
            if ((*s.touched)[k])
            {
                if (s.profile->threshold[k] != value)
                    s.conflicts->push_back(k);
                return;
            }
            (*s.touched)[k] = true;
            s.profile->threshold[k] = value;
            log.push_back(k);
        };

        const std::pair<BandState *, BandState *> order[2] = {{&s1, &s2}, {&s2, &s1}};
        const std::vector<std::size_t> *sets[2] = {&r.uncommon1, &r.uncommon2};
        for (int pass = 0; pass < 2; ++pass)
        {
            BandState &i = *order[pass].first;
            BandState &j = *order[pass].second;
            for (std::size_t ki : *sets[pass])
            {
                const std::size_t kj = nearest_bin(*j.grid, i.grid->delay_axis_s[ki]);
                // Peak over angles of the unfiltered complementary band.
                const double pmax = max_over_angles(*j.grid, kj);
                if (pmax < j.common * down)
                    set(i, ki, i.common * up, *i.raised);
                else
                    set(j, kj, j.common * down, *j.lowered);
            }
        }
        return r;
    }

    NoiseReport make_noise_report(const PowerGrid &power, const NoiseEstimate &est)
    {
        NoiseReport r;
        r.sigma2_db = to_db(est.sigma2);
        r.zeta_common_db = to_db(est.threshold_common);
        r.n_opt = est.n_opt;
        const double peak = power.peak();
        r.dr_db = to_db(peak) - r.sigma2_db;
        r.sfdr_db = to_db(peak) - r.zeta_common_db;
        return r;
    }

    nlohmann::json to_json(const NoiseReport &r)
    {
        return {{"sigma2_db", r.sigma2_db},
                {"zeta_common_db", r.zeta_common_db},
                {"n_opt", r.n_opt},
                {"dr_db", r.dr_db},
                {"sfdr_db", r.sfdr_db},
                {"raised_bins", r.raised_bins},
                {"lowered_bins", r.lowered_bins},
                {"conflict_bins", r.conflict_bins}};
    }
} // namespace canyon
