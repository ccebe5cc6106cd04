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

#include "canyon/mpc.hpp"
#include "canyon/units.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace canyon
{
    namespace
    {
        struct Unit
        {
            double x = 1.0, y = 0.0;
        };

        Unit unit_of(double deg)
        {
            const double r = deg_to_rad(deg);
            return {std::cos(r), std::sin(r)};
        }

        // Squared half-chord between two azimuths.
        double half_chord2(double a_deg, double b_deg)
        {
            const Unit a = unit_of(a_deg), b = unit_of(b_deg);
            const double dx = a.x - b.x, dy = a.y - b.y;
            return 0.25 * (dx * dx + dy * dy);
        }

        Centroid centroid_of(const Mpc &m) { return {m.delay_s, m.aod_deg, m.aoa_deg}; }

        double band_sum_db(const std::vector<Mpc> &mpcs, BandTag band, auto &&pred, double f2_unscale_db)
        {
            double lin = 0.0;
            for (const auto &m : mpcs)
                if (m.band == band && pred(m))
                    lin += from_db(band == BandTag::F2 ? m.power_db - f2_unscale_db : m.power_db);
            return to_db(lin);
        }
    } // namespace

    std::string to_string(BandTag b)
    {
        switch (b)
        {
        case BandTag::F1:
            return "f1";
        case BandTag::F2:
            return "f2";
        default:
            return "";
        }
    }

    BandTag band_tag_from_string(const std::string &s)
    {
        if (s == "f1")
            return BandTag::F1;
        if (s == "f2")
            return BandTag::F2;
        return BandTag::Unset;
    }

    std::vector<Mpc> merge_bands(const std::vector<Mpc> &f1, const std::vector<Mpc> &f2, double scale_db)
    {
        std::vector<Mpc> out;
        out.reserve(f1.size() + f2.size());
        for (const auto &m : f1)
        {
            if (m.band != BandTag::F1)
                throw std::invalid_argument("merge_bands: f1 list contains an MPC not tagged f1");
            out.push_back(m);
        }
        for (auto m : f2)
        {
            if (m.band != BandTag::F2)
                throw std::invalid_argument("merge_bands: f2 list contains an MPC not tagged f2");
            m.power_db += scale_db;
            out.push_back(m);
        }
        return out;
    }

    double mcd_delay_scale(const std::vector<Mpc> &mpcs, double delay_weight)
    {
        if (mpcs.size() < 2)
            return 0.0;
        double wsum = 0.0, mean = 0.0;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto &m : mpcs)
        {
            const double w = from_db(m.power_db);
            wsum += w;
            mean += w * m.delay_s;
            lo = std::min(lo, m.delay_s);
            hi = std::max(hi, m.delay_s);
        }
        const double span = hi - lo;
        if (!(span > 0.0) || !(wsum > 0.0))
            return 0.0;
        mean /= wsum;
        double var = 0.0;
        for (const auto &m : mpcs)
            var += from_db(m.power_db) * (m.delay_s - mean) * (m.delay_s - mean);
        const double std_dev = std::sqrt(var / wsum);
        return delay_weight * std_dev / (span * span);
    }

    double mcd_squared(const Mpc &a, const Centroid &c, double delay_scale)
    {
        const double dt = delay_scale * (a.delay_s - c.delay_s);
        return half_chord2(a.aod_deg, c.aod_deg) + half_chord2(a.aoa_deg, c.aoa_deg) + dt * dt;
    }

    ClusterSet cluster_kpm(const std::vector<Mpc> &merged, int k, std::uint64_t seed, const KpmOptions &opt)
    {
        const std::size_t n = merged.size();
        if (k < 1)
            throw std::invalid_argument("cluster_kpm: k must be at least 1");
        if (static_cast<std::size_t>(k) > n)
            throw std::invalid_argument("cluster_kpm: k exceeds the number of MPCs");

        const auto kk = static_cast<std::size_t>(k);
        const double scale = mcd_delay_scale(merged, opt.delay_weight);
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i)
            w[i] = from_db(merged[i].power_db);

        // Farthest-point seeding from a seeded start.
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<Centroid> cent;
        std::vector<bool> used(n, false);
        std::size_t first = pick(rng);
        cent.push_back(centroid_of(merged[first]));
        used[first] = true;
        std::vector<double> dmin(n);
        for (std::size_t i = 0; i < n; ++i)
            dmin[i] = mcd_squared(merged[i], cent[0], scale);
        while (cent.size() < kk)
        {
            std::size_t best = n;
            for (std::size_t i = 0; i < n; ++i)
                if (!used[i] && (best == n || dmin[i] > dmin[best]))
                    best = i;
            used[best] = true;
            cent.push_back(centroid_of(merged[best]));
            for (std::size_t i = 0; i < n; ++i)
                dmin[i] = std::min(dmin[i], mcd_squared(merged[i], cent.back(), scale));
        }

        ClusterSet cs;
        cs.k = k;
        cs.f2_scaled = true;
        std::vector<std::size_t> label(n, kk), prev(n, kk + 1);

        auto objective = [&]
        {
            double obj = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                obj += w[i] * mcd_squared(merged[i], cent[label[i]], scale);
            return obj;
        };

        for (std::size_t iter = 0; iter < opt.max_iterations; ++iter)
        {
            for (std::size_t i = 0; i < n; ++i)
            {
                double bd = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < kk; ++c)
                {
                    const double d = mcd_squared(merged[i], cent[c], scale);
                    if (d < bd)
                    {
                        bd = d;
                        label[i] = c;
                    }
                }
            }

            // An empty cluster takes over the costliest MPC of a multi-member cluster.
            std::vector<std::size_t> count(kk, 0);
            for (auto l : label)
                ++count[l];
            for (std::size_t c = 0; c < kk; ++c)
            {
                if (count[c] > 0)
                    continue;
                std::size_t worst = n;
                double wc = -1.0;
                for (std::size_t i = 0; i < n; ++i)
                {
                    if (count[label[i]] < 2)
                        continue;
                    const double cost = w[i] * mcd_squared(merged[i], cent[label[i]], scale);
                    if (cost > wc)
                    {
                        wc = cost;
                        worst = i;
                    }
                }
                if (worst == n)
                    continue;
                --count[label[worst]];
                label[worst] = c;
                count[c] = 1;
                cent[c] = centroid_of(merged[worst]);
            }

            cs.objective_history.push_back(objective());
            if (label == prev)
                break;
            prev = label;

            // Power-weighted centroid update; azimuths via the normalised mean resultant.
            for (std::size_t c = 0; c < kk; ++c)
            {
                double ws = 0.0, td = 0.0, tx = 0.0, ty = 0.0, rx = 0.0, ry = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                {
                    if (label[i] != c)
                        continue;
                    const Unit ut = unit_of(merged[i].aod_deg), ur = unit_of(merged[i].aoa_deg);
                    ws += w[i];
                    td += w[i] * merged[i].delay_s;
                    tx += w[i] * ut.x;
                    ty += w[i] * ut.y;
                    rx += w[i] * ur.x;
                    ry += w[i] * ur.y;
                }
                if (!(ws > 0.0))
                    continue;
                cent[c].delay_s = td / ws;
                if (std::hypot(tx, ty) > 1e-15 * ws)
                    cent[c].aod_deg = azimuth_deg(rad_to_deg(std::atan2(ty, tx)));
                if (std::hypot(rx, ry) > 1e-15 * ws)
                    cent[c].aoa_deg = azimuth_deg(rad_to_deg(std::atan2(ry, rx)));
            }
            cs.objective_history.push_back(objective());
        }

        // Relabel: LoS (minimum-delay MPC) cluster first, others by centroid delay.
        std::size_t los_mpc = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (merged[i].delay_s < merged[los_mpc].delay_s ||
                (merged[i].delay_s == merged[los_mpc].delay_s && merged[i].power_db > merged[los_mpc].power_db))
                los_mpc = i;
        std::vector<std::size_t> order(kk);
        std::iota(order.begin(), order.end(), 0);
        const std::size_t los_c = label[los_mpc];
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b)
                         {
                             if ((a == los_c) != (b == los_c))
                                 return a == los_c;
                             return cent[a].delay_s < cent[b].delay_s; });
        std::vector<int> new_id(kk);
        for (std::size_t pos = 0; pos < kk; ++pos)
            new_id[order[pos]] = static_cast<int>(pos + 1);

        cs.mpcs = merged;
        cs.centroids.resize(kk);
        cs.common_flags.assign(kk, false);
        std::vector<bool> has1(kk, false), has2(kk, false);
        for (std::size_t i = 0; i < n; ++i)
        {
            const int id = new_id[label[i]];
            cs.mpcs[i].cluster_id = id;
            (merged[i].band == BandTag::F2 ? has2 : has1)[static_cast<std::size_t>(id - 1)] = true;
        }
        for (std::size_t c = 0; c < kk; ++c)
            cs.centroids[static_cast<std::size_t>(new_id[c] - 1)] = cent[c];
        for (std::size_t c = 0; c < kk; ++c)
            cs.common_flags[c] = has1[c] && has2[c];
        return cs;
    }

    std::pair<ClusterSet, ClusterSet> split_bands(const ClusterSet &cs)
    {
        ClusterSet a = cs, b = cs;
        a.mpcs.clear();
        b.mpcs.clear();
        a.f2_scaled = b.f2_scaled = false;
        for (auto m : cs.mpcs)
        {
            if (m.band == BandTag::F2)
            {
                if (cs.f2_scaled)
                    m.power_db -= cs.scale_db;
                b.mpcs.push_back(m);
            }
            else
            {
                a.mpcs.push_back(m);
            }
        }
        return {a, b};
    }

    ClusterReport cluster_stats(const ClusterSet &cs, std::optional<double> expected_los_delay_s, double tol_s)
    {
        ClusterReport r;
        r.k = cs.k;
        const double unscale = cs.f2_scaled ? cs.scale_db : 0.0;
        std::vector<bool> has1(static_cast<std::size_t>(cs.k), false), has2(static_cast<std::size_t>(cs.k), false);
        for (const auto &m : cs.mpcs)
        {
            if (!m.cluster_id)
                throw std::invalid_argument("cluster_stats: unlabeled MPC");
            (m.band == BandTag::F2 ? has2 : has1)[static_cast<std::size_t>(*m.cluster_id - 1)] = true;
        }
        for (int c = 0; c < cs.k; ++c)
        {
            r.count_f1 += has1[static_cast<std::size_t>(c)] ? 1 : 0;
            r.count_f2 += has2[static_cast<std::size_t>(c)] ? 1 : 0;
            if (has1[static_cast<std::size_t>(c)] && has2[static_cast<std::size_t>(c)])
                r.common_cluster_ids.push_back(c + 1);
        }

        auto in_los = [](const Mpc &m)
        { return *m.cluster_id == 1; };
        auto not_los = [](const Mpc &m)
        { return *m.cluster_id != 1; };
        r.los_pg_f1_db = band_sum_db(cs.mpcs, BandTag::F1, in_los, unscale);
        r.los_pg_f2_db = band_sum_db(cs.mpcs, BandTag::F2, in_los, unscale);
        r.nlos_sum_pg_f1_db = band_sum_db(cs.mpcs, BandTag::F1, not_los, unscale);
        r.nlos_sum_pg_f2_db = band_sum_db(cs.mpcs, BandTag::F2, not_los, unscale);

        for (int id : r.common_cluster_ids)
        {
            if (id == 1)
                continue;
            auto in_c = [id](const Mpc &m)
            { return *m.cluster_id == id; };
            RelativeClusterPower rel;
            rel.cluster_id = id;
            rel.rel_f1_db = band_sum_db(cs.mpcs, BandTag::F1, in_c, unscale) - r.los_pg_f1_db;
            rel.rel_f2_db = band_sum_db(cs.mpcs, BandTag::F2, in_c, unscale) - r.los_pg_f2_db;
            rel.diff_db = rel.rel_f1_db - rel.rel_f2_db;
            r.relative.push_back(rel);
        }

        if (expected_los_delay_s)
        {
            double first = std::numeric_limits<double>::infinity();
            for (const auto &m : cs.mpcs)
                if (*m.cluster_id == 1)
                    first = std::min(first, m.delay_s);
            r.los_geometry_consistent = std::abs(first - *expected_los_delay_s) <= tol_s;
        }
        return r;
    }

    nlohmann::json to_json(const ClusterReport &r)
    {
        auto db = [](double v) -> nlohmann::json
        { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
        nlohmann::json rel = nlohmann::json::array();
        for (const auto &x : r.relative)
            rel.push_back({{"cluster_id", x.cluster_id}, {"rel_f1_db", db(x.rel_f1_db)}, {"rel_f2_db", db(x.rel_f2_db)}, {"diff_db", db(x.diff_db)}});
        nlohmann::json j = {{"k", r.k},
                            {"per_band_counts", {{"f1", r.count_f1}, {"f2", r.count_f2}}},
                            {"los_cluster_id", r.los_cluster_id},
                            {"los_pg_db", {{"f1", db(r.los_pg_f1_db)}, {"f2", db(r.los_pg_f2_db)}}},
                            {"nlos_sum_pg_db", {{"f1", db(r.nlos_sum_pg_f1_db)}, {"f2", db(r.nlos_sum_pg_f2_db)}}},
                            {"common_cluster_ids", r.common_cluster_ids},
                            {"relative_power", rel}};
        if (r.los_geometry_consistent)
            j["los_geometry_consistent"] = *r.los_geometry_consistent;
        return j;
    }
} // namespace canyon
