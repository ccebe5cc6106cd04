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

#include "canyon/spectra.hpp"
#include "canyon/units.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace canyon
{
    double PowerGrid::total() const
    {
        return std::accumulate(power.flat().begin(), power.flat().end(), 0.0);
    }

    double PowerGrid::peak() const
    {
        if (power.empty())
            return 0.0;
        return *std::max_element(power.flat().begin(), power.flat().end());
    }

    PowerGrid compute_ddadps(std::span<const CirGrid> snapshots)
    {
        if (snapshots.empty())
            throw std::invalid_argument("compute_ddadps: at least one snapshot is required");
        const auto &first = snapshots.front();
        PowerGrid out;
        out.band = first.band;
        out.angles = first.angles;
        out.delay_axis_s = first.delay_axis_s;
        out.rx_id = first.rx_id;
        out.tx_rx_distance_m = first.tx_rx_distance_m;
        out.power = Tensor3<double>(first.cir.dim0(), first.cir.dim1(), first.cir.dim2());

        for (const auto &snap : snapshots)
        {
            if (!snap.cir.same_shape(first.cir))
                throw std::invalid_argument("compute_ddadps: snapshot shape mismatch");
            for (std::size_t i = 0; i < snap.cir.size(); ++i)
                out.power[i] += std::norm(snap.cir[i]);
        }
        const double inv = 1.0 / static_cast<double>(snapshots.size());
        if (snapshots.size() > 1)
            for (auto &p : out.power.flat())
                p *= inv;
        return out;
    }

    PowerGrid compute_ddadps(const CirGrid &cir)
    {
        return compute_ddadps(std::span<const CirGrid>(&cir, 1));
    }

    Pdp power_delay_profile(const PowerGrid &grid)
    {
        Pdp pdp;
        pdp.delay_s = grid.delay_axis_s;
        pdp.power.resize(grid.power.dim0());
        for (std::size_t k = 0; k < grid.power.dim0(); ++k)
        {
            const auto s = grid.power.slice(k);
            pdp.power[k] = std::accumulate(s.begin(), s.end(), 0.0);
        }
        return pdp;
    }

    Adps azimuth_delay_spectrum(const PowerGrid &grid, Side side)
    {
        const std::size_t nd = grid.power.dim0();
        const std::size_t nt = grid.power.dim1();
        const std::size_t nr = grid.power.dim2();
        Adps a;
        a.side = side;
        a.delay_s = grid.delay_axis_s;
        a.angle_deg = grid.angle_axis(side);
        const std::size_t na = a.angle_deg.size();
        a.power.assign(nd * na, 0.0);
        for (std::size_t k = 0; k < nd; ++k)
            for (std::size_t t = 0; t < nt; ++t)
                for (std::size_t r = 0; r < nr; ++r)
                {
                    const double p = grid.power(k, t, r);
                    a.power[k * na + (side == Side::Tx ? t : r)] += p;
                }
        return a;
    }

    Paps power_angular_profile(const PowerGrid &grid, Side side)
    {
        Paps pap;
        pap.side = side;
        pap.angle_deg = grid.angle_axis(side);
        pap.power.assign(pap.angle_deg.size(), 0.0);
        for (std::size_t k = 0; k < grid.power.dim0(); ++k)
            for (std::size_t t = 0; t < grid.power.dim1(); ++t)
                for (std::size_t r = 0; r < grid.power.dim2(); ++r)
                    pap.power[side == Side::Tx ? t : r] += grid.power(k, t, r);
        return pap;
    }

    Paps power_angular_profile(const Adps &adps)
    {
        Paps pap;
        pap.side = adps.side;
        pap.angle_deg = adps.angle_deg;
        pap.power.assign(adps.angle_deg.size(), 0.0);
        for (std::size_t k = 0; k < adps.delay_s.size(); ++k)
            for (std::size_t a = 0; a < adps.angle_deg.size(); ++a)
                pap.power[a] += adps.at(k, a);
        return pap;
    }

    void write_pdp_csv(std::ostream &out, const Pdp &pdp)
    {
        out << "delay_ns,power_db\n";
        for (std::size_t k = 0; k < pdp.power.size(); ++k)
            out << pdp.delay_s[k] * 1e9 << ',' << to_db(pdp.power[k]) << '\n';
    }

    void write_pap_csv(std::ostream &out, const Paps &pap)
    {
        out << (pap.side == Side::Tx ? "aod_deg" : "aoa_deg") << ",power_db\n";
        for (std::size_t a = 0; a < pap.power.size(); ++a)
            out << pap.angle_deg[a] << ',' << to_db(pap.power[a]) << '\n';
    }

    void write_adps_csv(std::ostream &out, const Adps &adps)
    {
        out << "delay_ns," << (adps.side == Side::Tx ? "aod_deg" : "aoa_deg") << ",power_db\n";
        for (std::size_t k = 0; k < adps.delay_s.size(); ++k)
            for (std::size_t a = 0; a < adps.angle_deg.size(); ++a)
            {
                const double p = adps.at(k, a);
                if (p > 0.0)
                    out << adps.delay_s[k] * 1e9 << ',' << adps.angle_deg[a] << ',' << to_db(p) << '\n';
            }
    }
} // namespace canyon
