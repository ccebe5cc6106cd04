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

#ifndef CANYON_SPECTRA_HPP
#define CANYON_SPECTRA_HPP

#include "canyon/grid.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace canyon
{
    enum class Side
    {
        Tx,
        Rx
    };

    // Double-directional angular delay power spectrum, linear units.
    struct PowerGrid
    {
        BandConfig band;
        AngleGrid angles;
        Tensor3<double> power; // [n_fft][aod][aoa]
        std::vector<double> delay_axis_s;
        bool filtered = false;
        std::string rx_id;
        double tx_rx_distance_m = 0.0;

        double total() const;
        double peak() const;
        const std::vector<double> &angle_axis(Side side) const { return side == Side::Tx ? angles.aod_deg : angles.aoa_deg; }
    };

    struct Pdp
    {
        std::vector<double> delay_s;
        std::vector<double> power;
    };

    struct Paps
    {
        Side side = Side::Tx;
        std::vector<double> angle_deg;
        std::vector<double> power;
    };

    // Row-major [delay][angle] for one side.
    struct Adps
    {
        Side side = Side::Tx;
        std::vector<double> delay_s;
        std::vector<double> angle_deg;
        std::vector<double> power;

        double at(std::size_t delay_idx, std::size_t angle_idx) const { return power[delay_idx * angle_deg.size() + angle_idx]; }
    };

    // Mean of |h|^2 over snapshots of the same shape.
    PowerGrid compute_ddadps(std::span<const CirGrid> snapshots);
    PowerGrid compute_ddadps(const CirGrid &cir);

    Pdp power_delay_profile(const PowerGrid &grid);
    Adps azimuth_delay_spectrum(const PowerGrid &grid, Side side);
    Paps power_angular_profile(const PowerGrid &grid, Side side);
    Paps power_angular_profile(const Adps &adps);

    // Plot-data exporters: delay in ns, angle in degrees, power in dB.
    void write_pdp_csv(std::ostream &out, const Pdp &pdp);
    void write_pap_csv(std::ostream &out, const Paps &pap);
    void write_adps_csv(std::ostream &out, const Adps &adps);
} // namespace canyon

#endif
