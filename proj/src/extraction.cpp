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

#include "canyon/kernels.hpp"
#include "canyon/mpc.hpp"

#include <algorithm>
#include <cmath>

namespace canyon
{
    namespace
    {
        std::vector<double> pattern_table(const std::vector<double> &axis, double hpbw)
        {
            const std::size_t n = axis.size();
            std::vector<double> t(n * n);
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b)
                    t[a * n + b] = pattern_gain(axis[b] - axis[a], hpbw);
            return t;
        }

        double slice_max(std::span<const double> s)
        {
            return s.empty() ? 0.0 : *std::max_element(s.begin(), s.end());
        }
    } // namespace

    std::vector<Mpc> extract_mpcs(const PowerGrid &power, const ExtractionOptions &opt)
    {
        std::vector<Mpc> out;
        if (power.power.empty())
            return out;

        const auto &band = power.band;
        const std::size_t nd = power.power.dim0();
        const std::size_t nt = power.power.dim1();
        const std::size_t nr = power.power.dim2();
        const double sigma2 = std::max(0.0, opt.noise_sigma2);
        const double stop_level = sigma2 > 0.0 ? sigma2 * from_db(opt.stop_db) : 0.0;

        const auto gt = pattern_table(power.angles.aod_deg, band.hpbw_az_deg);
        const auto gr = pattern_table(power.angles.aoa_deg, band.hpbw_az_deg);

        const long max_half = static_cast<long>((nd - 1) / 2);
        const auto min_half = static_cast<long>(std::min<double>(
            std::ceil(opt.window_cells * band.oversampling()), static_cast<double>(max_half)));
        std::vector<double> dk(nd); // periodic kernel by bin offset
        double energy = 0.0;
        for (std::size_t k = 0; k < nd; ++k)
        {
            dk[k] = delay_kernel(band, static_cast<double>(k));
            energy += dk[k];
        }
        // Half-window beyond which the kernel envelope 1 / (N_F sin(pi d / n_fft))^2 keeps
        // a replica of this peak under the noise power. Sidelobes under the detection
        // level still cross it once noise adds, so the noise power is the reference.
        const double level = sigma2 > 0.0 ? sigma2 : std::max(0.0, opt.detection_threshold);
        auto half_for = [&](double peak)
        {
            if (!(level > 0.0))
                return min_half;
            const double s = 1.0 / (static_cast<double>(band.n_subcarriers) * std::sqrt(level / peak));
            if (s >= 1.0)
                return max_half;
            const auto need = static_cast<long>(std::ceil(static_cast<double>(band.n_fft) / kPi * std::asin(s)));
            return std::clamp(need, min_half, max_half);
        };

        Tensor3<double> residual = power.power;
        const double floor = std::max(0.0, opt.detection_threshold);
        const bool guard = (opt.guard_sigma > 0.0 && sigma2 > 0.0) || floor > 0.0;
        Tensor3<double> model;
        if (guard)
            model = Tensor3<double>(nd, nt, nr);

        std::vector<double> smax(nd);
        for (std::size_t k = 0; k < nd; ++k)
            smax[k] = slice_max(residual.slice(k));

        // Subtraction round-off on noise-free grids must not read as paths.
        double residue_level = 0.0;
        while (out.size() < opt.max_paths)
        {
            const auto kit = std::max_element(smax.begin(), smax.end());
            const double peak = *kit;
            if (!(peak > stop_level) || !(peak > residue_level))
                break;
            if (out.empty())
                residue_level = peak * 1e-9;
            const auto k0 = static_cast<std::size_t>(kit - smax.begin());
            const auto s = residual.slice(k0);
            const auto flat = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
            const std::size_t t0 = flat / nr;
            const std::size_t r0 = flat % nr;

            Mpc m;
            m.delay_s = power.delay_axis_s[k0];
            m.aod_deg = power.angles.aod_deg[t0];
            m.aoa_deg = power.angles.aoa_deg[r0];
            m.power_db = to_db(peak * energy);
            m.band = opt.band;
            out.push_back(m);

            const long half = half_for(peak);
            for (long d = -half; d <= half; ++d)
            {
                long kk = static_cast<long>(k0) + d;
                kk = ((kk % static_cast<long>(nd)) + static_cast<long>(nd)) % static_cast<long>(nd);
                const auto k = static_cast<std::size_t>(kk);
                const double pd = peak * dk[static_cast<std::size_t>((d + static_cast<long>(nd)) % static_cast<long>(nd))];
                for (std::size_t t = 0; t < nt; ++t)
                {
                    const double pdt = pd * gt[t0 * nt + t];
                    for (std::size_t r = 0; r < nr; ++r)
                    {
                        const double rep = pdt * gr[r0 * nr + r];
                        double &res = residual(k, t, r);
                        res = std::max(0.0, res - rep);
                        if (guard)
                        {
                            double &mod = model(k, t, r);
                            mod += rep;
                            if (res < floor + opt.guard_sigma * std::sqrt(2.0 * mod * sigma2))
                                res = 0.0;
                        }
                    }
                }
                smax[k] = slice_max(residual.slice(k));
            }
            residual(k0, t0, r0) = 0.0;
            smax[k0] = slice_max(residual.slice(k0));
        }
        return out;
    }
} // namespace canyon
