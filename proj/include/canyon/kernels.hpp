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

#ifndef CANYON_KERNELS_HPP
#define CANYON_KERNELS_HPP

#include "canyon/grid.hpp"
#include "canyon/units.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace canyon
{
    // Power autocorrelation of the N_F-tone waveform sampled on the n_fft delay grid,
    // normalised to 1 at zero offset. delta_bins may be fractional; the kernel is
    // periodic in n_fft.
    inline double delay_kernel(const BandConfig &band, double delta_bins)
    {
        const double nf = static_cast<double>(band.n_subcarriers);
        const double nfft = static_cast<double>(band.n_fft);
        const double x = kPi * delta_bins / nfft;
        const double den = std::sin(x);
        if (std::abs(den) < 1e-12)
            return 1.0;
        const double r = std::sin(nf * x) / (nf * den);
        return r * r;
    }

    // Gaussian main-lobe power pattern, -3 dB at +-hpbw/2.
    inline double pattern_gain(double offset_deg, double hpbw_deg)
    {
        const double u = wrap_deg(offset_deg) / hpbw_deg;
        return std::exp(-4.0 * std::numbers::ln2 * u * u);
    }

    // Sum of the pattern over a scan axis for a source at angle_deg.
    inline double scan_response(const std::vector<double> &axis, double hpbw_deg, double angle_deg)
    {
        double s = 0.0;
        for (double a : axis)
            s += pattern_gain(a - angle_deg, hpbw_deg);
        return s;
    }

    // Multiplies |h|^2 by this to read the delay-integrated grid power of a path
    // as its path gain.
    inline double path_gain_scale(const BandConfig &band)
    {
        return 1.0 / static_cast<double>(band.n_subcarriers);
    }
} // namespace canyon

#endif
