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

#ifndef CANYON_UNITS_HPP
#define CANYON_UNITS_HPP

#include <cmath>
#include <limits>
#include <numbers>

namespace canyon
{
    inline constexpr double kSpeedOfLight = 299792458.0; // m/s
    inline constexpr double kPi = std::numbers::pi;

    inline double to_db(double linear)
    {
        if (linear <= 0.0)
            return -std::numeric_limits<double>::infinity();
        return 10.0 * std::log10(linear);
    }

    inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

    inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
    inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

    // Wraps an angle difference into [-180, 180).
    inline double wrap_deg(double deg)
    {
        double w = std::fmod(deg + 180.0, 360.0);
        if (w < 0.0)
            w += 360.0;
        return w - 180.0;
    }

    // Maps an azimuth into [0, 360).
    inline double azimuth_deg(double deg)
    {
        double w = std::fmod(deg, 360.0);
        if (w < 0.0)
            w += 360.0;
        return w;
    }
} // namespace canyon

#endif
