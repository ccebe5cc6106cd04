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

#include <doctest.h>

#include <numeric>
#include <random>
#include <sstream>

using namespace canyon;

namespace
{
    CirGrid zero_cir(std::size_t nd, std::size_t na, std::size_t nb)
    {
        CirGrid c;
        c.band = BandConfig::custom("t", 100e9, 1e9, nd, nd);
        c.angles.aod_deg = AngleGrid::uniform(0.0, 10.0, na).aod_deg;
        c.angles.aoa_deg = AngleGrid::uniform(0.0, 10.0, nb).aoa_deg;
        c.cir = Tensor3<std::complex<double>>(nd, na, nb);
        for (std::size_t k = 0; k < nd; ++k)
            c.delay_axis_s.push_back(static_cast<double>(k) * c.band.delay_bin_s());
        return c;
    }

    PowerGrid random_power(std::uint64_t seed)
    {
        auto c = zero_cir(16, 5, 7);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> n;
        for (auto &v : c.cir.flat())
            v = {n(rng), n(rng)};
        return compute_ddadps(c);
    }

    double sum(const std::vector<double> &v) { return std::accumulate(v.begin(), v.end(), 0.0); }
} // namespace

TEST_CASE("ddadps is |h|^2 averaged over snapshots")
{
    auto a = zero_cir(4, 2, 2);
    a.cir(1, 0, 1) = {3.0, 4.0};
    CHECK(compute_ddadps(a).power(1, 0, 1) == 25.0);

    auto b = a;
    a.cir(2, 1, 1) = {std::sqrt(2.0), 0.0};
    b.cir(2, 1, 1) = {0.0, 2.0};
    const std::vector<CirGrid> snaps{a, b};
    CHECK(compute_ddadps(snaps).power(2, 1, 1) == doctest::Approx(3.0));

    const auto z = compute_ddadps(zero_cir(4, 2, 2));
    CHECK(z.total() == 0.0);

    const std::vector<CirGrid> bad{zero_cir(4, 2, 2), zero_cir(4, 2, 3)};
    CHECK_THROWS(compute_ddadps(bad));
}

TEST_CASE("marginals of a single bin")
{
    auto c = zero_cir(8, 3, 8);
    c.cir(5, 2, 7) = {2.0, 0.0};
    const auto p = compute_ddadps(c);
    const auto pdp = power_delay_profile(p);
    for (std::size_t k = 0; k < 8; ++k)
        CHECK(pdp.power[k] == (k == 5 ? 4.0 : 0.0));
    const auto pt = power_angular_profile(p, Side::Tx);
    const auto pr = power_angular_profile(p, Side::Rx);
    CHECK(pt.power[2] == 4.0);
    CHECK(pr.power[7] == 4.0);
}

TEST_CASE("uniform grid marginal counts the angle cells")
{
    auto c = zero_cir(4, 3, 5);
    for (auto &v : c.cir.flat())
        v = {1.0, 0.0};
    const auto pdp = power_delay_profile(compute_ddadps(c));
    for (double v : pdp.power)
        CHECK(v == 15.0);
}

TEST_CASE("every marginal conserves the grid total")
{
    for (std::uint64_t s = 0; s < 5; ++s)
    {
        const auto p = random_power(s);
        double brute = 0.0;
        for (double v : p.power.flat())
            brute += v;
        const double tol = 1e-9 * brute;
        CHECK(std::abs(p.total() - brute) < tol);
        CHECK(std::abs(sum(power_delay_profile(p).power) - brute) < tol);
        for (Side side : {Side::Tx, Side::Rx})
        {
            CHECK(std::abs(sum(power_angular_profile(p, side).power) - brute) < tol);
            const auto adps = azimuth_delay_spectrum(p, side);
            CHECK(std::abs(sum(adps.power) - brute) < tol);
            CHECK(std::abs(sum(power_angular_profile(adps).power) - brute) < tol);
        }
    }
}

TEST_CASE("adps entry is the sum over the other side")
{
    const auto p = random_power(9);
    const auto a = azimuth_delay_spectrum(p, Side::Rx);
    double s = 0.0;
    for (std::size_t i = 0; i < p.power.dim1(); ++i)
        s += p.power(3, i, 4);
    CHECK(a.at(3, 4) == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("csv exporters write one row per sample")
{
    const auto p = random_power(1);
    std::ostringstream os;
    write_pdp_csv(os, power_delay_profile(p));
    std::size_t lines = 0;
    for (char ch : os.str())
        lines += ch == '\n';
    CHECK(lines == 17); // header + 16 delay bins
}
