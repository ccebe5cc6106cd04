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

#include "canyon/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <mutex>

namespace canyon
{
    namespace
    {
        bool close_ppm(double a, double b, double ppm)
        {
            return std::abs(a - b) <= ppm * 1e-6 * std::max(std::abs(a), std::abs(b));
        }

        std::string lower(std::string s)
        {
            std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c)
                           { return static_cast<char>(std::tolower(c)); });
            return s;
        }

        // FFTW planning is not re-entrant.
        std::mutex &fftw_planner_mutex()
        {
            static std::mutex m;
            return m;
        }

        double uniform_step(const std::vector<double> &a)
        {
            return a.size() < 2 ? 360.0 : a[1] - a[0];
        }

        void validate_axis(const std::vector<double> &a, const std::string &field)
        {
            if (a.empty())
                throw GridError(field, "angle list is empty");
            for (double v : a)
                if (!std::isfinite(v))
                    throw GridError(field, "non-finite angle");
            if (a.size() < 2)
                return;
            const double step = a[1] - a[0];
            for (std::size_t i = 1; i < a.size(); ++i)
            {
                const double d = a[i] - a[i - 1];
                if (d <= 0.0)
                    throw GridError(field, "angles must be strictly increasing");
                if (std::abs(d - step) > 1e-9 * std::max(1.0, std::abs(step)))
                    throw GridError(field, "angles must be uniformly spaced");
            }
            if (a.back() - a.front() >= 360.0)
                throw GridError(field, "angular span must be below 360 degrees");
        }
    } // namespace

    void BandConfig::validate() const
    {
        if (!(center_frequency_hz > 0.0))
            throw GridError("band.center_frequency_hz", "must be positive");
        if (!(bandwidth_hz > 0.0))
            throw GridError("band.bandwidth_hz", "must be positive");
        if (n_subcarriers == 0)
            throw GridError("band.n_subcarriers", "must be positive");
        if (n_fft < n_subcarriers)
            throw GridError("band.n_fft", "must be at least n_subcarriers");
        if (!close_ppm(delay_resolution_s, 1.0 / bandwidth_hz, 1.0))
            throw GridError("band.delay_resolution_s", "must equal 1/bandwidth");
        const double span = static_cast<double>(n_subcarriers) / bandwidth_hz;
        if (!close_ppm(delay_span_s, span, 1.0))
            throw GridError("band.delay_span_s", "must equal n_subcarriers/bandwidth");
        if (!(hpbw_az_deg > 0.0))
            throw GridError("band.hpbw_az_deg", "must be positive");
    }

    BandConfig BandConfig::custom(std::string name, double fc_hz, double bandwidth_hz,
                                  std::size_t n_subcarriers, std::size_t n_fft,
                                  double gain_dbi, double hpbw_az_deg, double hpbw_el_deg)
    {
        BandConfig b;
        b.name = std::move(name);
        b.center_frequency_hz = fc_hz;
        b.bandwidth_hz = bandwidth_hz;
        b.n_subcarriers = n_subcarriers;
        b.n_fft = n_fft;
        b.delay_resolution_s = 1.0 / bandwidth_hz;
        b.delay_span_s = static_cast<double>(n_subcarriers) / bandwidth_hz;
        b.antenna_gain_tx_dbi = gain_dbi;
        b.antenna_gain_rx_dbi = gain_dbi;
        b.hpbw_az_deg = hpbw_az_deg;
        b.hpbw_el_deg = hpbw_el_deg;
        b.validate();
        return b;
    }

    BandConfig BandConfig::preset(const std::string &name)
    {
        const auto key = lower(name);
        BandConfig b;
        if (key == "154ghz")
        {
            b.name = "154GHz";
            b.center_frequency_hz = 154e9;
            b.bandwidth_hz = 4e9;
            b.n_subcarriers = 2560;
            b.delay_resolution_s = 250e-12;
            b.antenna_gain_tx_dbi = b.antenna_gain_rx_dbi = 26.4;
        }
        else if (key == "300ghz")
        {
            b.name = "300GHz";
            b.center_frequency_hz = 300e9;
            b.bandwidth_hz = 8e9;
            b.n_subcarriers = 5120;
            b.delay_resolution_s = 125e-12;
            b.antenna_gain_tx_dbi = b.antenna_gain_rx_dbi = 25.8;
        }
        else
        {
            throw GridError("band", "unknown band preset '" + name + "'");
        }
        b.n_fft = 10240;
        b.delay_span_s = 640e-9;
        b.hpbw_az_deg = 9.0;
        b.hpbw_el_deg = 8.0;
        b.validate();
        return b;
    }

    double AngleGrid::aod_step_deg() const { return uniform_step(aod_deg); }
    double AngleGrid::aoa_step_deg() const { return uniform_step(aoa_deg); }

    void AngleGrid::validate() const
    {
        validate_axis(aod_deg, "angles.aod_deg");
        validate_axis(aoa_deg, "angles.aoa_deg");
    }

    AngleGrid AngleGrid::uniform(double start_deg, double step_deg, std::size_t count)
    {
        AngleGrid g;
        g.aod_deg.resize(count);
        for (std::size_t i = 0; i < count; ++i)
            g.aod_deg[i] = start_deg + step_deg * static_cast<double>(i);
        g.aoa_deg = g.aod_deg;
        return g;
    }

    AngleGrid AngleGrid::preset() { return uniform(0.0, 9.0, 40); }

    void MeasurementGrid::validate() const
    {
        band.validate();
        angles.validate();
        if (ctf.dim0() != band.n_subcarriers)
            throw GridError("ctf", "frequency dimension does not match band.n_subcarriers");
        if (ctf.dim1() != angles.aod_deg.size() || ctf.dim2() != angles.aoa_deg.size())
            throw GridError("ctf", "angle dimensions do not match the angle grid");
        for (const auto &v : ctf.flat())
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw GridError("ctf", "non-finite entry");
        if (!(tx_rx_distance_m >= 0.0) || !std::isfinite(tx_rx_distance_m))
            throw GridError("distance_m", "must be finite and non-negative");
    }

    std::vector<double> tone_offsets_hz(const BandConfig &band)
    {
        const auto nf = static_cast<long>(band.n_subcarriers);
        const double df = band.subcarrier_spacing_hz();
        std::vector<double> f(band.n_subcarriers);
        for (long m = 0; m < nf; ++m)
            f[static_cast<std::size_t>(m)] = static_cast<double>(m - nf / 2) * df;
        return f;
    }

    CirGrid ctf_to_cir(const MeasurementGrid &grid)
    {
        grid.validate();
        const auto &band = grid.band;
        const std::size_t n_fft = band.n_fft;
        const std::size_t n_tone = band.n_subcarriers;
        const std::size_t cols = grid.ctf.slice_size();

        CirGrid out;
        out.band = band;
        out.angles = grid.angles;
        out.rx_id = grid.rx_id;
        out.tx_rx_distance_m = grid.tx_rx_distance_m;
        out.cir = Tensor3<std::complex<double>>(n_fft, grid.ctf.dim1(), grid.ctf.dim2());
        out.delay_axis_s.resize(n_fft);
        for (std::size_t k = 0; k < n_fft; ++k)
            out.delay_axis_s[k] = static_cast<double>(k) * band.delay_bin_s();

        // Baseband-centred tones: negative offsets wrap to the top of the buffer,
        // the zero padding sits at the band edges.
        const long half = static_cast<long>(n_tone) / 2;
        for (std::size_t m = 0; m < n_tone; ++m)
        {
            long idx = static_cast<long>(m) - half;
            if (idx < 0)
                idx += static_cast<long>(n_fft);
            auto dst = out.cir.slice(static_cast<std::size_t>(idx));
            auto src = grid.ctf.slice(m);
            for (std::size_t c = 0; c < cols; ++c)
                dst[c] = std::complex<double>(src[c].real(), src[c].imag());
        }

        auto *buf = reinterpret_cast<fftw_complex *>(out.cir.data());
        const int n = static_cast<int>(n_fft);
        fftw_plan plan;
        {
            std::lock_guard<std::mutex> lock(fftw_planner_mutex());
            plan = fftw_plan_many_dft(1, &n, static_cast<int>(cols),
                                      buf, nullptr, static_cast<int>(cols), 1,
                                      buf, nullptr, static_cast<int>(cols), 1,
                                      FFTW_BACKWARD, FFTW_ESTIMATE);
        }
        fftw_execute(plan);
        {
            std::lock_guard<std::mutex> lock(fftw_planner_mutex());
            fftw_destroy_plan(plan);
        }

        const double norm = 1.0 / std::sqrt(static_cast<double>(n_fft));
        for (auto &v : out.cir.flat())
            v *= norm;
        return out;
    }
} // namespace canyon
