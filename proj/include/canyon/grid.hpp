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

#ifndef CANYON_GRID_HPP
#define CANYON_GRID_HPP

#include "canyon/tensor.hpp"

#include <complex>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace canyon
{
    // Raised for malformed grids and containers. field() names the offending entry.
    class GridError : public std::runtime_error
    {
    public:
        GridError(std::string field, const std::string &what)
            : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
        const std::string &field() const { return field_; }

    private:
        std::string field_;
    };

    class IoError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Sounding configuration for one band.
    //
    // The N_F measured tones span `bandwidth`; the inverse transform is zero-padded
    // to n_fft points, so the delay axis has n_fft bins of width delay_span / n_fft.
    // delay_resolution (1 / bandwidth) is the physical resolution cell, which is
    // wider than a delay bin whenever n_fft > n_subcarriers.
    struct BandConfig
    {
        std::string name;
        double center_frequency_hz = 0.0;
        double bandwidth_hz = 0.0;
        std::size_t n_subcarriers = 0;
        std::size_t n_fft = 0;
        double delay_resolution_s = 0.0;
        double delay_span_s = 0.0;
        double antenna_gain_tx_dbi = 0.0;
        double antenna_gain_rx_dbi = 0.0;
        double hpbw_az_deg = 9.0;
        double hpbw_el_deg = 8.0;

        double subcarrier_spacing_hz() const { return bandwidth_hz / static_cast<double>(n_subcarriers); }
        double delay_bin_s() const { return delay_span_s / static_cast<double>(n_fft); }
        // Ratio of delay bins per resolution cell.
        double oversampling() const { return static_cast<double>(n_fft) / static_cast<double>(n_subcarriers); }

        void validate() const;

        // Consistent config with derived resolution and span.
        static BandConfig custom(std::string name, double fc_hz, double bandwidth_hz,
                                 std::size_t n_subcarriers, std::size_t n_fft,
                                 double gain_dbi = 26.0, double hpbw_az_deg = 9.0, double hpbw_el_deg = 8.0);

        // "154GHz" or "300GHz" (case-insensitive, "154ghz" accepted).
        static BandConfig preset(const std::string &name);

        bool operator==(const BandConfig &) const = default;
    };

    struct AngleGrid
    {
        std::vector<double> aod_deg;
        std::vector<double> aoa_deg;
        double el_tx_deg = 95.0;
        double el_rx_deg = 85.0;
        // Azimuth convention of the scan angles; carried through containers verbatim.
        std::string reference_frame = "scene-ccw-from-x";

        double aod_step_deg() const;
        double aoa_step_deg() const;

        void validate() const;

        static AngleGrid uniform(double start_deg, double step_deg, std::size_t count);
        // 40 azimuth samples at 9 degree steps on both sides.
        static AngleGrid preset();

        bool operator==(const AngleGrid &) const = default;
    };

    struct MeasurementGrid
    {
        BandConfig band;
        AngleGrid angles;
        Tensor3<std::complex<float>> ctf; // [n_subcarriers][aod][aoa]
        std::string rx_id;
        double tx_rx_distance_m = 0.0;

        void validate() const;
        bool operator==(const MeasurementGrid &) const = default;
    };

    struct CirGrid
    {
        BandConfig band;
        AngleGrid angles;
        Tensor3<std::complex<double>> cir; // [n_fft][aod][aoa]
        std::vector<double> delay_axis_s;
        std::string rx_id;
        double tx_rx_distance_m = 0.0;
    };

    // Baseband tone offsets in Hz of the n_subcarriers measured tones, lowest first.
    std::vector<double> tone_offsets_hz(const BandConfig &band);

    // Per-column unitary inverse DFT of the zero-padded CTF.
    CirGrid ctf_to_cir(const MeasurementGrid &grid);

    // Container directory: meta.json + ctf.bin.
    void save_grid(const MeasurementGrid &grid, const std::filesystem::path &dir);
    MeasurementGrid load_grid(const std::filesystem::path &dir);
} // namespace canyon

#endif
