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

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace canyon
{
    namespace
    {
        using nlohmann::json;
        namespace fs = std::filesystem;

        constexpr const char *kFormat = "canyon-grid";
        constexpr int kVersion = 1;

        static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

        template <typename T>
        T get_field(const json &j, const char *key, const std::string &path)
        {
            if (!j.is_object() || !j.contains(key))
                throw GridError(path + key, "missing");
            try
            {
                return j.at(key).get<T>();
            }
            catch (const json::exception &)
            {
                throw GridError(path + key, "wrong type");
            }
        }

        std::uint32_t to_le(std::uint32_t v)
        {
            if constexpr (std::endian::native == std::endian::big)
                return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
            return v;
        }

        json band_to_json(const BandConfig &b)
        {
            return {{"name", b.name},
                    {"center_frequency_hz", b.center_frequency_hz},
                    {"bandwidth_hz", b.bandwidth_hz},
                    {"n_subcarriers", b.n_subcarriers},
                    {"n_fft", b.n_fft},
                    {"delay_resolution_s", b.delay_resolution_s},
                    {"delay_span_s", b.delay_span_s},
                    {"antenna_gain_tx_dbi", b.antenna_gain_tx_dbi},
                    {"antenna_gain_rx_dbi", b.antenna_gain_rx_dbi},
                    {"hpbw_az_deg", b.hpbw_az_deg},
                    {"hpbw_el_deg", b.hpbw_el_deg}};
        }

        BandConfig band_from_json(const json &j)
        {
            const std::string p = "band.";
            BandConfig b;
            b.name = get_field<std::string>(j, "name", p);
            b.center_frequency_hz = get_field<double>(j, "center_frequency_hz", p);
            b.bandwidth_hz = get_field<double>(j, "bandwidth_hz", p);
            b.n_subcarriers = get_field<std::size_t>(j, "n_subcarriers", p);
            b.n_fft = get_field<std::size_t>(j, "n_fft", p);
            b.delay_resolution_s = get_field<double>(j, "delay_resolution_s", p);
            b.delay_span_s = get_field<double>(j, "delay_span_s", p);
            b.antenna_gain_tx_dbi = get_field<double>(j, "antenna_gain_tx_dbi", p);
            b.antenna_gain_rx_dbi = get_field<double>(j, "antenna_gain_rx_dbi", p);
            b.hpbw_az_deg = get_field<double>(j, "hpbw_az_deg", p);
            b.hpbw_el_deg = get_field<double>(j, "hpbw_el_deg", p);
            return b;
        }

        json angles_to_json(const AngleGrid &a)
        {
            return {{"aod_deg", a.aod_deg},
                    {"aoa_deg", a.aoa_deg},
                    {"el_tx_deg", a.el_tx_deg},
                    {"el_rx_deg", a.el_rx_deg},
                    {"reference_frame", a.reference_frame}};
        }

        AngleGrid angles_from_json(const json &j)
        {
            const std::string p = "angles.";
            AngleGrid a;
            a.aod_deg = get_field<std::vector<double>>(j, "aod_deg", p);
            a.aoa_deg = get_field<std::vector<double>>(j, "aoa_deg", p);
            a.el_tx_deg = get_field<double>(j, "el_tx_deg", p);
            a.el_rx_deg = get_field<double>(j, "el_rx_deg", p);
            a.reference_frame = get_field<std::string>(j, "reference_frame", p);
            return a;
        }
    } // namespace

    void save_grid(const MeasurementGrid &grid, const fs::path &dir)
    {
        grid.validate();

        json meta = {{"format", kFormat},
                     {"version", kVersion},
                     {"band", band_to_json(grid.band)},
                     {"angles", angles_to_json(grid.angles)},
                     {"rx_id", grid.rx_id},
                     {"distance_m", grid.tx_rx_distance_m},
                     {"layout", {{"order", {"freq", "aod", "aoa"}}, {"shape", {grid.ctf.dim0(), grid.ctf.dim1(), grid.ctf.dim2()}}, {"element", "complex64-interleaved"}}},
                     {"endianness", "little"},
                     {"fourier_convention", "unitary"}};

        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec)
            throw IoError("cannot create container directory " + dir.string() + ": " + ec.message());

        {
            std::ofstream out(dir / "meta.json");
            if (!out)
                throw IoError("cannot write " + (dir / "meta.json").string());
            out << meta.dump(2) << '\n';
            if (!out)
                throw IoError("write failed for " + (dir / "meta.json").string());
        }

        std::vector<std::uint32_t> words(grid.ctf.size() * 2);
        for (std::size_t i = 0; i < grid.ctf.size(); ++i)
        {
            words[2 * i] = to_le(std::bit_cast<std::uint32_t>(grid.ctf[i].real()));
            words[2 * i + 1] = to_le(std::bit_cast<std::uint32_t>(grid.ctf[i].imag()));
        }
        std::ofstream bin(dir / "ctf.bin", std::ios::binary);
        if (!bin)
            throw IoError("cannot write " + (dir / "ctf.bin").string());
        bin.write(reinterpret_cast<const char *>(words.data()), static_cast<std::streamsize>(words.size() * 4));
        if (!bin)
            throw IoError("write failed for " + (dir / "ctf.bin").string());
    }

    MeasurementGrid load_grid(const fs::path &dir)
    {
        const auto meta_path = dir / "meta.json";
        std::ifstream in(meta_path);
        if (!in)
            throw GridError("meta.json", "missing or unreadable");
        json meta;
        try
        {
            meta = json::parse(in);
        }
        catch (const json::parse_error &e)
        {
            throw GridError("meta.json", std::string("corrupt: ") + e.what());
        }

        if (get_field<std::string>(meta, "format", "") != kFormat)
            throw GridError("format", "not a canyon-grid container");
        if (get_field<int>(meta, "version", "") != kVersion)
            throw GridError("version", "unsupported container version");
        if (get_field<std::string>(meta, "endianness", "") != "little")
            throw GridError("endianness", "only little-endian payloads are supported");
        if (get_field<std::string>(meta, "fourier_convention", "") != "unitary")
            throw GridError("fourier_convention", "only the unitary convention is supported");

        MeasurementGrid g;
        g.band = band_from_json(get_field<json>(meta, "band", ""));
        g.angles = angles_from_json(get_field<json>(meta, "angles", ""));
        g.rx_id = get_field<std::string>(meta, "rx_id", "");
        g.tx_rx_distance_m = get_field<double>(meta, "distance_m", "");

        const auto layout = get_field<json>(meta, "layout", "");
        const auto shape = get_field<std::vector<std::size_t>>(layout, "shape", "layout.");
        if (get_field<std::string>(layout, "element", "layout.") != "complex64-interleaved")
            throw GridError("layout.element", "unsupported element type");
        if (get_field<std::vector<std::string>>(layout, "order", "layout.") != std::vector<std::string>{"freq", "aod", "aoa"})
            throw GridError("layout.order", "unsupported axis order");
        if (shape.size() != 3)
            throw GridError("layout.shape", "must have three dimensions");
        if (shape[0] != g.band.n_subcarriers || shape[1] != g.angles.aod_deg.size() || shape[2] != g.angles.aoa_deg.size())
            throw GridError("layout.shape", "disagrees with band/angles metadata");

        g.band.validate();
        g.angles.validate();

        const std::size_t n = shape[0] * shape[1] * shape[2];
        const auto bin_path = dir / "ctf.bin";
        std::ifstream bin(bin_path, std::ios::binary | std::ios::ate);
        if (!bin)
            throw GridError("ctf.bin", "missing or unreadable");
        const auto bytes = static_cast<std::size_t>(bin.tellg());
        if (bytes != n * 8)
            throw GridError("ctf.bin", "payload length mismatch (expected " + std::to_string(n * 8) + " bytes, found " + std::to_string(bytes) + ")");
        bin.seekg(0);
        std::vector<std::uint32_t> words(n * 2);
        bin.read(reinterpret_cast<char *>(words.data()), static_cast<std::streamsize>(bytes));
        if (!bin)
            throw GridError("ctf.bin", "read failed");

        g.ctf = Tensor3<std::complex<float>>(shape[0], shape[1], shape[2]);
        for (std::size_t i = 0; i < n; ++i)
        {
            const float re = std::bit_cast<float>(to_le(words[2 * i]));
            const float im = std::bit_cast<float>(to_le(words[2 * i + 1]));
            if (!std::isfinite(re) || !std::isfinite(im))
                throw GridError("ctf", "non-finite entry at flat index " + std::to_string(i));
            g.ctf[i] = {re, im};
        }
        g.validate();
        return g;
    }
} // namespace canyon
