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

#ifndef CANYON_GEOMETRY_HPP
#define CANYON_GEOMETRY_HPP

#include "canyon/grid.hpp"

#include <json.hpp>

#include <complex>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace canyon
{
    struct Point2
    {
        double x = 0.0;
        double y = 0.0;

        bool operator==(const Point2 &) const = default;
    };

    struct Segment
    {
        Point2 a, b;
    };

    struct Terminal
    {
        Point2 pos;
        double height_m = 0.0;
    };

    enum class Wall
    {
        North,
        South
    };

    enum class PathKind
    {
        LoS,
        SbNw,
        SbSw,
        DbSwNw,
        Random
    };

    std::string to_string(PathKind k);
    PathKind path_kind_from_string(const std::string &s);

    enum class Polarization
    {
        TE, // E perpendicular to the plane of incidence
        TM
    };

    // Simplified 2D street canyon: two wall lines, Tx/Rx between them.
    struct GeometryScene
    {
        Segment wall_north;
        Segment wall_south;
        Terminal tx;
        Terminal rx;
        // Complex relative permittivity (loss as negative imaginary part) per band name.
        std::map<std::string, std::complex<double>> eps_north;
        std::map<std::string, std::complex<double>> eps_south;

        void validate() const;
        std::complex<double> permittivity(Wall wall, const std::string &band_name) const;
        const Segment &wall(Wall w) const { return w == Wall::North ? wall_north : wall_south; }

        // Walls along x at y = +-width/2 from x = -20 m to 140 m, Tx at (0, -3) 3 m high,
        // Rx 1.2 m high at (rx_x, rx_y). Layout is approximate, not the surveyed site.
        static GeometryScene street_canyon(double rx_x, double rx_y = -6.0, double width_m = 22.0);
    };

    // Concrete permittivities: 6.08 - j0.153 at 154 GHz, 5.24 - j0.38 at 300 GHz.
    std::map<std::string, std::complex<double>> concrete_permittivity();

    struct RayPath
    {
        PathKind kind = PathKind::LoS;
        double length_m = 0.0;
        double delay_s = 0.0;
        double aod_deg = 0.0;
        double aoa_deg = 0.0;
        double gain_db = 0.0;
        std::vector<Point2> bounce_points;
        std::vector<double> incidence_deg;
    };

    struct TraceOrders
    {
        bool los = true;
        bool single_bounce = true;
        bool double_bounce = false; // SW then NW
    };

    // Free-space path loss in dB.
    double fspl_db(double distance_m, double frequency_hz);

    std::complex<double> fresnel_reflection(std::complex<double> eps, double incidence_deg, Polarization pol);

    // Mirror image of p across the infinite line through seg.
    Point2 mirror(const Point2 &p, const Segment &seg);

    // Image-method trace. Paths whose reflection point falls off a wall segment are omitted.
    std::vector<RayPath> trace(const GeometryScene &scene, const BandConfig &band, const TraceOrders &orders = {});

    // Horizontal Tx-Rx distance folded with the height difference.
    double los_distance_m(const GeometryScene &scene);

    struct ReceiverPoint
    {
        std::string id;
        Terminal terminal;
    };

    struct SceneDescription
    {
        GeometryScene scene; // rx set to the first receiver
        std::vector<ReceiverPoint> receivers;

        GeometryScene at(std::size_t i) const;
    };

    SceneDescription scene_from_json(const nlohmann::json &j);
    nlohmann::json scene_to_json(const SceneDescription &d);
    SceneDescription load_scene(const std::filesystem::path &path);
} // namespace canyon

#endif
