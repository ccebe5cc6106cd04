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

#include "canyon/geometry.hpp"
#include "canyon/units.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace canyon
{
    namespace
    {
        Point2 operator-(const Point2 &a, const Point2 &b) { return {a.x - b.x, a.y - b.y}; }
        Point2 operator+(const Point2 &a, const Point2 &b) { return {a.x + b.x, a.y + b.y}; }
        Point2 operator*(double s, const Point2 &a) { return {s * a.x, s * a.y}; }
        double dot(const Point2 &a, const Point2 &b) { return a.x * b.x + a.y * b.y; }
        double cross(const Point2 &a, const Point2 &b) { return a.x * b.y - a.y * b.x; }
        double norm(const Point2 &a) { return std::hypot(a.x, a.y); }

        double azimuth_of(const Point2 &v) { return azimuth_deg(rad_to_deg(std::atan2(v.y, v.x))); }

        // Intersection of segment p->q with the wall segment; nullopt if either
        // parameter leaves [0, 1].
        std::optional<Point2> hit(const Point2 &p, const Point2 &q, const Segment &wall)
        {
            const Point2 d = wall.b - wall.a;
            const Point2 e = q - p;
            const double den = cross(d, e);
            if (std::abs(den) < 1e-15)
                return std::nullopt;
            const Point2 w = p - wall.a;
            const double s = cross(w, e) / den; // along the wall
            const double u = cross(w, d) / den; // along p->q
            constexpr double eps = 1e-12;
            if (s < -eps || s > 1.0 + eps || u < -eps || u > 1.0 + eps)
                return std::nullopt;
            return wall.a + s * d;
        }

        double incidence_of(const Point2 &from, const Point2 &at, const Segment &wall)
        {
            const Point2 d = wall.b - wall.a;
            const Point2 n{-d.y, d.x};
            const Point2 v = at - from;
            const double c = std::abs(dot(n, v)) / (norm(n) * norm(v));
            return rad_to_deg(std::acos(std::min(1.0, c)));
        }

        double side_of(const Point2 &p, const Segment &s) { return cross(s.b - s.a, p - s.a); }

        bool segments_intersect(const Segment &s, const Segment &t)
        {
            const double d1 = side_of(t.a, s), d2 = side_of(t.b, s);
            const double d3 = side_of(s.a, t), d4 = side_of(s.b, t);
            return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
        }

        double fold_height(double in_plane, const GeometryScene &scene)
        {
            const double dh = scene.tx.height_m - scene.rx.height_m;
            return std::sqrt(in_plane * in_plane + dh * dh);
        }

        RayPath finish(PathKind kind, double in_plane, const GeometryScene &scene, const BandConfig &band,
                       const Point2 &first, const Point2 &last, std::vector<Point2> pts, std::vector<double> inc,
                       std::vector<Wall> walls)
        {
            RayPath p;
            p.kind = kind;
            p.length_m = fold_height(in_plane, scene);
            p.delay_s = p.length_m / kSpeedOfLight;
            p.aod_deg = azimuth_of(first - scene.tx.pos);
            p.aoa_deg = azimuth_of(last - scene.rx.pos);
            p.gain_db = -fspl_db(p.length_m, band.center_frequency_hz);
            for (std::size_t i = 0; i < walls.size(); ++i)
            {
                const auto g = fresnel_reflection(scene.permittivity(walls[i], band.name), inc[i], Polarization::TE);
                p.gain_db += 20.0 * std::log10(std::abs(g));
            }
            p.bounce_points = std::move(pts);
            p.incidence_deg = std::move(inc);
            return p;
        }

        Point2 point_from_json(const nlohmann::json &j)
        {
            if (!j.is_array() || j.size() != 2)
                throw std::invalid_argument("scene: points must be [x, y] pairs");
            return {j[0].get<double>(), j[1].get<double>()};
        }

        Segment segment_from_json(const nlohmann::json &j)
        {
            if (!j.is_array() || j.size() != 2)
                throw std::invalid_argument("scene: walls must be [[x1, y1], [x2, y2]]");
            return {point_from_json(j[0]), point_from_json(j[1])};
        }

        std::map<std::string, std::complex<double>> eps_from_json(const nlohmann::json &j)
        {
            std::map<std::string, std::complex<double>> m;
            for (auto it = j.begin(); it != j.end(); ++it)
            {
                const auto &v = it.value();
                if (!v.is_array() || v.size() != 2)
                    throw std::invalid_argument("scene: permittivity entries must be [re, im]");
                m[it.key()] = {v[0].get<double>(), v[1].get<double>()};
            }
            return m;
        }

        nlohmann::json eps_to_json(const std::map<std::string, std::complex<double>> &m)
        {
            nlohmann::json j = nlohmann::json::object();
            for (const auto &[k, v] : m)
                j[k] = {v.real(), v.imag()};
            return j;
        }
    } // namespace

    std::string to_string(PathKind k)
    {
        switch (k)
        {
        case PathKind::LoS:
            return "LoS";
        case PathKind::SbNw:
            return "SB_NW";
        case PathKind::SbSw:
            return "SB_SW";
        case PathKind::DbSwNw:
            return "DB_SW_NW";
        case PathKind::Random:
            return "random";
        }
        return "";
    }

    PathKind path_kind_from_string(const std::string &s)
    {
        for (auto k : {PathKind::LoS, PathKind::SbNw, PathKind::SbSw, PathKind::DbSwNw, PathKind::Random})
            if (to_string(k) == s)
                return k;
        throw std::invalid_argument("unknown path kind '" + s + "'");
    }

    std::map<std::string, std::complex<double>> concrete_permittivity()
    {
        return {{"154GHz", {6.08, -0.153}}, {"300GHz", {5.24, -0.38}}};
    }

    void GeometryScene::validate() const
    {
        if (segments_intersect(wall_north, wall_south))
            throw std::invalid_argument("scene: walls intersect");
        const Point2 mid_n = 0.5 * (wall_north.a + wall_north.b);
        const Point2 mid_s = 0.5 * (wall_south.a + wall_south.b);
        for (const auto *t : {&tx, &rx})
        {
            const double a = side_of(t->pos, wall_north), b = side_of(mid_s, wall_north);
            const double c = side_of(t->pos, wall_south), d = side_of(mid_n, wall_south);
            if (a == 0.0 || c == 0.0 || (a > 0) != (b > 0) || (c > 0) != (d > 0))
                throw std::invalid_argument("scene: Tx and Rx must lie strictly between the walls");
        }
        for (const auto *m : {&eps_north, &eps_south})
            for (const auto &[k, v] : *m)
                if (v.imag() > 0.0)
                    throw std::invalid_argument("scene: permittivity for " + k + " must have a non-positive imaginary part");
    }

    std::complex<double> GeometryScene::permittivity(Wall w, const std::string &band_name) const
    {
        const auto &m = w == Wall::North ? eps_north : eps_south;
        const auto it = m.find(band_name);
        if (it == m.end())
            throw std::invalid_argument("scene: no permittivity for band " + band_name);
        return it->second;
    }

    GeometryScene GeometryScene::street_canyon(double rx_x, double rx_y, double width_m)
    {
        GeometryScene s;
        const double h = width_m / 2.0;
        s.wall_north = {{-20.0, h}, {140.0, h}};
        s.wall_south = {{-20.0, -h}, {140.0, -h}};
        s.tx = {{0.0, -3.0}, 3.0};
        s.rx = {{rx_x, rx_y}, 1.2};
        s.eps_north = concrete_permittivity();
        s.eps_south = concrete_permittivity();
        return s;
    }

    double fspl_db(double distance_m, double frequency_hz)
    {
        if (!(distance_m > 0.0))
            throw std::invalid_argument("fspl_db: distance must be positive");
        return 20.0 * std::log10(4.0 * kPi * distance_m * frequency_hz / kSpeedOfLight);
    }

    std::complex<double> fresnel_reflection(std::complex<double> eps, double incidence_deg, Polarization pol)
    {
        if (!(incidence_deg >= 0.0 && incidence_deg <= 90.0))
            throw std::invalid_argument("fresnel_reflection: incidence angle must lie in [0, 90] degrees");
        const double th = deg_to_rad(incidence_deg);
        const double c = std::cos(th);
        const double s = std::sin(th);
        const std::complex<double> root = std::sqrt(eps - s * s);
        if (pol == Polarization::TE)
            return (c - root) / (c + root);
        return (eps * c - root) / (eps * c + root);
    }

    Point2 mirror(const Point2 &p, const Segment &seg)
    {
        const Point2 d = seg.b - seg.a;
        const double t = dot(p - seg.a, d) / dot(d, d);
        const Point2 foot = seg.a + t * d;
        return 2.0 * foot - p;
    }

    double los_distance_m(const GeometryScene &scene)
    {
        return fold_height(norm(scene.rx.pos - scene.tx.pos), scene);
    }

    std::vector<RayPath> trace(const GeometryScene &scene, const BandConfig &band, const TraceOrders &orders)
    {
        scene.validate();
        std::vector<RayPath> out;
        const Point2 &tx = scene.tx.pos;
        const Point2 &rx = scene.rx.pos;

        if (orders.los)
            out.push_back(finish(PathKind::LoS, norm(rx - tx), scene, band, rx, tx, {}, {}, {}));

        if (orders.single_bounce)
        {
            for (auto [w, kind] : {std::pair{Wall::North, PathKind::SbNw}, std::pair{Wall::South, PathKind::SbSw}})
            {
                const Segment &seg = scene.wall(w);
                const Point2 img = mirror(tx, seg);
                const auto p = hit(img, rx, seg);
                if (!p)
                    continue;
                const double inc = incidence_of(tx, *p, seg);
                out.push_back(finish(kind, norm(rx - img), scene, band, *p, *p, {*p}, {inc}, {w}));
            }
        }

        if (orders.double_bounce)
        {
            const Segment &sw = scene.wall_south;
            const Segment &nw = scene.wall_north;
            const Point2 img1 = mirror(tx, sw);
            const Point2 img2 = mirror(img1, nw);
            const auto p2 = hit(img2, rx, nw);
            if (p2)
            {
                const auto p1 = hit(img1, *p2, sw);
                if (p1)
                {
                    const double inc1 = incidence_of(tx, *p1, sw);
                    const double inc2 = incidence_of(*p1, *p2, nw);
                    out.push_back(finish(PathKind::DbSwNw, norm(rx - img2), scene, band, *p1, *p2,
                                         {*p1, *p2}, {inc1, inc2}, {Wall::South, Wall::North}));
                }
            }
        }
        return out;
    }

    GeometryScene SceneDescription::at(std::size_t i) const
    {
        GeometryScene s = scene;
        s.rx = receivers.at(i).terminal;
        return s;
    }

    SceneDescription scene_from_json(const nlohmann::json &j)
    {
        try
        {
            SceneDescription d;
            auto &s = d.scene;
            s.wall_north = segment_from_json(j.at("walls").at("north"));
            s.wall_south = segment_from_json(j.at("walls").at("south"));
            s.eps_north = eps_from_json(j.at("permittivity").at("north"));
            s.eps_south = eps_from_json(j.at("permittivity").at("south"));
            const auto &tx = j.at("tx");
            s.tx = {{tx.at("x").get<double>(), tx.at("y").get<double>()}, tx.at("height_m").get<double>()};
            for (const auto &r : j.at("rx"))
                d.receivers.push_back({r.value("id", "Rx" + std::to_string(d.receivers.size() + 1)),
                                       {{r.at("x").get<double>(), r.at("y").get<double>()}, r.at("height_m").get<double>()}});
            if (d.receivers.empty())
                throw std::invalid_argument("scene: at least one receiver is required");
            s.rx = d.receivers.front().terminal;
            for (std::size_t i = 0; i < d.receivers.size(); ++i)
                d.at(i).validate();
            return d;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw std::invalid_argument(std::string("scene: ") + e.what());
        }
    }

    nlohmann::json scene_to_json(const SceneDescription &d)
    {
        const auto &s = d.scene;
        auto seg = [](const Segment &g)
        { return nlohmann::json{{g.a.x, g.a.y}, {g.b.x, g.b.y}}; };
        nlohmann::json rx = nlohmann::json::array();
        for (const auto &r : d.receivers)
            rx.push_back({{"id", r.id}, {"x", r.terminal.pos.x}, {"y", r.terminal.pos.y}, {"height_m", r.terminal.height_m}});
        return {{"walls", {{"north", seg(s.wall_north)}, {"south", seg(s.wall_south)}}},
                {"permittivity", {{"north", eps_to_json(s.eps_north)}, {"south", eps_to_json(s.eps_south)}}},
                {"tx", {{"x", s.tx.pos.x}, {"y", s.tx.pos.y}, {"height_m", s.tx.height_m}}},
                {"rx", rx}};
    }

    SceneDescription load_scene(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::invalid_argument("scene: cannot open " + path.string());
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse(in);
        }
        catch (const nlohmann::json::parse_error &e)
        {
            throw std::invalid_argument(std::string("scene: ") + e.what());
        }
        return scene_from_json(j);
    }
} // namespace canyon
