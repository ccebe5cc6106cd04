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

#include "canyon/lsp.hpp"
#include "canyon/geometry.hpp"
#include "canyon/kernels.hpp"
#include "canyon/units.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace canyon
{
    namespace
    {
        double rms(const std::vector<double> &r)
        {
            if (r.empty())
                return 0.0;
            double s = 0.0;
            for (double v : r)
                s += v * v;
            return std::sqrt(s / static_cast<double>(r.size()));
        }

        void check_samples(const std::vector<PathLossSample> &samples)
        {
            if (samples.empty())
                throw std::invalid_argument("path-loss fit: no samples");
            for (const auto &s : samples)
                if (!(s.distance_m > 0.0))
                    throw std::invalid_argument("path-loss fit: distances must be positive");
        }

        std::vector<double> filtered(const std::vector<double> &p, double window_db, double floor_db)
        {
            if (p.empty())
                return p;
            const double peak = *std::max_element(p.begin(), p.end());
            const double cut = std::max(peak * from_db(-window_db), from_db(floor_db));
            std::vector<double> out = p;
            for (auto &v : out)
                if (v < cut)
                    v = 0.0;
            return out;
        }
    } // namespace

    std::string to_string(Scenario s) { return s == Scenario::LoS ? "LoS" : "NLoS"; }

    Scenario scenario_from_string(const std::string &s)
    {
        if (s == "LoS" || s == "los")
            return Scenario::LoS;
        if (s == "NLoS" || s == "nlos")
            return Scenario::NLoS;
        throw std::invalid_argument("unknown scenario '" + s + "'");
    }

    double omni_path_loss(const PowerGrid &power, double ga_db)
    {
        const double total = power.total();
        if (!(total > 0.0))
            throw std::invalid_argument("omni_path_loss: grid holds no power");
        return -(to_db(total) - ga_db);
    }

    double beam_overlap_side_db(const std::vector<double> &axis, double hpbw_deg)
    {
        if (axis.empty())
            return 0.0;
        return to_db(scan_response(axis, hpbw_deg, axis.front()));
    }

    double beam_overlap_gain(const AngleGrid &angles, const BandConfig &band)
    {
        return beam_overlap_side_db(angles.aod_deg, band.hpbw_az_deg) +
               beam_overlap_side_db(angles.aoa_deg, band.hpbw_az_deg);
    }

    FitResult fit_ci(const std::vector<PathLossSample> &samples, double fc_hz)
    {
        check_samples(samples);
        const double fspl1 = fspl_db(1.0, fc_hz);
        double sxx = 0.0, sxy = 0.0;
        for (const auto &s : samples)
        {
            const double x = 10.0 * std::log10(s.distance_m);
            sxx += x * x;
            sxy += x * (s.pl_db - fspl1);
        }
        if (!(sxx > 0.0))
            throw std::invalid_argument("fit_ci: degenerate design matrix");
        FitResult f;
        f.model = PlModel::CI;
        f.n = sxy / sxx;
        for (const auto &s : samples)
            f.residuals.push_back(s.pl_db - fspl1 - 10.0 * f.n * std::log10(s.distance_m));
        f.sigma = rms(f.residuals);
        return f;
    }

    FitResult fit_fi(const std::vector<PathLossSample> &samples)
    {
        check_samples(samples);
        const double n = static_cast<double>(samples.size());
        double mx = 0.0, my = 0.0;
        for (const auto &s : samples)
        {
            mx += 10.0 * std::log10(s.distance_m);
            my += s.pl_db;
        }
        mx /= n;
        my /= n;
        double sxx = 0.0, sxy = 0.0;
        for (const auto &s : samples)
        {
            const double dx = 10.0 * std::log10(s.distance_m) - mx;
            sxx += dx * dx;
            sxy += dx * (s.pl_db - my);
        }
        if (!(sxx > 1e-12 * n))
            throw std::invalid_argument("fit_fi: degenerate design matrix");
        FitResult f;
        f.model = PlModel::FI;
        f.alpha = sxy / sxx;
        f.beta = my - f.alpha * mx;
        for (const auto &s : samples)
            f.residuals.push_back(s.pl_db - f.beta - 10.0 * f.alpha * std::log10(s.distance_m));
        f.sigma = rms(f.residuals);
        return f;
    }

    Pdp acceptance_filter(const Pdp &pdp, double window_db, double floor_db)
    {
        return {pdp.delay_s, filtered(pdp.power, window_db, floor_db)};
    }

    Paps acceptance_filter(const Paps &pap, double window_db, double floor_db)
    {
        return {pap.side, pap.angle_deg, filtered(pap.power, window_db, floor_db)};
    }

    double delay_spread(const Pdp &pdp)
    {
        if (pdp.delay_s.size() != pdp.power.size())
            throw std::invalid_argument("delay_spread: delay and power lengths differ");
        double p = 0.0, m1 = 0.0;
        for (std::size_t i = 0; i < pdp.power.size(); ++i)
        {
            p += pdp.power[i];
            m1 += pdp.power[i] * pdp.delay_s[i];
        }
        if (!(p > 0.0))
            throw std::invalid_argument("delay_spread: profile holds no power");
        const double mean = m1 / p;
        double m2 = 0.0;
        for (std::size_t i = 0; i < pdp.power.size(); ++i)
        {
            const double d = pdp.delay_s[i] - mean;
            m2 += pdp.power[i] * d * d;
        }
        return std::sqrt(m2 / p);
    }

    double angular_spread(const Paps &pap, double min_resultant)
    {
        if (pap.angle_deg.size() != pap.power.size())
            throw std::invalid_argument("angular_spread: angle and power lengths differ");
        std::complex<double> acc = 0.0;
        double p = 0.0;
        for (std::size_t i = 0; i < pap.power.size(); ++i)
        {
            acc += pap.power[i] * std::polar(1.0, deg_to_rad(pap.angle_deg[i]));
            p += pap.power[i];
        }
        if (!(p > 0.0))
            throw std::invalid_argument("angular_spread: profile holds no power");
        const double r = std::clamp(std::abs(acc) / p, min_resultant, 1.0);
        return std::sqrt(-2.0 * std::log(r));
    }

    double k_factor(const ClusterSet &cs, int los_cluster_id, bool printed_ratio)
    {
        double los = 0.0, rest = 0.0;
        for (const auto &m : cs.mpcs)
        {
            if (!m.cluster_id)
                continue;
            (*m.cluster_id == los_cluster_id ? los : rest) += from_db(m.power_db);
        }
        if (printed_ratio)
            std::swap(los, rest);
        if (rest <= 0.0)
            return std::numeric_limits<double>::infinity();
        return to_db(los / rest);
    }

    nlohmann::json to_json(const LspReport &r)
    {
        auto num = [](double v) -> nlohmann::json
        {
            if (std::isfinite(v))
                return v;
            return "undefined";
        };
        return {{"rx_id", r.rx_id},
                {"band", r.band},
                {"pl_db", num(r.pl_db)},
                {"ds_ns", num(r.ds_s * 1e9)},
                {"asd_deg", num(rad_to_deg(r.asd_rad))},
                {"asa_deg", num(rad_to_deg(r.asa_rad))},
                {"kf_db", num(r.k_factor_db)},
                {"dr_db", num(r.dr_db)},
                {"sfdr_db", num(r.sfdr_db)}};
    }

    nlohmann::json to_json(const FitResult &f)
    {
        if (f.model == PlModel::CI)
            return {{"model", "CI"}, {"n", f.n}, {"sigma_db", f.sigma}, {"count", f.residuals.size()}};
        return {{"model", "FI"}, {"alpha", f.alpha}, {"beta_db", f.beta}, {"sigma_db", f.sigma},
                {"count", f.residuals.size()}};
    }

    void write_pl_csv(std::ostream &out, const std::vector<PathLossSample> &samples)
    {
        out << "distance_m,pl_db,band,scenario\n" << std::setprecision(17);
        for (const auto &s : samples)
            out << s.distance_m << ',' << s.pl_db << ',' << s.band << ',' << to_string(s.scenario) << '\n';
    }

    std::vector<PathLossSample> read_pl_csv(std::istream &in)
    {
        std::vector<PathLossSample> out;
        std::string line;
        if (!std::getline(in, line))
            return out;
        if (line.rfind("distance_m,pl_db", 0) != 0)
            throw std::invalid_argument("read_pl_csv: unexpected header '" + line + "'");
        std::size_t lineno = 1;
        while (std::getline(in, line))
        {
            ++lineno;
            if (line.empty() || line == "\r")
                continue;
            std::vector<std::string> cols;
            std::stringstream ss(line);
            std::string c;
            while (std::getline(ss, c, ','))
                cols.push_back(c);
            if (cols.size() < 2)
                throw std::invalid_argument("read_pl_csv: line " + std::to_string(lineno) + " has too few columns");
            PathLossSample s;
            try
            {
                s.distance_m = std::stod(cols[0]);
                s.pl_db = std::stod(cols[1]);
                if (cols.size() > 2)
                    s.band = cols[2];
                if (cols.size() > 3)
                    s.scenario = scenario_from_string(cols[3]);
            }
            catch (const std::logic_error &e)
            {
                throw std::invalid_argument("read_pl_csv: line " + std::to_string(lineno) + ": " + e.what());
            }
            if (!(s.distance_m > 0.0))
                throw std::invalid_argument("read_pl_csv: line " + std::to_string(lineno) + ": distance must be positive");
            out.push_back(s);
        }
        return out;
    }
} // namespace canyon
