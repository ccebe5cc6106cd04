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

#include "canyon/qd_model.hpp"
#include "canyon/kernels.hpp"
#include "canyon/units.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace canyon
{
    namespace
    {
        // The printed tables are rounded to three decimals; one row sums to 0.999.
        Matrix2 normalize_rows(Matrix2 t)
        {
            for (auto &row : t)
            {
                const double s = row[0] + row[1];
                row[0] /= s;
                row[1] /= s;
            }
            return t;
        }

        void validate_matrix(const Matrix2 &t, const char *name)
        {
            for (const auto &row : t)
            {
                if (row[0] < 0.0 || row[1] < 0.0 || std::abs(row[0] + row[1] - 1.0) > 1e-9)
                    throw std::invalid_argument(std::string(name) + ": rows must be non-negative and sum to 1");
            }
        }

        nlohmann::json matrix_json(const Matrix2 &t) { return {{t[0][0], t[0][1]}, {t[1][0], t[1][1]}}; }

        Matrix2 matrix_from_json(const nlohmann::json &j)
        {
            if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 || !j[1].is_array() ||
                j[1].size() != 2)
                throw std::invalid_argument("transition matrices must be 2x2 arrays");
            return {{{j[0][0].get<double>(), j[0][1].get<double>()}, {j[1][0].get<double>(), j[1][1].get<double>()}}};
        }

        bool draw_presence(const Matrix2 &t, std::mt19937_64 &rng)
        {
            std::bernoulli_distribution b(stationary_presence(t));
            return b(rng);
        }

        std::vector<QdPath> deterministic_paths(const GeometryScene &scene, const BandConfig &band,
                                                const BandQdParams &p, bool nw, bool sw, std::mt19937_64 &rng)
        {
            std::vector<QdPath> out;
            std::normal_distribution<double> chi(0.0, 1.0);
            // Both deviations are drawn regardless of presence so the stream does not
            // depend on the presence draw.
            const double chi_nw = p.det_amp_sigma_db * chi(rng);
            const double chi_sw = p.det_amp_sigma_db * chi(rng);
            for (const auto &r : trace(scene, band, {true, true, false}))
            {
                QdPath q{r.kind, r.delay_s, r.aod_deg, r.aoa_deg, r.gain_db};
                if (r.kind == PathKind::SbNw)
                {
                    if (!nw)
                        continue;
                    q.gain_db += chi_nw;
                }
                else if (r.kind == PathKind::SbSw)
                {
                    if (!sw)
                        continue;
                    q.gain_db += chi_sw;
                }
                out.push_back(q);
            }
            return out;
        }

        double scan_span_deg(const std::vector<double> &axis)
        {
            if (axis.size() < 2)
                return 0.0;
            const double step = axis[1] - axis[0];
            return std::min(360.0, step * static_cast<double>(axis.size()));
        }

        // log Phi(s) and phi(s)/Phi(s).
        void log_cdf_and_mills(double s, double &log_cdf, double &lambda)
        {
            constexpr double inv_sqrt2pi = 0.3989422804014327;
            if (s > -30.0)
            {
                const double cdf = 0.5 * std::erfc(-s / std::numbers::sqrt2);
                const double pdf = inv_sqrt2pi * std::exp(-0.5 * s * s);
                log_cdf = std::log(cdf);
                lambda = pdf / cdf;
                return;
            }
            const double s2 = s * s;
            const double series = 1.0 - 1.0 / s2 + 3.0 / (s2 * s2);
            log_cdf = std::log(inv_sqrt2pi) - 0.5 * s2 - std::log(-s) + std::log(series);
            lambda = -s / series;
        }
    } // namespace

    void BandQdParams::validate() const
    {
        validate_matrix(markov_nw, "markov_nw");
        validate_matrix(markov_sw, "markov_sw");
        if (!(arrival_mean_ns > 0.0))
            throw std::invalid_argument("arrival_mean_ns must be positive");
        if (!(shadow_sigma >= 0.0))
            throw std::invalid_argument("shadow_sigma must be non-negative");
        if (!(det_amp_sigma_db >= 0.0))
            throw std::invalid_argument("det_amp_sigma_db must be non-negative");
    }

    const BandQdParams &QdModelParams::for_band(const std::string &name) const
    {
        const auto it = bands.find(name);
        if (it == bands.end())
            throw std::invalid_argument("no QD parameters for band " + name);
        return it->second;
    }

    void QdModelParams::validate() const
    {
        for (const auto &[name, b] : bands)
        {
            try
            {
                b.validate();
            }
            catch (const std::invalid_argument &e)
            {
                throw std::invalid_argument(name + ": " + e.what());
            }
        }
    }

    QdModelParams QdModelParams::defaults()
    {
        QdModelParams p;
        BandQdParams lo;
        lo.markov_nw = normalize_rows({{{0.696, 0.304}, {0.500, 0.500}}});
        lo.markov_sw = normalize_rows({{{0.467, 0.533}, {0.291, 0.708}}});
        lo.arrival_mean_ns = 80.16;
        lo.slope_a = -0.07;
        lo.intercept_b = -15.55;
        lo.shadow_sigma = 7.64;
        BandQdParams hi;
        hi.markov_nw = normalize_rows({{{0.714, 0.286}, {0.727, 0.273}}});
        hi.markov_sw = normalize_rows({{{0.759, 0.241}, {0.600, 0.400}}});
        hi.arrival_mean_ns = 64.82;
        hi.slope_a = -0.07;
        hi.intercept_b = -16.67;
        hi.shadow_sigma = 6.87;
        p.bands["154GHz"] = lo;
        p.bands["300GHz"] = hi;
        return p;
    }

    nlohmann::json to_json(const QdModelParams &p)
    {
        nlohmann::json bands = nlohmann::json::object();
        for (const auto &[name, b] : p.bands)
            bands[name] = {{"markov_nw", matrix_json(b.markov_nw)},
                           {"markov_sw", matrix_json(b.markov_sw)},
                           {"arrival_mean_ns", b.arrival_mean_ns},
                           {"slope_a", b.slope_a},
                           {"intercept_b", b.intercept_b},
                           {"shadow_sigma", b.shadow_sigma},
                           {"det_amp_sigma_db", b.det_amp_sigma_db},
                           {"noise_floor_db", b.noise_floor_db}};
        return {{"state_order", p.state_order == StateOrder::PresentFirst ? "present-first" : "absent-first"},
                {"bands", bands}};
    }

    QdModelParams params_from_json(const nlohmann::json &j, const QdModelParams &base)
    {
        if (!j.is_object())
            throw std::invalid_argument("params: expected a JSON object");
        nlohmann::json merged = to_json(base);
        merged.merge_patch(j);
        QdModelParams p;
        try
        {
            const auto order = merged.at("state_order").get<std::string>();
            if (order == "present-first")
                p.state_order = StateOrder::PresentFirst;
            else if (order == "absent-first")
                p.state_order = StateOrder::AbsentFirst;
            else
                throw std::invalid_argument("params: state_order must be present-first or absent-first");
            for (auto it = merged.at("bands").begin(); it != merged.at("bands").end(); ++it)
            {
                const auto &v = it.value();
                BandQdParams b;
                b.markov_nw = matrix_from_json(v.at("markov_nw"));
                b.markov_sw = matrix_from_json(v.at("markov_sw"));
                b.arrival_mean_ns = v.at("arrival_mean_ns").get<double>();
                b.slope_a = v.at("slope_a").get<double>();
                b.intercept_b = v.at("intercept_b").get<double>();
                b.shadow_sigma = v.at("shadow_sigma").get<double>();
                b.det_amp_sigma_db = v.value("det_amp_sigma_db", 4.0);
                b.noise_floor_db = v.value("noise_floor_db", -30.0);
                p.bands[it.key()] = b;
            }
        }
        catch (const nlohmann::json::exception &e)
        {
            throw std::invalid_argument(std::string("params: ") + e.what());
        }
        p.validate();
        return p;
    }

    double stationary_presence(const Matrix2 &t)
    {
        validate_matrix(t, "transition matrix");
        const double leave = t[0][1];
        const double enter = t[1][0];
        if (leave + enter <= 0.0)
            throw std::invalid_argument("transition matrix has no unique stationary distribution; give a start state");
        return enter / (leave + enter);
    }

    Matrix2 present_first(const Matrix2 &t, StateOrder order)
    {
        if (order == StateOrder::PresentFirst)
            return t;
        return {{{t[1][1], t[1][0]}, {t[0][1], t[0][0]}}};
    }

    std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        return std::mt19937_64(seq);
    }

    std::vector<bool> markov_presence_sequence(const Matrix2 &t, std::size_t n, std::uint64_t seed,
                                               std::optional<bool> start)
    {
        validate_matrix(t, "transition matrix");
        auto rng = make_rng(seed, 0);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<bool> out;
        out.reserve(n);
        if (n == 0)
            return out;
        bool s = start ? *start : (u(rng) < stationary_presence(t));
        out.push_back(s);
        for (std::size_t i = 1; i < n; ++i)
        {
            const double stay = s ? t[0][0] : t[1][1];
            if (!(u(rng) < stay))
                s = !s;
            out.push_back(s);
        }
        return out;
    }

    std::size_t CirRealization::count(PathKind k) const
    {
        return static_cast<std::size_t>(
            std::count_if(paths.begin(), paths.end(), [k](const QdPath &p) { return p.kind == k; }));
    }

    std::vector<QdPath> deterministic_component(const GeometryScene &scene, const BandConfig &band,
                                                const QdModelParams &params, std::uint64_t seed,
                                                const WallPresence &presence)
    {
        const auto &p = params.for_band(band.name);
        auto rng = make_rng(seed, 1);
        const bool nw = presence.nw ? *presence.nw : draw_presence(present_first(p.markov_nw, params.state_order), rng);
        const bool sw = presence.sw ? *presence.sw : draw_presence(present_first(p.markov_sw, params.state_order), rng);
        auto chi_rng = make_rng(seed, 2);
        return deterministic_paths(scene, band, p, nw, sw, chi_rng);
    }

    double random_path_envelope_db(const BandQdParams &p, double excess_delay_ns)
    {
        return p.slope_a * excess_delay_ns + p.intercept_b;
    }

    RandomComponents random_components(double distance_m, const BandConfig &band, const QdModelParams &params,
                                       std::uint64_t seed, const AngleGrid &scan)
    {
        if (!(distance_m > 0.0))
            throw std::invalid_argument("random_components: distance must be positive");
        const auto &p = params.for_band(band.name);
        const double tau_los = distance_m / kSpeedOfLight;
        const double pg_los = -fspl_db(distance_m, band.center_frequency_hz);

        // Arrivals stop where the mean envelope is 3 sigma under the floor, or at the span.
        double window_ns = band.delay_span_s * 1e9;
        if (p.slope_a < 0.0)
            window_ns = std::min(window_ns, (p.noise_floor_db - 3.0 * p.shadow_sigma - p.intercept_b) / p.slope_a);
        window_ns = std::max(0.0, window_ns);

        auto rng = make_rng(seed, 3);
        std::exponential_distribution<double> gap(1.0 / p.arrival_mean_ns);
        std::normal_distribution<double> shadow(0.0, 1.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double aod0 = scan.aod_deg.empty() ? 0.0 : scan.aod_deg.front();
        const double aoa0 = scan.aoa_deg.empty() ? 0.0 : scan.aoa_deg.front();
        const double aod_span = scan_span_deg(scan.aod_deg);
        const double aoa_span = scan_span_deg(scan.aoa_deg);

        RandomComponents rc;
        rc.window_s = window_ns * 1e-9;
        double dt = 0.0;
        for (;;)
        {
            dt += gap(rng);
            if (dt > window_ns)
                break;
            QdPath q;
            q.kind = PathKind::Random;
            q.delay_s = tau_los + dt * 1e-9;
            q.gain_db = random_path_envelope_db(p, dt) + p.shadow_sigma * shadow(rng) + pg_los;
            q.aod_deg = azimuth_deg(aod0 + aod_span * unit(rng));
            q.aoa_deg = azimuth_deg(aoa0 + aoa_span * unit(rng));
            rc.paths.push_back(q);
        }
        return rc;
    }

    std::vector<double> interarrival_samples(const BandQdParams &p, std::size_t n, std::uint64_t seed)
    {
        auto rng = make_rng(seed, 3);
        std::exponential_distribution<double> gap(1.0 / p.arrival_mean_ns);
        std::vector<double> out(n);
        for (auto &v : out)
            v = gap(rng) * 1e-9;
        return out;
    }

    CirRealization synthesize(const GeometryScene &scene, const BandConfig &band, const QdModelParams &params,
                              std::uint64_t seed, const SynthesisOptions &opt)
    {
        const auto &p = params.for_band(band.name);
        CirRealization r;
        r.band = band.name;
        r.seed = seed;
        r.distance_m = los_distance_m(scene);

        auto rng = make_rng(seed, 1);
        const bool nw = opt.presence.nw ? *opt.presence.nw
                                        : draw_presence(present_first(p.markov_nw, params.state_order), rng);
        const bool sw = opt.presence.sw ? *opt.presence.sw
                                        : draw_presence(present_first(p.markov_sw, params.state_order), rng);
        r.nw_present = nw;
        r.sw_present = sw;
        auto chi_rng = make_rng(seed, 2);
        r.paths = deterministic_paths(scene, band, p, nw, sw, chi_rng);
        if (opt.include_random)
        {
            auto rc = random_components(r.distance_m, band, params, seed, opt.scan);
            r.random_window_s = rc.window_s;
            r.paths.insert(r.paths.end(), rc.paths.begin(), rc.paths.end());
        }
        return r;
    }

    std::vector<CirRealization> synthesize_trajectory(const SceneDescription &desc, const BandConfig &band,
                                                      const QdModelParams &params, std::uint64_t seed,
                                                      const SynthesisOptions &opt)
    {
        const auto &p = params.for_band(band.name);
        const std::size_t n = desc.receivers.size();
        auto seeds = make_rng(seed, 10);
        const std::uint64_t nw_seed = seeds();
        const std::uint64_t sw_seed = seeds();
        const auto nw = markov_presence_sequence(present_first(p.markov_nw, params.state_order), n, nw_seed,
                                                 opt.presence.nw);
        const auto sw = markov_presence_sequence(present_first(p.markov_sw, params.state_order), n, sw_seed,
                                                 opt.presence.sw);
        std::vector<CirRealization> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            SynthesisOptions o = opt;
            o.presence = {nw[i], sw[i]};
            out.push_back(synthesize(desc.at(i), band, params, seed + i, o));
        }
        return out;
    }

    Pdp render_pdp(const CirRealization &real, const BandConfig &band, const AngleGrid &angles)
    {
        band.validate();
        angles.validate();
        const std::size_t nd = band.n_fft;
        const double bin = band.delay_bin_s();
        Pdp pdp;
        pdp.delay_s.resize(nd);
        pdp.power.assign(nd, 0.0);
        for (std::size_t k = 0; k < nd; ++k)
            pdp.delay_s[k] = static_cast<double>(k) * bin;

        const double ref_t = scan_response(angles.aod_deg, band.hpbw_az_deg, angles.aod_deg.front());
        const double ref_r = scan_response(angles.aoa_deg, band.hpbw_az_deg, angles.aoa_deg.front());
        for (const auto &path : real.paths)
        {
            const double ang = scan_response(angles.aod_deg, band.hpbw_az_deg, path.aod_deg) / ref_t *
                               scan_response(angles.aoa_deg, band.hpbw_az_deg, path.aoa_deg) / ref_r;
            const double pw = from_db(path.gain_db) * ang;
            const double u = path.delay_s / bin;
            for (std::size_t k = 0; k < nd; ++k)
                pdp.power[k] += pw * delay_kernel(band, static_cast<double>(k) - u);
        }
        return pdp;
    }

    MeasurementGrid render_ctf(const CirRealization &real, const BandConfig &band, const AngleGrid &angles,
                               double noise_sigma2, std::uint64_t seed)
    {
        band.validate();
        angles.validate();
        const std::size_t nf = band.n_subcarriers;
        const std::size_t nt = angles.aod_deg.size();
        const std::size_t nr = angles.aoa_deg.size();
        const auto offsets = tone_offsets_hz(band);

        Tensor3<std::complex<double>> acc(nf, nt, nr);
        std::vector<std::complex<double>> tone(nf);
        std::vector<double> gt(nt), gr(nr);
        for (const auto &path : real.paths)
        {
            const double amp = std::sqrt(from_db(path.gain_db));
            // Carrier phase folded modulo one cycle to keep the argument small.
            const double carrier = std::fmod(band.center_frequency_hz * path.delay_s, 1.0);
            for (std::size_t m = 0; m < nf; ++m)
            {
                const double cyc = carrier + std::fmod(offsets[m] * path.delay_s, 1.0);
                tone[m] = std::polar(amp, -2.0 * kPi * cyc);
            }
            for (std::size_t t = 0; t < nt; ++t)
                gt[t] = std::sqrt(pattern_gain(angles.aod_deg[t] - path.aod_deg, band.hpbw_az_deg));
            for (std::size_t r = 0; r < nr; ++r)
                gr[r] = std::sqrt(pattern_gain(angles.aoa_deg[r] - path.aoa_deg, band.hpbw_az_deg));
            for (std::size_t t = 0; t < nt; ++t)
                for (std::size_t r = 0; r < nr; ++r)
                {
                    const double g = gt[t] * gr[r];
                    if (g < 1e-9)
                        continue;
                    for (std::size_t m = 0; m < nf; ++m)
                        acc(m, t, r) += g * tone[m];
                }
        }

        MeasurementGrid grid;
        grid.band = band;
        grid.angles = angles;
        grid.rx_id = "synthetic";
        grid.tx_rx_distance_m = real.distance_m;
        grid.ctf = Tensor3<std::complex<float>>(nf, nt, nr);
        auto rng = make_rng(seed, 4);
        // Per-tone variance n_fft * sigma2 gives sigma2 per delay bin after the unitary
        // transform and path_gain_scale.
        const double s = std::sqrt(std::max(0.0, noise_sigma2) * static_cast<double>(band.n_fft) / 2.0);
        std::normal_distribution<double> n01(0.0, 1.0);
        for (std::size_t i = 0; i < acc.size(); ++i)
        {
            std::complex<double> v = acc[i];
            if (s > 0.0)
            {
                const double re = n01(rng);
                const double im = n01(rng);
                v += std::complex<double>(s * re, s * im);
            }
            grid.ctf[i] = std::complex<float>(static_cast<float>(v.real()), static_cast<float>(v.imag()));
        }
        return grid;
    }

    CensoredFit fit_censored_line(const std::vector<double> &x, const std::vector<double> &y, double floor)
    {
        if (x.size() != y.size())
            throw std::invalid_argument("fit_censored_line: x and y differ in length");
        const std::size_t n = x.size();
        CensoredFit fit;
        fit.n = n;

        // Start from ordinary least squares on the observed points.
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t nu = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            if (y[i] < floor)
                continue;
            ++nu;
            sx += x[i];
            sy += y[i];
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
        }
        fit.n_censored = n - nu;
        if (nu < 3)
            throw std::invalid_argument("fit_censored_line: fewer than three uncensored points");
        const double den = static_cast<double>(nu) * sxx - sx * sx;
        if (std::abs(den) < 1e-12 * std::max(1.0, sxx * static_cast<double>(nu)))
            throw std::invalid_argument("fit_censored_line: degenerate design matrix");
        double slope = (static_cast<double>(nu) * sxy - sx * sy) / den;
        double icpt = (sy - slope * sx) / static_cast<double>(nu);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (y[i] >= floor)
                ss += std::pow(y[i] - slope * x[i] - icpt, 2);
        const double sig0 = std::max(1e-6, std::sqrt(ss / static_cast<double>(nu)));

        // Olsen reparameterisation (gamma = beta / sigma, h = 1 / sigma): concave.
        Eigen::Vector3d th(icpt / sig0, slope / sig0, 1.0 / sig0);
        auto evaluate = [&](const Eigen::Vector3d &t, Eigen::Vector3d *g, Eigen::Matrix3d *H)
        {
            double ll = 0.0;
            if (g)
                g->setZero();
            if (H)
                H->setZero();
            const double h = t[2];
            for (std::size_t i = 0; i < n; ++i)
            {
                const double xi = x[i];
                const double mu = t[0] + t[1] * xi;
                if (y[i] >= floor)
                {
                    const double r = h * y[i] - mu;
                    ll += std::log(h) - 0.5 * r * r;
                    if (g)
                    {
                        (*g)[0] += r;
                        (*g)[1] += r * xi;
                        (*g)[2] += 1.0 / h - r * y[i];
                    }
                    if (H)
                    {
                        const Eigen::Vector3d v(1.0, xi, -y[i]);
                        *H -= v * v.transpose();
                        (*H)(2, 2) -= 1.0 / (h * h);
                    }
                }
                else
                {
                    const double s = h * floor - mu;
                    double lc, lam;
                    log_cdf_and_mills(s, lc, lam);
                    ll += lc;
                    const Eigen::Vector3d ds(-1.0, -xi, floor);
                    if (g)
                        *g += lam * ds;
                    if (H)
                        *H -= lam * (s + lam) * ds * ds.transpose();
                }
            }
            return ll;
        };

        Eigen::Vector3d g;
        Eigen::Matrix3d H;
        double ll = evaluate(th, &g, &H);
        for (int it = 0; it < 200; ++it)
        {
            fit.iterations = it + 1;
            const Eigen::Vector3d step = H.ldlt().solve(-g);
            const double dec = -g.dot(step);
            if (std::abs(dec) < 1e-12)
                break;
            double alpha = 1.0;
            Eigen::Vector3d cand;
            double llc = -std::numeric_limits<double>::infinity();
            for (int ls = 0; ls < 60; ++ls)
            {
                cand = th + alpha * step;
                if (cand[2] > 0.0)
                {
                    llc = evaluate(cand, nullptr, nullptr);
                    if (llc >= ll)
                        break;
                }
                alpha *= 0.5;
            }
            if (!(llc >= ll))
                break;
            th = cand;
            ll = evaluate(th, &g, &H);
        }
        fit.sigma = 1.0 / th[2];
        fit.intercept = th[0] * fit.sigma;
        fit.slope = th[1] * fit.sigma;
        return fit;
    }

    void random_path_regression_data(const std::vector<CirRealization> &reals, std::vector<double> &x,
                                     std::vector<double> &y)
    {
        for (const auto &r : reals)
        {
            const auto los = std::find_if(r.paths.begin(), r.paths.end(),
                                          [](const QdPath &p) { return p.kind == PathKind::LoS; });
            if (los == r.paths.end())
                continue;
            for (const auto &p : r.paths)
            {
                if (p.kind != PathKind::Random)
                    continue;
                x.push_back((p.delay_s - los->delay_s) * 1e9);
                y.push_back(p.gain_db - los->gain_db);
            }
        }
    }

    void write_realization_csv(std::ostream &out, const std::vector<CirRealization> &reals)
    {
        out << "band,tau_s,aod_deg,aoa_deg,power_db,cluster_id,kind,seed\n";
        out << std::setprecision(17);
        for (const auto &r : reals)
            for (const auto &p : r.paths)
                out << r.band << ',' << p.delay_s << ',' << p.aod_deg << ',' << p.aoa_deg << ',' << p.gain_db << ",,"
                    << to_string(p.kind) << ',' << r.seed << '\n';
    }
} // namespace canyon
