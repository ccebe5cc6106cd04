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

#include "canyon/pipeline.hpp"
#include "canyon/kernels.hpp"
#include "canyon/units.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace canyon
{
    namespace
    {
        std::string lower(std::string s)
        {
            std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
            return s;
        }

        std::ofstream open_out(const fs::path &path)
        {
            std::error_code ec;
            fs::create_directories(path.parent_path(), ec);
            std::ofstream out(path);
            if (!out)
                throw IoError("cannot write " + path.string());
            return out;
        }

        void write_json(const fs::path &path, const nlohmann::json &j)
        {
            auto out = open_out(path);
            out << j.dump(2) << '\n';
        }

        // Runs fn, rethrowing anything but PipelineError as a stage failure.
        template <typename F>
        auto stage(const std::string &name, const std::string &id, bool input, F &&fn)
        {
            try
            {
                return fn();
            }
            catch (const PipelineError &)
            {
                throw;
            }
            catch (const std::exception &e)
            {
                throw PipelineError(name, id, e.what(), input);
            }
        }

        PowerGrid to_power(const MeasurementGrid &g)
        {
            PowerGrid p = compute_ddadps(ctf_to_cir(g));
            const double s = path_gain_scale(g.band);
            for (auto &v : p.power.flat())
                v *= s;
            return p;
        }

        BandAnalysis finish_band(const PowerGrid &filtered, const NoiseEstimate &est, const AnalyzeConfig &cfg,
                                 BandTag tag)
        {
            BandAnalysis b;
            b.filtered = filtered;
            b.noise = est;
            ExtractionOptions eo;
            eo.max_paths = cfg.max_paths;
            eo.stop_db = cfg.stop_db;
            eo.noise_sigma2 = est.sigma2;
            eo.guard_sigma = cfg.guard_sigma;
            eo.detection_threshold = est.threshold_common;
            eo.window_cells = cfg.window_cells;
            eo.band = tag;
            b.mpcs = extract_mpcs(filtered, eo);
            return b;
        }

        void fill_lsp(BandAnalysis &b, const std::string &id, const ClusterSet &band_clusters, int los_id,
                      const AnalyzeConfig &cfg)
        {
            auto &r = b.lsp;
            r.rx_id = id;
            r.band = b.filtered.band.name;
            r.pl_db = omni_path_loss(b.filtered, beam_overlap_gain(b.filtered.angles, b.filtered.band));
            const double floor_db = to_db(b.noise.threshold_common);
            r.ds_s = delay_spread(acceptance_filter(power_delay_profile(b.filtered), cfg.acceptance_window_db, floor_db));
            r.asd_rad = angular_spread(
                acceptance_filter(power_angular_profile(b.filtered, Side::Tx), cfg.acceptance_window_db, floor_db));
            r.asa_rad = angular_spread(
                acceptance_filter(power_angular_profile(b.filtered, Side::Rx), cfg.acceptance_window_db, floor_db));
            r.k_factor_db = k_factor(band_clusters, los_id, cfg.kf_printed_ratio);
            r.dr_db = b.noise_report.dr_db;
            r.sfdr_db = b.noise_report.sfdr_db;
        }

        void write_pdp_row(std::ostream &out, const std::string &id, double distance, const Pdp &pdp)
        {
            out << id << ',' << distance;
            for (double v : pdp.power)
                out << ',' << to_db(v);
            out << '\n';
        }

        void write_pdp_header(std::ostream &out, const std::vector<double> &delay_s)
        {
            out << "rx_id,distance_m";
            for (double d : delay_s)
                out << ',' << d * 1e9;
            out << '\n';
        }

        std::vector<std::string> selected_band_names(BandSelection b)
        {
            switch (b)
            {
            case BandSelection::Low:
                return {"154GHz"};
            case BandSelection::High:
                return {"300GHz"};
            case BandSelection::Both:
                return {"154GHz", "300GHz"};
            }
            return {};
        }

        bool band_matches(BandSelection sel, const std::string &name)
        {
            const auto n = lower(name);
            if (sel == BandSelection::Both)
                return true;
            return n.find(sel == BandSelection::Low ? "154" : "300") != std::string::npos;
        }

        template <typename T>
        T get_or(const nlohmann::json &j, const char *key, T fallback)
        {
            return j.contains(key) ? j.at(key).get<T>() : fallback;
        }
    } // namespace

    std::string to_string(BandSelection b)
    {
        switch (b)
        {
        case BandSelection::Low:
            return "154ghz";
        case BandSelection::High:
            return "300ghz";
        case BandSelection::Both:
            return "both";
        }
        return "";
    }

    BandSelection band_selection_from_string(const std::string &s)
    {
        const auto k = lower(s);
        if (k == "154ghz")
            return BandSelection::Low;
        if (k == "300ghz")
            return BandSelection::High;
        if (k == "both")
            return BandSelection::Both;
        throw std::invalid_argument("band must be 154ghz, 300ghz or both");
    }

    unsigned worker_count()
    {
        if (const char *env = std::getenv("CANYON_QD_THREADS"))
        {
            const int n = std::atoi(env);
            if (n > 0)
                return static_cast<unsigned>(n);
        }
        return std::max(1u, std::thread::hardware_concurrency());
    }

    void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn)
    {
        const std::size_t workers = std::min<std::size_t>(worker_count(), n);
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::exception_ptr first;
        std::mutex mu;
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&]
                              {
                                  for (std::size_t i; !failed && (i = next++) < n;)
                                  {
                                      try
                                      {
                                          fn(i);
                                      }
                                      catch (...)
                                      {
                                          std::lock_guard lock(mu);
                                          if (!first)
                                              first = std::current_exception();
                                          failed = true;
                                      }
                                  } });
        pool.clear();
        if (first)
            std::rethrow_exception(first);
    }

    Manifest load_manifest(const fs::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw PipelineError("config", "", "cannot open manifest " + path.string(), true);
        Manifest m;
        try
        {
            const auto j = nlohmann::json::parse(in);
            if (j.contains("k"))
                m.k = j.at("k").get<int>();
            const fs::path base = path.parent_path();
            auto resolve = [&](const std::string &p)
            { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
            for (const auto &e : j.at("pairs"))
            {
                GridPairEntry g;
                g.id = e.value("id", "pos" + std::to_string(m.pairs.size() + 1));
                if (e.contains("f1") && !e.at("f1").is_null())
                    g.f1 = resolve(e.at("f1").get<std::string>());
                if (e.contains("f2") && !e.at("f2").is_null())
                    g.f2 = resolve(e.at("f2").get<std::string>());
                if (e.contains("expected_los_delay_s"))
                    g.expected_los_delay_s = e.at("expected_los_delay_s").get<double>();
                m.pairs.push_back(g);
            }
        }
        catch (const nlohmann::json::exception &e)
        {
            throw PipelineError("config", "", std::string("manifest: ") + e.what(), true);
        }
        if (m.pairs.empty())
            throw PipelineError("config", "", "manifest lists no grid pairs", true);
        return m;
    }

    PairAnalysis analyze_pair(const std::string &id, const std::optional<MeasurementGrid> &g1,
                              const std::optional<MeasurementGrid> &g2, const AnalyzeConfig &cfg,
                              std::optional<double> expected_los_delay_s)
    {
        if (!g1 && !g2)
            throw PipelineError("load", id, "no grid for this position", true);
        PairAnalysis pa;
        pa.id = id;
        pa.distance_m = g1 ? g1->tx_rx_distance_m : g2->tx_rx_distance_m;

        std::optional<PowerGrid> p1, p2;
        stage("transform", id, false, [&]
              {
                  if (g1)
                      p1 = to_power(*g1);
                  if (g2)
                      p2 = to_power(*g2);
                  return 0; });

        NoiseOptions no;
        no.nu = cfg.nu;
        stage("noise", id, false, [&]
              {
                  std::optional<NoiseEstimate> e1, e2;
                  if (p1)
                      e1 = estimate_noise(*p1, no);
                  if (p2)
                      e2 = estimate_noise(*p2, no);
                  std::optional<PowerGrid> f1, f2;
                  NoiseReport r1, r2;
                  if (p1 && p2)
                  {
                      const auto th = dual_band_thresholds(*p1, *p2, *e1, *e2, cfg.xi_db);
                      f1 = apply_threshold(*p1, th.band1);
                      f2 = apply_threshold(*p2, th.band2);
                      r1 = make_noise_report(*p1, *e1);
                      r2 = make_noise_report(*p2, *e2);
                      r1.raised_bins = th.raised1;
                      r1.lowered_bins = th.lowered1;
                      r1.conflict_bins = th.conflicts1;
                      r2.raised_bins = th.raised2;
                      r2.lowered_bins = th.lowered2;
                      r2.conflict_bins = th.conflicts2;
                  }
                  else if (p1)
                  {
                      f1 = apply_threshold(*p1, ThresholdProfile::uniform(p1->power.dim0(), e1->threshold_common, cfg.xi_db));
                      r1 = make_noise_report(*p1, *e1);
                  }
                  else
                  {
                      f2 = apply_threshold(*p2, ThresholdProfile::uniform(p2->power.dim0(), e2->threshold_common, cfg.xi_db));
                      r2 = make_noise_report(*p2, *e2);
                  }
                  stage("extract", id, false, [&]
                        {
                            if (f1)
                            {
                                pa.f1 = finish_band(*f1, *e1, cfg, BandTag::F1);
                                pa.f1->noise_report = r1;
                            }
                            if (f2)
                            {
                                pa.f2 = finish_band(*f2, *e2, cfg, BandTag::F2);
                                pa.f2->noise_report = r2;
                            }
                            return 0; });
                  return 0; });

        stage("cluster", id, false, [&]
              {
                  const auto merged = merge_bands(pa.f1 ? pa.f1->mpcs : std::vector<Mpc>{},
                                                  pa.f2 ? pa.f2->mpcs : std::vector<Mpc>{});
                  if (merged.empty())
                      throw std::runtime_error("no MPCs survived extraction");
                  pa.k_used = std::min<int>(cfg.k, static_cast<int>(merged.size()));
                  KpmOptions ko;
                  ko.delay_weight = cfg.delay_weight;
                  pa.clusters = cluster_kpm(merged, pa.k_used, cfg.seed, ko);
                  pa.cluster_report = cluster_stats(pa.clusters, expected_los_delay_s);
                  return 0; });

        stage("lsp", id, false, [&]
              {
                  const auto [c1, c2] = split_bands(pa.clusters);
                  const int los = pa.cluster_report.los_cluster_id;
                  if (pa.f1)
                      fill_lsp(*pa.f1, id, c1, los, cfg);
                  if (pa.f2)
                      fill_lsp(*pa.f2, id, c2, los, cfg);
                  return 0; });
        return pa;
    }

    AnalyzeResult cmd_analyze(const AnalyzeConfig &cfg)
    {
        if (cfg.k < 1)
            throw PipelineError("config", "", "k must be at least 1", true);
        const Manifest m = load_manifest(cfg.manifest);
        AnalyzeConfig run = cfg;
        if (m.k)
            run.k = *m.k;

        for (const auto &e : m.pairs)
        {
            const bool need1 = cfg.bands != BandSelection::High;
            const bool need2 = cfg.bands != BandSelection::Low;
            if (need1 && need2 && (!e.f1 || !e.f2) && !cfg.single_band)
                throw PipelineError("load", e.id, "missing grid for one band (use --single-band to run on one band)", true);
        }

        AnalyzeResult res;
        res.pairs.resize(m.pairs.size());
        parallel_for(m.pairs.size(), [&](std::size_t i)
                     {
                         const auto &e = m.pairs[i];
                         std::optional<MeasurementGrid> g1, g2;
                         stage("load", e.id, true, [&]
                               {
                                   if (e.f1 && cfg.bands != BandSelection::High)
                                       g1 = load_grid(*e.f1);
                                   if (e.f2 && cfg.bands != BandSelection::Low)
                                       g2 = load_grid(*e.f2);
                                   return 0; });
                         res.pairs[i] = analyze_pair(e.id, g1, g2, run, e.expected_los_delay_s); });

        stage("write", "", false, [&]
              {
                  const fs::path out = cfg.out_dir;
                  std::map<std::string, std::ofstream> pdp_mats;
                  auto scatter = open_out(out / "cluster_scatter.csv");
                  scatter << "rx_id,";
                  auto pl = open_out(out / "pl.csv");
                  std::vector<PathLossSample> pl_samples;
                  nlohmann::json lsps = nlohmann::json::array();
                  std::ostringstream mpc_header;
                  write_mpc_csv(mpc_header, {});
                  scatter << mpc_header.str();
                  for (const auto &pa : res.pairs)
                  {
                      const fs::path dir = out / pa.id;
                      const auto [c1, c2] = split_bands(pa.clusters);
                      std::vector<Mpc> all = c1.mpcs;
                      all.insert(all.end(), c2.mpcs.begin(), c2.mpcs.end());
                      {
                          auto f = open_out(dir / "mpcs.csv");
                          write_mpc_csv(f, all);
                          std::ostringstream rows;
                          write_mpc_csv(rows, all);
                          std::string body = rows.str();
                          body = body.substr(body.find('\n') + 1);
                          std::istringstream lines(body);
                          for (std::string line; std::getline(lines, line);)
                              scatter << pa.id << ',' << line << '\n';
                      }
                      nlohmann::json cj = to_json(pa.cluster_report);
                      cj["k_requested"] = run.k;
                      cj["k_used"] = pa.k_used;
                      cj["objective_history"] = pa.clusters.objective_history;
                      nlohmann::json cents = nlohmann::json::array();
                      for (const auto &c : pa.clusters.centroids)
                          cents.push_back({{"tau_s", c.delay_s}, {"aod_deg", c.aod_deg}, {"aoa_deg", c.aoa_deg}});
                      cj["centroids"] = cents;
                      write_json(dir / "clusters.json", cj);

                      using Entry = std::pair<std::string, const BandAnalysis *>;
                      for (const auto &[key, b] : {Entry{"f1", pa.f1 ? &*pa.f1 : nullptr}, Entry{"f2", pa.f2 ? &*pa.f2 : nullptr}})
                      {
                          if (!b)
                              continue;
                          write_json(dir / ("noise_" + key + ".json"), to_json(b->noise_report));
                          write_json(dir / ("lsp_" + key + ".json"), to_json(b->lsp));
                          lsps.push_back(to_json(b->lsp));
                          const auto pdp = power_delay_profile(b->filtered);
                          {
                              auto f = open_out(dir / ("pdp_" + key + ".csv"));
                              write_pdp_csv(f, pdp);
                          }
                          for (auto side : {Side::Tx, Side::Rx})
                          {
                              auto f = open_out(dir / ("pap_" + std::string(side == Side::Tx ? "tx_" : "rx_") + key + ".csv"));
                              write_pap_csv(f, power_angular_profile(b->filtered, side));
                          }
                          auto it = pdp_mats.find(key);
                          if (it == pdp_mats.end())
                          {
                              it = pdp_mats.emplace(key, open_out(out / ("pdp_matrix_" + key + ".csv"))).first;
                              write_pdp_header(it->second, pdp.delay_s);
                          }
                          write_pdp_row(it->second, pa.id, pa.distance_m, pdp);
                          pl_samples.push_back({pa.distance_m, b->lsp.pl_db, b->lsp.band, Scenario::LoS});
                      }
                  }
                  write_pl_csv(pl, pl_samples);
                  write_json(out / "lsp.json", lsps);
                  nlohmann::json rc = to_json(run);
                  write_run_json(out, "analyze", rc);
                  return 0; });
        return res;
    }

    SynthesizeResult cmd_synthesize(const SynthesizeConfig &cfg)
    {
        if (cfg.count == 0)
            throw PipelineError("config", "", "count must be positive", true);
        const QdModelParams params = stage("config", "", true, [&] { return params_from_json(cfg.params_override); });
        const SceneDescription desc = stage("config", "", true, [&]
                                            {
                                                if (cfg.scene)
                                                    return load_scene(*cfg.scene);
                                                SceneDescription d;
                                                d.scene = GeometryScene::street_canyon(cfg.rx_x_m);
                                                d.scene.validate();
                                                d.receivers.push_back({"Rx1", d.scene.rx});
                                                return d; });

        SynthesizeResult res;
        SynthesisOptions opt;
        opt.include_random = cfg.include_random;
        const std::size_t nrx = desc.receivers.size();
        for (const auto &name : selected_band_names(cfg.bands))
        {
            const BandConfig band = BandConfig::preset(name);
            const auto &bp = stage("config", "", true, [&]() -> const BandQdParams & { return params.for_band(name); });
            std::vector<CirRealization> reals;
            stage("synthesize", name, false, [&]
                  {
                      if (cfg.trajectory)
                      {
                          std::vector<std::vector<CirRealization>> runs(cfg.count);
                          parallel_for(cfg.count, [&](std::size_t i)
                                       { runs[i] = synthesize_trajectory(desc, band, params, cfg.seed + i * nrx, opt); });
                          for (auto &r : runs)
                              reals.insert(reals.end(), r.begin(), r.end());
                      }
                      else
                      {
                          reals.resize(cfg.count);
                          parallel_for(cfg.count, [&](std::size_t i)
                                       { reals[i] = synthesize(desc.at(i % nrx), band, params, cfg.seed + i, opt); });
                      }
                      return 0; });

            BandSynthesisSummary s;
            s.band = name;
            s.realizations = reals.size();
            s.expected_presence_nw = stationary_presence(present_first(bp.markov_nw, params.state_order));
            s.expected_presence_sw = stationary_presence(present_first(bp.markov_sw, params.state_order));
            s.expected_interarrival_ns = bp.arrival_mean_ns;
            double window_ns = 0.0, frac = 0.0, los = 0.0;
            std::size_t nw = 0, sw = 0;
            for (const auto &r : reals)
            {
                double pr = 0.0, pt = 0.0;
                for (const auto &p : r.paths)
                {
                    const double lin = from_db(p.gain_db);
                    pt += lin;
                    if (p.kind == PathKind::Random)
                    {
                        pr += lin;
                        ++s.random_paths;
                    }
                    if (p.kind == PathKind::LoS)
                        los += p.gain_db;
                }
                frac += pt > 0.0 ? pr / pt : 0.0;
                window_ns += r.random_window_s * 1e9;
                nw += r.nw_present.value_or(false) ? 1 : 0;
                sw += r.sw_present.value_or(false) ? 1 : 0;
            }
            const double n = static_cast<double>(reals.size());
            s.mean_los_pg_db = los / n;
            s.presence_nw = static_cast<double>(nw) / n;
            s.presence_sw = static_cast<double>(sw) / n;
            s.random_power_fraction = frac / n;
            s.interarrival_mean_ns = s.random_paths ? window_ns / static_cast<double>(s.random_paths) : 0.0;
            res.summaries.push_back(s);
            res.realizations.push_back(std::move(reals));
        }

        stage("write", "", false, [&]
              {
                  const fs::path out = cfg.out_dir;
                  nlohmann::json summary = nlohmann::json::array();
                  for (std::size_t b = 0; b < res.summaries.size(); ++b)
                  {
                      const auto &s = res.summaries[b];
                      const auto &reals = res.realizations[b];
                      {
                          auto f = open_out(out / ("realizations_" + s.band + ".csv"));
                          write_realization_csv(f, reals);
                      }
                      const BandConfig band = BandConfig::preset(s.band);
                      const AngleGrid grid = AngleGrid::preset();
                      const std::size_t nr = std::min(cfg.render_count, reals.size());
                      if (nr > 0)
                      {
                          std::vector<Pdp> pdps(nr);
                          parallel_for(nr, [&](std::size_t i) { pdps[i] = render_pdp(reals[i], band, grid); });
                          auto f = open_out(out / ("pdp_" + s.band + ".csv"));
                          f << "seed,distance_m";
                          for (double d : pdps.front().delay_s)
                              f << ',' << d * 1e9;
                          f << '\n';
                          for (std::size_t i = 0; i < nr; ++i)
                              write_pdp_row(f, std::to_string(reals[i].seed), reals[i].distance_m, pdps[i]);
                      }
                      summary.push_back({{"band", s.band},
                                         {"realizations", s.realizations},
                                         {"mean_los_pg_db", s.mean_los_pg_db},
                                         {"presence_nw", s.presence_nw},
                                         {"presence_sw", s.presence_sw},
                                         {"expected_presence_nw", s.expected_presence_nw},
                                         {"expected_presence_sw", s.expected_presence_sw},
                                         {"random_paths", s.random_paths},
                                         {"interarrival_mean_ns", s.interarrival_mean_ns},
                                         {"expected_interarrival_ns", s.expected_interarrival_ns},
                                         {"random_power_fraction", s.random_power_fraction}});
                  }
                  write_json(out / "summary.json", summary);
                  nlohmann::json rc = to_json(cfg);
                  rc["params_override"] = to_json(params); // resolved
                  write_run_json(out, "synthesize", rc);
                  return 0; });
        return res;
    }

    std::vector<FitGroup> cmd_fit(const FitConfig &cfg)
    {
        const auto samples = stage("load", cfg.input.string(), true, [&]
                                   {
                                       std::ifstream in(cfg.input);
                                       if (!in)
                                           throw std::invalid_argument("cannot open " + cfg.input.string());
                                       return read_pl_csv(in); });
        std::map<std::pair<std::string, int>, std::vector<PathLossSample>> groups;
        for (const auto &s : samples)
            if (band_matches(cfg.bands, s.band))
                groups[{s.band, static_cast<int>(s.scenario)}].push_back(s);
        if (groups.empty())
            throw PipelineError("fit", cfg.input.string(), "no samples for the selected band", true);

        std::vector<FitGroup> out;
        for (const auto &[key, g] : groups)
        {
            const std::string id = key.first + "/" + to_string(static_cast<Scenario>(key.second));
            FitGroup fg;
            fg.band = key.first;
            fg.scenario = static_cast<Scenario>(key.second);
            const double fc = stage("fit", id, true, [&]
                                    {
                                        if (cfg.fc_hz)
                                            return *cfg.fc_hz;
                                        return BandConfig::preset(key.first).center_frequency_hz; });
            fg.ci = stage("fit", id, true, [&] { return fit_ci(g, fc); });
            fg.fi = stage("fit", id, true, [&] { return fit_fi(g); });
            out.push_back(fg);
        }

        stage("write", "", false, [&]
              {
                  nlohmann::json j = nlohmann::json::array();
                  for (const auto &g : out)
                      j.push_back({{"band", g.band}, {"scenario", to_string(g.scenario)}, {"ci", to_json(g.ci)}, {"fi", to_json(g.fi)}});
                  write_json(cfg.out_dir / "fits.json", j);
                  write_run_json(cfg.out_dir, "fit", to_json(cfg));
                  return 0; });
        return out;
    }

    nlohmann::json cmd_report(const ReportConfig &cfg)
    {
        if (!fs::is_directory(cfg.analysis_dir))
            throw PipelineError("load", cfg.analysis_dir.string(), "not a directory", true);
        std::vector<fs::path> files;
        for (const auto &e : fs::recursive_directory_iterator(cfg.analysis_dir))
        {
            const auto name = e.path().filename().string();
            if (e.is_regular_file() && name.rfind("lsp_", 0) == 0 && e.path().extension() == ".json")
                files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty())
            throw PipelineError("load", cfg.analysis_dir.string(), "no LSP reports found", true);

        const std::vector<std::string> cols{"pl_db", "ds_ns", "asd_deg", "asa_deg", "kf_db", "dr_db", "sfdr_db"};
        std::vector<nlohmann::json> rows;
        for (const auto &f : files)
        {
            rows.push_back(stage("load", f.string(), true, [&]
                                 {
                                     std::ifstream in(f);
                                     return nlohmann::json::parse(in); }));
        }

        std::map<std::string, std::map<std::string, std::pair<double, int>>> acc;
        for (const auto &r : rows)
            for (const auto &c : cols)
                if (r.contains(c) && r.at(c).is_number())
                {
                    auto &a = acc[r.value("band", "")][c];
                    a.first += r.at(c).get<double>();
                    a.second += 1;
                }

        nlohmann::json report = nlohmann::json::object();
        for (const auto &[band, m] : acc)
            for (const auto &[c, a] : m)
                report[band]["mean_" + c] = a.first / a.second;
        report["positions"] = rows.size();

        stage("write", "", false, [&]
              {
                  auto out = open_out(cfg.out_dir / "lsp_summary.csv");
                  out << "rx_id,band";
                  for (const auto &c : cols)
                      out << ',' << c;
                  out << '\n'
                      << std::setprecision(10);
                  for (const auto &r : rows)
                  {
                      out << r.value("rx_id", "") << ',' << r.value("band", "");
                      for (const auto &c : cols)
                      {
                          out << ',';
                          if (r.contains(c) && r.at(c).is_number())
                              out << r.at(c).get<double>();
                          else
                              out << "undefined";
                      }
                      out << '\n';
                  }
                  write_json(cfg.out_dir / "report.json", report);
                  write_run_json(cfg.out_dir, "report", to_json(cfg));
                  return 0; });
        return report;
    }

    nlohmann::json to_json(const AnalyzeConfig &c)
    {
        return {{"manifest", c.manifest.string()},
                {"out_dir", c.out_dir.string()},
                {"band", to_string(c.bands)},
                {"single_band", c.single_band},
                {"seed", c.seed},
                {"k", c.k},
                {"xi_db", c.xi_db},
                {"nu", c.nu},
                {"max_paths", c.max_paths},
                {"stop_db", c.stop_db},
                {"guard_sigma", c.guard_sigma},
                {"window_cells", c.window_cells},
                {"delay_weight", c.delay_weight},
                {"acceptance_window_db", c.acceptance_window_db},
                {"kf_printed_ratio", c.kf_printed_ratio}};
    }

    nlohmann::json to_json(const SynthesizeConfig &c)
    {
        return {{"out_dir", c.out_dir.string()},
                {"band", to_string(c.bands)},
                {"seed", c.seed},
                {"count", c.count},
                {"params_override", c.params_override},
                {"scene", c.scene ? nlohmann::json(c.scene->string()) : nlohmann::json(nullptr)},
                {"rx_x_m", c.rx_x_m},
                {"trajectory", c.trajectory},
                {"include_random", c.include_random},
                {"render_count", c.render_count}};
    }

    nlohmann::json to_json(const FitConfig &c)
    {
        return {{"input", c.input.string()},
                {"out_dir", c.out_dir.string()},
                {"band", to_string(c.bands)},
                {"fc_hz", c.fc_hz ? nlohmann::json(*c.fc_hz) : nlohmann::json(nullptr)}};
    }

    nlohmann::json to_json(const ReportConfig &c)
    {
        return {{"analysis_dir", c.analysis_dir.string()}, {"out_dir", c.out_dir.string()}};
    }

    AnalyzeConfig analyze_config_from_json(const nlohmann::json &j)
    {
        AnalyzeConfig c;
        c.manifest = j.at("manifest").get<std::string>();
        c.out_dir = get_or<std::string>(j, "out_dir", c.out_dir.string());
        c.bands = band_selection_from_string(get_or<std::string>(j, "band", "both"));
        c.single_band = get_or(j, "single_band", c.single_band);
        c.seed = get_or(j, "seed", c.seed);
        c.k = get_or(j, "k", c.k);
        c.xi_db = get_or(j, "xi_db", c.xi_db);
        c.nu = get_or(j, "nu", c.nu);
        c.max_paths = get_or(j, "max_paths", c.max_paths);
        c.stop_db = get_or(j, "stop_db", c.stop_db);
        c.guard_sigma = get_or(j, "guard_sigma", c.guard_sigma);
        c.window_cells = get_or(j, "window_cells", c.window_cells);
        c.delay_weight = get_or(j, "delay_weight", c.delay_weight);
        c.acceptance_window_db = get_or(j, "acceptance_window_db", c.acceptance_window_db);
        c.kf_printed_ratio = get_or(j, "kf_printed_ratio", c.kf_printed_ratio);
        return c;
    }

    SynthesizeConfig synthesize_config_from_json(const nlohmann::json &j)
    {
        SynthesizeConfig c;
        c.out_dir = get_or<std::string>(j, "out_dir", c.out_dir.string());
        c.bands = band_selection_from_string(get_or<std::string>(j, "band", "154ghz"));
        c.seed = get_or(j, "seed", c.seed);
        c.count = get_or(j, "count", c.count);
        if (j.contains("params_override"))
            c.params_override = j.at("params_override");
        if (j.contains("scene") && !j.at("scene").is_null())
            c.scene = j.at("scene").get<std::string>();
        c.rx_x_m = get_or(j, "rx_x_m", c.rx_x_m);
        c.trajectory = get_or(j, "trajectory", c.trajectory);
        c.include_random = get_or(j, "include_random", c.include_random);
        c.render_count = get_or(j, "render_count", c.render_count);
        return c;
    }

    FitConfig fit_config_from_json(const nlohmann::json &j)
    {
        FitConfig c;
        c.input = j.at("input").get<std::string>();
        c.out_dir = get_or<std::string>(j, "out_dir", c.out_dir.string());
        c.bands = band_selection_from_string(get_or<std::string>(j, "band", "both"));
        if (j.contains("fc_hz") && !j.at("fc_hz").is_null())
            c.fc_hz = j.at("fc_hz").get<double>();
        return c;
    }

    ReportConfig report_config_from_json(const nlohmann::json &j)
    {
        ReportConfig c;
        c.analysis_dir = j.at("analysis_dir").get<std::string>();
        c.out_dir = get_or<std::string>(j, "out_dir", c.out_dir.string());
        return c;
    }

    void write_run_json(const fs::path &out_dir, const std::string &command, const nlohmann::json &config)
    {
        write_json(out_dir / "run.json", {{"tool", "canyon-qd"}, {"command", command}, {"config", config}});
    }
} // namespace canyon
