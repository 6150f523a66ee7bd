/*
 * Copyright 2026 The linksim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "linksim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>

#include "linksim/errors.hpp"

namespace linksim {

RunConfig with_overrides(RunConfig base, const Overrides& o) {
  for (const auto& [k, v] : o) base.set(k, v);
  return base;
}

const std::vector<Variant>& transformer_systems() {
  static const std::vector<Variant> systems = {
      {"pcie2", {{"pcie.lanes", "4"}, {"pcie.lane_rate_gbps", "4"}}},
      {"pcie8", {{"pcie.lanes", "8"}, {"pcie.lane_rate_gbps", "8"}}},
      {"pcie64", {{"pcie.lanes", "16"}, {"pcie.lane_rate_gbps", "32"}}},
      {"devmem", {{"mode", "devmem"}, {"mem.placement", "device"}, {"mem.preset", "hbm2"}}},
  };
  return systems;
}

namespace {

double threshold_nongemm_percent(const ThresholdResult& t) {
  if (t.crossing) return 100.0 * t.w_nongemm();
  // DevMem wins at every mix: the Non-GEMM share it tolerates is 100 %.
  return t.dominant == "devmem" ? 100.0 : 0.0;
}

}  // namespace

TransformerSummary summarize_transformer(const std::vector<SimReport>& s) {
  if (s.size() != 4) throw SimulationFault("transformer summary needs the four reference systems");
  const SimReport& dev = s[3];
  TransformerSummary t;
  t.speedup_64_over_2 = s[0].total_ns / s[2].total_ns;
  t.devmem_over_64 = dev.total_ns / s[2].total_ns;
  const double best_ng = std::min({s[0].nongemm_ns, s[1].nongemm_ns, s[2].nongemm_ns});
  t.nongemm_ratio = dev.nongemm_ns / best_ng;
  t.devmem_nongemm_share = dev.nongemm_ns / dev.total_ns;
  t.devmem_wins_gemm = dev.gemm_ns < s[0].gemm_ns && dev.gemm_ns < s[1].gemm_ns && dev.gemm_ns < s[2].gemm_ns;
  for (int i = 0; i < 3; ++i) t.thresholds.push_back(devmem_threshold(PhaseTimes::from(dev), PhaseTimes::from(s[i])));
  return t;
}

std::string plot_data(const Series& s) {
  std::ostringstream os;
  os << "# " << s.name << '\n';
  for (const auto& [x, y] : s.points) os << format_number(x) << ' ' << format_number(y) << '\n';
  return os.str();
}

Overrides packet_recipe_overrides() {
  // 264 ns per tile: well inside the memory-bound region at 8 GB/s.
  return {{"workload.kind", "gemm"}, {"workload.n", "1024"}, {"accel.compute_scale", "0.25"}};
}

Overrides memory_recipe_overrides() {
  return {{"workload.kind", "gemm"}, {"workload.n", "1024"},     {"mode", "devmem"},
          {"mem.placement", "device"}, {"mem.preset", "hbm2"}, {"accel.compute_scale", "0.45"}};
}

std::vector<RunConfig> packet_sweep_configs(const RunConfig& base, double link_gbps,
                                            const std::vector<std::uint32_t>& packets) {
  std::vector<RunConfig> out;
  for (std::uint32_t p : packets) {
    out.push_back(with_overrides(base, {{"pcie.lanes", "8"},
                                        {"pcie.lane_rate_gbps", format_number(link_gbps)},
                                        {"pcie.packet_bytes", std::to_string(p)}}));
  }
  return out;
}

namespace {

std::string fmt(double v, int prec = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(prec);
  os << v;
  return os.str();
}

double fastest(const std::vector<SimReport>& rs) {
  double f = std::numeric_limits<double>::infinity();
  for (const auto& r : rs) f = std::min(f, r.total_ns);
  return f;
}

void append(std::vector<SimReport>& to, const std::vector<SimReport>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

FigureResult fig2(const RunConfig& base, const FigureOptions& opt) {
  const RunConfig cfg = with_overrides(
      base, {{"workload.kind", "gemm"}, {"workload.n", "1024"}, {"pcie.lanes", "8"}, {"pcie.lane_rate_gbps", "8"}});
  const std::vector<double> times =
      opt.quick ? std::vector<double>{250, 500, 750, 1000, 1500, 3000}
                : std::vector<double>{125, 250, 375, 500, 625, 750, 875, 1000, 1250, 1500, 2000, 3000, 4000};
  const RooflineResult r = roofline_sweep(cfg, times, opt.jobs);
  FigureResult f{"fig2", r.reports, {}, {}};
  Series total{"total", {}}, halved{"halved", {}}, comp{"compute_bound", {}}, xfer{"transfer_bound", {}};
  const double best = fastest(r.reports);
  for (const auto& p : r.points) {
    total.points.emplace_back(p.compute_time_ns, p.total_ns / best);
    halved.points.emplace_back(p.compute_time_ns, p.halved_total_ns / best);
    comp.points.emplace_back(p.compute_time_ns, p.compute_bound_ns / best);
    xfer.points.emplace_back(p.compute_time_ns, p.transfer_bound_ns / best);
    f.summary.push_back("per-tile " + fmt(p.compute_time_ns, 0) + " ns: " + to_string(p.region) + " bound, normalized " +
                        fmt(p.normalized_exec_time));
  }
  f.series = {total, halved, comp, xfer};
  f.summary.push_back(r.crossover_ns ? "crossover " + fmt(*r.crossover_ns, 0) + " ns per tile" : r.note);
  return f;
}

FigureResult fig3(const RunConfig& base, const FigureOptions& opt) {
  const RunConfig cfg =
      with_overrides(base, {{"workload.kind", "gemm"}, {"workload.n", opt.quick ? "1024" : "2048"}});
  const std::vector<std::string> lanes = {"2", "4", "8", "16"};
  const std::vector<std::string> rates = {"2", "4", "8", "16", "32", "64"};
  const auto cfgs = expand_sweep(cfg, {{"pcie.lanes", lanes}, {"pcie.lane_rate_gbps", rates}});
  FigureResult f{"fig3", run_all(cfgs, opt.jobs), {}, {}};
  const double best = fastest(f.reports);
  double slowest = 0.0;
  for (const auto& l : lanes) {
    Series s{"lanes_" + l, {}};
    for (const auto& r : f.reports) {
      if (r.config.get("pcie.lanes") != l) continue;
      s.points.emplace_back(r.config.get_double("pcie.lane_rate_gbps"), r.total_ns / best);
      slowest = std::max(slowest, r.total_ns);
    }
    f.series.push_back(std::move(s));
  }
  f.summary.push_back("slowest / fastest = " + fmt(slowest / best) + "x");
  return f;
}

FigureResult fig4(const RunConfig& base, const FigureOptions& opt) {
  const RunConfig cfg = with_overrides(base, packet_recipe_overrides());
  const std::vector<double> bws = opt.quick ? std::vector<double>{8} : std::vector<double>{4, 8, 16, 32, 64};
  const std::vector<std::uint32_t> packets =
      opt.quick ? std::vector<std::uint32_t>{64, 256, 1024, 4096} : kPacketSizes;
  FigureResult f{"fig4", {}, {}, {}};
  for (double bw : bws) {
    const auto rs = run_all(packet_sweep_configs(cfg, bw, packets), opt.jobs);
    const double best = fastest(rs);
    Series s{"bw_" + format_number(bw) + "GBps", {}};
    std::string line = format_number(bw) + " GB/s overhead:";
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const double o = 100.0 * (rs[i].total_ns / best - 1.0);
      s.points.emplace_back(packets[i], rs[i].total_ns / best);
      line += " " + std::to_string(packets[i]) + "B=" + fmt(o, 1) + "%";
    }
    f.summary.push_back(line);
    f.series.push_back(std::move(s));
    append(f.reports, rs);
  }
  return f;
}

FigureResult fig5(const RunConfig& base, const FigureOptions& opt) {
  const RunConfig cfg =
      with_overrides(base, {{"workload.kind", "gemm"}, {"workload.n", opt.quick ? "512" : "1024"}});
  const std::vector<std::string> presets =
      opt.quick ? std::vector<std::string>{"ddr4", "hbm2"}
                : std::vector<std::string>{"ddr3", "ddr4", "ddr5", "hbm2", "gddr6"};
  const std::vector<Variant> systems = {
      {"host_2GBps", {{"pcie.lanes", "4"}, {"pcie.lane_rate_gbps", "4"}}},
      {"host_64GBps", {{"pcie.lanes", "16"}, {"pcie.lane_rate_gbps", "32"}}},
      {"devmem", {{"mode", "devmem"}, {"mem.placement", "device"}}},
  };
  std::vector<RunConfig> cfgs;
  for (const auto& p : presets) {
    for (const auto& s : systems) cfgs.push_back(with_overrides(with_overrides(cfg, {{"mem.preset", p}}), s.overrides));
  }
  FigureResult f{"fig5", run_all(cfgs, opt.jobs), {}, {}};
  const double best = fastest(f.reports);
  for (std::size_t j = 0; j < systems.size(); ++j) {
    Series s{systems[j].name, {}};
    for (std::size_t i = 0; i < presets.size(); ++i) s.points.emplace_back(i, f.reports[i * 3 + j].total_ns / best);
    f.series.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < presets.size(); ++i) {
    const double h2 = f.reports[i * 3].total_ns, h64 = f.reports[i * 3 + 1].total_ns, d = f.reports[i * 3 + 2].total_ns;
    f.summary.push_back("x=" + std::to_string(i) + " " + presets[i] + ": host@64 reaches " + fmt(100.0 * d / h64, 1) +
                        "% of DevMem, DevMem speedup over host@2 " + fmt(h2 / d, 2) + "x");
  }
  return f;
}

FigureResult fig6(const RunConfig& base, const FigureOptions& opt) {
  const RunConfig cfg = with_overrides(base, memory_recipe_overrides());
  const std::vector<std::string> bws =
      opt.quick ? std::vector<std::string>{"8", "50", "256"}
                : std::vector<std::string>{"8", "16", "32", "50", "64", "128", "256"};
  const std::vector<std::string> lats =
      opt.quick ? std::vector<std::string>{"1", "36"} : std::vector<std::string>{"1", "6", "12", "18", "24", "30", "36"};
  std::vector<RunConfig> cfgs;
  for (const auto& b : bws) cfgs.push_back(with_overrides(cfg, {{"mem.bandwidth_gbps", b}}));
  for (const auto& l : lats) cfgs.push_back(with_overrides(cfg, {{"mem.latency_ns", l}}));
  FigureResult f{"fig6", run_all(cfgs, opt.jobs), {}, {}};
  Series sb{"bandwidth", {}}, sl{"latency", {}};
  const std::vector<SimReport> rb(f.reports.begin(), f.reports.begin() + static_cast<long>(bws.size()));
  const std::vector<SimReport> rl(f.reports.begin() + static_cast<long>(bws.size()), f.reports.end());
  for (std::size_t i = 0; i < bws.size(); ++i) sb.points.emplace_back(std::stod(bws[i]), rb[i].total_ns / fastest(rb));
  for (std::size_t i = 0; i < lats.size(); ++i) sl.points.emplace_back(std::stod(lats[i]), rl[i].total_ns / fastest(rl));
  f.series = {sb, sl};
  auto at = [&](const std::vector<std::string>& keys, const std::vector<SimReport>& rs, const std::string& k) {
    return rs[static_cast<std::size_t>(std::find(keys.begin(), keys.end(), k) - keys.begin())].total_ns;
  };
  f.summary.push_back("improvement 8->50 GB/s " + fmt(100.0 * (at(bws, rb, "8") / at(bws, rb, "50") - 1.0), 1) + "%");
  f.summary.push_back("improvement 50->256 GB/s " + fmt(100.0 * (at(bws, rb, "50") / at(bws, rb, "256") - 1.0), 1) +
                      "%");
  f.summary.push_back("latency 1->36 ns overhead " + fmt(100.0 * (rl.back().total_ns / rl.front().total_ns - 1.0), 1) +
                      "%");
  return f;
}

std::vector<std::string> vit_models(bool quick) {
  return quick ? std::vector<std::string>{"base"} : std::vector<std::string>{"base", "large", "huge"};
}

/// Reports per model, each holding the four transformer systems in order.
std::vector<std::vector<SimReport>> transformer_runs(const RunConfig& base, const std::vector<std::string>& models,
                                                     unsigned jobs) {
  std::vector<RunConfig> cfgs;
  for (const auto& m : models) {
    for (const auto& s : transformer_systems()) {
      cfgs.push_back(with_overrides(with_overrides(base, {{"workload.kind", "vit"}, {"workload.vit", m}}), s.overrides));
    }
  }
  const auto rs = run_all(cfgs, jobs);
  std::vector<std::vector<SimReport>> out;
  for (std::size_t i = 0; i < models.size(); ++i) out.emplace_back(rs.begin() + 4 * i, rs.begin() + 4 * (i + 1));
  return out;
}

FigureResult fig7(const RunConfig& base, const FigureOptions& opt) {
  const auto models = vit_models(opt.quick);
  const auto runs = transformer_runs(base, models, opt.jobs);
  FigureResult f{"fig7", {}, {}, {}};
  const auto& systems = transformer_systems();
  for (std::size_t j = 0; j < systems.size(); ++j) {
    Series s{systems[j].name, {}};
    for (std::size_t i = 0; i < models.size(); ++i) s.points.emplace_back(i, runs[i][j].total_ns / fastest(runs[i]));
    f.series.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto t = summarize_transformer(runs[i]);
    f.summary.push_back("x=" + std::to_string(i) + " vit_" + models[i] + ": PCIe-64GB speedup over PCIe-2GB " +
                        fmt(t.speedup_64_over_2, 2) + "x, DevMem / PCIe-64GB " + fmt(t.devmem_over_64));
    append(f.reports, runs[i]);
  }
  return f;
}

FigureResult fig8(const RunConfig& base, const FigureOptions& opt) {
  const auto models = vit_models(opt.quick);
  const auto runs = transformer_runs(base, models, opt.jobs);
  FigureResult f{"fig8", {}, {}, {}};
  const auto& systems = transformer_systems();
  for (std::size_t j = 0; j < systems.size(); ++j) {
    Series g{"gemm_" + systems[j].name, {}}, n{"nongemm_" + systems[j].name, {}};
    for (std::size_t i = 0; i < models.size(); ++i) {
      g.points.emplace_back(i, runs[i][j].gemm_ns * 1e-6);
      n.points.emplace_back(i, runs[i][j].nongemm_ns * 1e-6);
    }
    f.series.push_back(std::move(g));
    f.series.push_back(std::move(n));
  }
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto t = summarize_transformer(runs[i]);
    f.summary.push_back("x=" + std::to_string(i) + " vit_" + models[i] + " (ms): DevMem wins GEMM " +
                        (t.devmem_wins_gemm ? "yes" : "no") + ", Non-GEMM ratio " + fmt(t.nongemm_ratio, 2) +
                        "x, DevMem Non-GEMM share " + fmt(100.0 * t.devmem_nongemm_share, 1) + "%");
    append(f.reports, runs[i]);
  }
  return f;
}

FigureResult fig9(const RunConfig& base, const FigureOptions& opt) {
  const auto runs = transformer_runs(base, {"base"}, opt.jobs);
  const auto& rs = runs.front();
  FigureResult f{"fig9", rs, {}, {}};
  const auto t = summarize_transformer(rs);
  const PhaseTimes dev = PhaseTimes::from(rs[3]);
  for (int i = 0; i < 3; ++i) {
    const PhaseTimes pcie = PhaseTimes::from(rs[static_cast<std::size_t>(i)]);
    const double w_ref = pcie.gemm_fraction();
    const MixModel mp = mix_model(pcie, w_ref), md = mix_model(dev, w_ref);
    const std::string name = transformer_systems()[static_cast<std::size_t>(i)].name;
    Series sp{name, {}}, sd{"devmem_vs_" + name, {}};
    for (int pct = 0; pct <= 100; ++pct) {
      const double w_gemm = 1.0 - pct / 100.0;
      sp.points.emplace_back(pct, mix_time(mp, w_gemm));
      sd.points.emplace_back(pct, mix_time(md, w_gemm));
    }
    f.series.push_back(std::move(sp));
    f.series.push_back(std::move(sd));
    const ThresholdResult& th = t.thresholds[static_cast<std::size_t>(i)];
    f.summary.push_back(name + ": " +
                        (th.crossing ? "DevMem preferred below " + fmt(100.0 * th.w_nongemm(), 2) +
                                           "% Non-GEMM (grid " + fmt(100.0 * (1.0 - th.w_gemm_grid), 2) + "%)"
                                     : "no crossing, " + th.dominant + " dominates"));
  }
  return f;
}

FigureResult table5(const RunConfig& base, const FigureOptions& opt) {
  const std::vector<std::string> ns = opt.quick ? std::vector<std::string>{"64", "256", "1024"}
                                                : std::vector<std::string>{"64", "128", "256", "512", "1024", "2048"};
  const auto cfgs = expand_sweep(with_overrides(base, {{"workload.kind", "gemm"}}), {{"workload.n", ns}});
  FigureResult f{"table5", run_all(cfgs, opt.jobs), {}, {}};
  const auto& names = translation_stat_names();
  std::vector<Series> series;
  for (const auto& n : {"footprint_pages", "translation_times", "trans_mean_time", "ptw_times", "ptw_mean_time",
                        "utlb_lookup_times", "utlb_misses_times", "trans_overhead_percent"}) {
    series.push_back({n, {}});
  }
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const auto& t = f.reports[i].translation;
    const double vals[8] = {static_cast<double>(t.footprint_pages), static_cast<double>(t.translation_count),
                            t.translation_mean_cycles,             static_cast<double>(t.ptw_count),
                            t.ptw_mean_cycles,                     static_cast<double>(t.utlb_lookups),
                            static_cast<double>(t.utlb_misses),    t.overhead_percent};
    for (std::size_t k = 0; k < 8; ++k) series[k].points.emplace_back(std::stod(ns[i]), vals[k]);
  }
  for (std::size_t k = 0; k < 8; ++k) {
    std::string line = names[k] + ":";
    for (const auto& [x, y] : series[k].points) line += " " + format_number(std::round(y * 100) / 100);
    f.summary.push_back(line);
  }
  f.series = std::move(series);
  return f;
}

}  // namespace

const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names = {"fig2", "fig3", "fig4", "fig5", "fig6",
                                                 "fig7", "fig8", "fig9", "table5"};
  return names;
}

FigureResult run_figure(const std::string& name, const RunConfig& base, const FigureOptions& opt) {
  if (name == "fig2") return fig2(base, opt);
  if (name == "fig3") return fig3(base, opt);
  if (name == "fig4") return fig4(base, opt);
  if (name == "fig5") return fig5(base, opt);
  if (name == "fig6") return fig6(base, opt);
  if (name == "fig7") return fig7(base, opt);
  if (name == "fig8") return fig8(base, opt);
  if (name == "fig9") return fig9(base, opt);
  if (name == "table5") return table5(base, opt);
  std::string valid;
  for (const auto& n : figure_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown figure '" + name + "' (valid: " + valid + ")");
}

// ---- calibration ------------------------------------------------------------

std::vector<CalibrationConstant> calibration_constants(const std::string& scope) {
  const std::vector<CalibrationConstant> packet = {
      {"pcie.header_bytes", 4, 64, true},
      {"pcie.window_bytes", 4096, 65536, true},
      {"pcie.turnaround_ns", 1, 5000, false},
  };
  const std::vector<CalibrationConstant> cpu = {
      {"cpu.softmax_ns", 0.01, 10, false}, {"cpu.layernorm_ns", 0.01, 10, false}, {"cpu.gelu_ns", 0.01, 10, false},
      {"cpu.residual_ns", 0.01, 10, false}, {"cpu.host_bw_gbps", 1, 100, false}, {"cpu.numa_line_ns", 0.1, 100, false},
  };
  if (scope == "packet") return packet;
  if (scope == "transformer") return cpu;
  if (scope == "all") {
    auto all = packet;
    all.insert(all.end(), cpu.begin(), cpu.end());
    return all;
  }
  throw ConfigError("unknown calibration scope '" + scope + "' (valid: packet, transformer, all)");
}

namespace {

std::vector<CalibrationTarget> packet_targets(const RunConfig& cfg, unsigned jobs) {
  const auto rs = run_all(packet_sweep_configs(with_overrides(cfg, packet_recipe_overrides()), 8, kPacketSizes), jobs);
  std::vector<double> t;
  for (const auto& r : rs) t.push_back(r.total_ns);
  const double best = *std::min_element(t.begin(), t.end());
  auto overhead = [&](std::uint32_t p) {
    const auto at = std::find(kPacketSizes.begin(), kPacketSizes.end(), p) - kPacketSizes.begin();
    return 100.0 * (t[static_cast<std::size_t>(at)] / best - 1.0);
  };
  // Continuous shape error: summed relative size (%) of steps that go the wrong way.
  double shape = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const bool left = kPacketSizes[i + 1] <= 256;
    const double step = 100.0 * (t[i + 1] - t[i]) / best;
    shape += left ? std::max(0.0, step) : std::max(0.0, -step);
  }
  return {
      {"fig4 overhead at 64 B (%)", 12.0, 6.0, overhead(64)},
      {"fig4 overhead at 4096 B (%)", 36.0, 15.0, overhead(4096)},
      {"fig4 overhead at 256 B (%, 0 = argmin)", 0.0, 0.05, overhead(256)},
      {"fig4 wrong-way steps (%)", 0.0, 0.05, shape},
  };
}

/// Caches GEMM simulations across calibration steps that only move cpu.* keys.
class TransformerEvaluator {
 public:
  explicit TransformerEvaluator(unsigned jobs) : jobs_(jobs) {}

  std::vector<SimReport> systems(const RunConfig& cfg, const std::string& model) {
    std::vector<RunConfig> cfgs, missing;
    std::vector<std::string> keys;
    for (const auto& s : transformer_systems()) {
      RunConfig c = with_overrides(with_overrides(cfg, {{"workload.kind", "vit"}, {"workload.vit", model}}), s.overrides);
      RunConfig key = c;
      for (const auto& k : config_keys()) {
        if (k.name.rfind("cpu.", 0) == 0) key.set(k.name, k.default_value);
      }
      keys.push_back(key.echo());
      if (!cache_.count(keys.back())) missing.push_back(key);
      cfgs.push_back(std::move(c));
    }
    const auto fresh = run_all(missing, jobs_);
    std::size_t f = 0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (!cache_.count(keys[i])) cache_[keys[i]] = fresh[f++];
    }
    std::vector<SimReport> out;
    for (std::size_t i = 0; i < keys.size(); ++i) out.push_back(reprice_nongemm(cache_.at(keys[i]), cfgs[i]));
    return out;
  }

 private:
  unsigned jobs_;
  std::map<std::string, SimReport> cache_;
};

std::vector<CalibrationTarget> transformer_targets(const RunConfig& cfg, TransformerEvaluator& ev) {
  const auto base = summarize_transformer(ev.systems(cfg, "base"));
  const auto large = summarize_transformer(ev.systems(cfg, "large"));
  return {
      {"fig7 vit_base PCIe-64GB speedup over PCIe-2GB", 3.0, 1.0, base.speedup_64_over_2},
      {"fig7 vit_base DevMem / PCIe-64GB total", 1.0, 0.15, base.devmem_over_64},
      {"fig8 vit_large DevMem Non-GEMM ratio", 4.0, 2.0, large.nongemm_ratio},
      {"fig8 vit_large DevMem Non-GEMM share", 0.40, 0.15, large.devmem_nongemm_share},
      {"fig9 threshold PCIe-2GB (% Non-GEMM)", 34.31, 10.0, threshold_nongemm_percent(base.thresholds[0])},
      {"fig9 threshold PCIe-8GB (% Non-GEMM)", 10.16, 10.0, threshold_nongemm_percent(base.thresholds[1])},
      {"fig9 threshold PCIe-64GB (% Non-GEMM)", 4.27, 10.0, threshold_nongemm_percent(base.thresholds[2])},
  };
}

}  // namespace

TargetFn calibration_targets(const std::string& scope, unsigned jobs) {
  (void)calibration_constants(scope);
  auto ev = std::make_shared<TransformerEvaluator>(jobs);
  return [scope, jobs, ev](const RunConfig& cfg) {
    std::vector<CalibrationTarget> out;
    if (scope != "transformer") out = packet_targets(cfg, jobs);
    if (scope != "packet") {
      auto t = transformer_targets(cfg, *ev);
      out.insert(out.end(), t.begin(), t.end());
    }
    return out;
  };
}

std::string constants_file(const CalibrationResult& result) {
  std::set<std::string> declared;
  for (const auto& c : calibration_constants("all")) declared.insert(c.key);
  std::ostringstream os;
  os << "# linksim calibrated constants\n";
  std::istringstream rep(result.report());
  for (std::string line; std::getline(rep, line);) os << "# " << line << '\n';
  for (const auto& k : config_keys()) {
    const std::string& v = result.constants.get(k.name);
    if (declared.count(k.name) || v != k.default_value) os << k.name << " = " << v << '\n';
  }
  return os.str();
}

}  // namespace linksim
