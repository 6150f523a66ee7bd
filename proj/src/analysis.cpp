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

#include "linksim/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "linksim/errors.hpp"

namespace linksim {

// ---- roofline ---------------------------------------------------------------

const char* to_string(Region r) { return r == Region::ComputeBound ? "compute" : "memory"; }

double per_tile_compute_ns(const SystolicConfig& cfg, std::uint64_t k) {
  return cfg.compute_scale * static_cast<double>(k + cfg.fill_cycles) / cfg.clock_ghz;
}

namespace {

constexpr double kSensitivity = 0.05;

RunConfig with_scale(const RunConfig& base, double per_tile_ns) {
  SystemSetup s = resolve(base);
  if (s.workload_kind != "gemm") throw ConfigError("roofline sweep needs workload.kind=gemm");
  SystolicConfig unit_cfg = s.accel;
  unit_cfg.compute_scale = 1.0;
  const double unit = per_tile_compute_ns(unit_cfg, s.gemm_n);
  RunConfig c = base;
  c.set("accel.compute_scale", format_number(per_tile_ns / unit));
  return c;
}

}  // namespace

RooflineResult roofline_sweep(const RunConfig& base, const std::vector<double>& per_tile_ns, unsigned jobs) {
  if (per_tile_ns.size() < 5) throw ConfigError("roofline sweep needs at least 5 compute-time points");
  std::vector<double> times = per_tile_ns;
  std::sort(times.begin(), times.end());
  for (double t : times) {
    if (!(t > 0)) throw ConfigError("roofline compute times must be positive");
  }
  std::vector<RunConfig> cfgs;
  for (double t : times) {
    cfgs.push_back(with_scale(base, t));
    cfgs.push_back(with_scale(base, t / 2));
  }
  const std::vector<SimReport> reports = run_all(cfgs, jobs);

  RooflineResult out;
  double fastest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const SimReport& full = reports[2 * i];
    const SimReport& half = reports[2 * i + 1];
    RooflinePoint p;
    p.compute_time_ns = times[i];
    p.total_ns = full.total_ns;
    p.halved_total_ns = half.total_ns;
    p.compute_bound_ns = full.compute_bound_ns;
    p.transfer_bound_ns = full.transfer_bound_ns;
    p.region = (full.total_ns - half.total_ns) > kSensitivity * full.total_ns ? Region::ComputeBound
                                                                              : Region::MemoryBound;
    fastest = std::min(fastest, p.total_ns);
    out.points.push_back(p);
    out.reports.push_back(full);
  }
  for (auto& p : out.points) p.normalized_exec_time = p.total_ns / fastest;

  for (std::size_t i = 1; i < out.points.size(); ++i) {
    const RooflinePoint& a = out.points[i - 1];
    const RooflinePoint& b = out.points[i];
    if (a.region == Region::MemoryBound && b.region == Region::ComputeBound) {
      // Interpolate the 5 % level of the halving gain in log compute time.
      const double ga = (a.total_ns - a.halved_total_ns) / a.total_ns;
      const double gb = (b.total_ns - b.halved_total_ns) / b.total_ns;
      const double f = (kSensitivity - ga) / (gb - ga);
      const double la = std::log(a.compute_time_ns);
      const double lb = std::log(b.compute_time_ns);
      out.crossover_ns = std::exp(la + std::clamp(f, 0.0, 1.0) * (lb - la));
      break;
    }
  }
  if (!out.crossover_ns) out.note = "no crossover in range";
  return out;
}

// ---- workload mix -----------------------------------------------------------

void MixModel::validate() const {
  if (!(p_gemm > 0) || !(p_nongemm > 0)) throw ConfigError("mix model performance values must be positive");
  if (!(w_gemm >= 0 && w_gemm <= 1)) throw ConfigError("mix model w_gemm must be in [0, 1]");
  if (!(t_other >= 0)) throw ConfigError("mix model t_other must be non-negative");
}

double mix_time(const MixModel& m) { return mix_time(m, m.w_gemm); }

double mix_time(const MixModel& m, double w_gemm) {
  MixModel c = m;
  c.w_gemm = w_gemm;
  c.validate();
  return c.t_other + w_gemm / c.p_gemm + (1.0 - w_gemm) / c.p_nongemm;
}

PhaseTimes PhaseTimes::from(const SimReport& r) {
  return PhaseTimes{r.total_ns * 1e-9, r.gemm_ns * 1e-9, r.nongemm_ns * 1e-9};
}

MixModel mix_model(const PhaseTimes& sys, double w_ref) {
  if (!(sys.gemm_s > 0) || !(sys.nongemm_s > 0)) throw ConfigError("mix model needs positive GEMM and Non-GEMM time");
  MixModel m;
  m.t_other = std::max(0.0, sys.total_s - sys.gemm_s - sys.nongemm_s);
  m.w_gemm = w_ref;
  m.p_gemm = w_ref / sys.gemm_s;
  m.p_nongemm = (1.0 - w_ref) / sys.nongemm_s;
  m.validate();
  return m;
}

ThresholdResult devmem_threshold(const MixModel& dev, const MixModel& pcie) {
  dev.validate();
  pcie.validate();
  // D(w) = T_dev(w) - T_pcie(w) = alpha + beta * w.
  const double alpha = (dev.t_other - pcie.t_other) + (1.0 / dev.p_nongemm - 1.0 / pcie.p_nongemm);
  const double beta = (1.0 / dev.p_gemm - 1.0 / dev.p_nongemm) - (1.0 / pcie.p_gemm - 1.0 / pcie.p_nongemm);
  auto diff = [&](double w) { return mix_time(dev, w) - mix_time(pcie, w); };

  ThresholdResult r;
  const double scale = std::max(mix_time(dev, 0.0), mix_time(pcie, 0.0));
  const double eps = 1e-12 * scale;
  if (std::abs(beta) > eps) {
    const double w = -alpha / beta;
    if (w > 0.0 && w < 1.0) {
      r.crossing = true;
      r.w_gemm = w;
    }
  }
  // Grid scan at 0.01 % resolution; the answer is the bracketing midpoint.
  constexpr int kSteps = 10000;
  double prev = diff(0.0);
  for (int i = 1; i <= kSteps; ++i) {
    const double w = static_cast<double>(i) / kSteps;
    const double cur = diff(w);
    if ((prev < 0) != (cur < 0) && std::abs(prev) > eps && std::abs(cur) > eps) {
      r.w_gemm_grid = (static_cast<double>(i) - 0.5) / kSteps;
      break;
    }
    prev = cur;
  }
  if (!r.crossing) {
    const double mid = diff(0.5);
    r.dominant = std::abs(mid) <= eps ? "tie" : (mid < 0 ? "devmem" : "pcie");
    r.w_gemm_grid = r.w_gemm = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

ThresholdResult devmem_threshold(const PhaseTimes& dev, const PhaseTimes& pcie) {
  const double w_ref = pcie.gemm_fraction();
  return devmem_threshold(mix_model(dev, w_ref), mix_model(pcie, w_ref));
}

// ---- sweeps and CSV ---------------------------------------------------------

Axis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("axis '" + spec + "': expected key=v1,v2,...");
  Axis a;
  a.key = spec.substr(0, eq);
  std::string rest = spec.substr(eq + 1);
  std::size_t start = 0;
  while (true) {
    const auto comma = rest.find(',', start);
    std::string tok = rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (tok.empty()) throw ConfigError("axis " + a.key + ": empty value token");
    a.values.push_back(tok);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  RunConfig probe;
  for (const auto& tok : a.values) {
    try {
      probe.set(a.key, tok);
      (void)resolve(probe);
    } catch (const ConfigError& e) {
      throw ConfigError("axis " + a.key + ": bad value token '" + tok + "': " + e.what());
    }
  }
  return a;
}

std::vector<RunConfig> expand_sweep(const RunConfig& base, std::vector<Axis> axes, std::size_t cap) {
  std::sort(axes.begin(), axes.end(), [](const Axis& a, const Axis& b) { return a.key < b.key; });
  std::size_t total = 1;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (i > 0 && axes[i].key == axes[i - 1].key) throw ConfigError("axis " + axes[i].key + " given twice");
    if (axes[i].values.empty()) throw ConfigError("axis " + axes[i].key + " has no values");
    if (!base.has(axes[i].key)) throw ConfigError("unknown config key in axis: " + axes[i].key);
    total *= axes[i].values.size();
    if (total > cap) throw ConfigError("sweep exceeds the cap of " + std::to_string(cap) + " runs");
  }
  std::vector<RunConfig> out;
  out.reserve(total);
  std::vector<std::size_t> idx(axes.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    RunConfig c = base;
    for (std::size_t i = 0; i < axes.size(); ++i) c.set(axes[i].key, axes[i].values[idx[i]]);
    out.push_back(std::move(c));
    for (std::size_t i = axes.size(); i-- > 0;) {
      if (++idx[i] < axes[i].values.size()) break;
      idx[i] = 0;
    }
  }
  return out;
}

std::vector<SimReport> run_all(const std::vector<RunConfig>& configs, unsigned jobs) {
  std::vector<SimReport> out(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        out[i] = simulate(configs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string format_number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::vector<std::string> csv_columns() {
  std::vector<std::string> cols = {"run_id"};
  for (const auto& k : config_keys()) cols.push_back(k.name);
  for (const char* c : {"total_ns", "gemm_ns", "nongemm_ns", "bytes_h2d", "bytes_d2h"}) cols.emplace_back(c);
  for (const auto& s : translation_stat_names()) cols.push_back(s);
  cols.emplace_back("normalized_exec_time");
  return cols;
}

std::string to_csv(const std::vector<SimReport>& reports) {
  std::ostringstream os;
  const auto cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  double fastest = std::numeric_limits<double>::infinity();
  for (const auto& r : reports) fastest = std::min(fastest, r.total_ns);
  for (std::size_t id = 0; id < reports.size(); ++id) {
    const SimReport& r = reports[id];
    os << id;
    for (const auto& k : config_keys()) os << ',' << r.config.get(k.name);
    const TranslationStats& t = r.translation;
    for (double v : {r.total_ns, r.gemm_ns, r.nongemm_ns, static_cast<double>(r.bytes_h2d),
                     static_cast<double>(r.bytes_d2h), static_cast<double>(t.footprint_pages),
                     static_cast<double>(t.translation_count), t.translation_mean_cycles,
                     static_cast<double>(t.ptw_count), t.ptw_mean_cycles, static_cast<double>(t.utlb_lookups),
                     static_cast<double>(t.utlb_misses), t.overhead_percent, r.total_ns / fastest}) {
      os << ',' << format_number(v);
    }
    os << '\n';
  }
  return os.str();
}

// ---- calibration ------------------------------------------------------------

namespace {

double worst(const std::vector<CalibrationTarget>& ts) {
  double m = 0.0;
  for (const auto& t : ts) m = std::max(m, t.residual());
  return m;
}

// Smooth surrogate of the max residual (p = 8 norm). Pure max stalls when two
// targets pull one constant in opposite directions.
double soft_worst(const std::vector<CalibrationTarget>& ts) {
  double s = 0.0;
  for (const auto& t : ts) s += std::pow(t.residual(), 8.0);
  return std::pow(s, 1.0 / 8.0);
}

}  // namespace

std::string CalibrationResult::report() const {
  std::ostringstream os;
  os << "evaluations " << evaluations << ", max normalized residual " << format_number(max_residual) << '\n';
  for (const auto& t : targets) {
    os << (t.ok() ? "  ok   " : "  FAIL ") << t.name << ": value " << format_number(t.value) << ", goal "
       << format_number(t.goal) << " +/- " << format_number(t.tolerance) << '\n';
  }
  return os.str();
}

CalibrationResult coordinate_descent(const RunConfig& start, const std::vector<CalibrationConstant>& constants,
                                     const TargetFn& evaluate, int rounds) {
  CalibrationResult best;
  best.constants = start;
  best.targets = evaluate(start);
  best.max_residual = worst(best.targets);
  best.evaluations = 1;
  double objective = soft_worst(best.targets);

  auto snap = [](const CalibrationConstant& c, double v) {
    v = std::clamp(v, c.lo, c.hi);
    return c.integer ? std::round(v) : v;
  };

  auto accept = [&](RunConfig trial) {
    auto ts = evaluate(trial);
    ++best.evaluations;
    const double o = soft_worst(ts);
    if (!(o < objective)) return false;
    objective = o;
    best.constants = std::move(trial);
    best.max_residual = worst(ts);
    best.targets = std::move(ts);
    return true;
  };
  auto done = [&] { return best.max_residual <= 1.0; };

  constexpr int kPassesPerRound = 20;
  double step = 1.0;  // relative step, halves each round
  for (int round = 0; round < rounds && !done(); ++round, step *= 0.5) {
    for (int pass = 0; pass < kPassesPerRound && !done(); ++pass) {
      const RunConfig before = best.constants;
      for (const auto& c : constants) {
        bool moved = true;
        while (moved && !done()) {
          moved = false;
          const double cur = best.constants.get_double(c.key);
          for (double factor : {1.0 + step, 1.0 / (1.0 + step)}) {
            const double v = snap(c, cur * factor);
            if (v == cur) continue;
            RunConfig trial = best.constants;
            trial.set(c.key, format_number(v));
            if (accept(std::move(trial))) {
              moved = true;
              break;
            }
          }
        }
      }
      if (best.constants == before) break;
      // Pattern move: repeat the pass's net displacement (in log space) while it helps.
      RunConfig anchor = before;
      while (!done()) {
        RunConfig trial = best.constants;
        for (const auto& c : constants) {
          const double cur = best.constants.get_double(c.key);
          const double old = anchor.get_double(c.key);
          if (old > 0 && cur > 0) trial.set(c.key, format_number(snap(c, cur * cur / old)));
        }
        if (trial == best.constants) break;
        anchor = best.constants;
        if (!accept(std::move(trial))) break;
      }
    }
  }
  return best;
}

}  // namespace linksim
