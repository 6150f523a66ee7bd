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

#include "linksim/pcie.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace linksim {

namespace {

bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace

void PcieConfig::validate() const {
  if (lanes != 1 && lanes != 2 && lanes != 4 && lanes != 8 && lanes != 16) {
    throw ConfigError("pcie.lanes must be one of 1,2,4,8,16 (got " + std::to_string(lanes) + ")");
  }
  if (!(lane_rate_gbps > 0.0)) throw ConfigError("pcie.lane_rate_gbps must be > 0");
  if (packet_payload_bytes < 64 || packet_payload_bytes > 4096 || !is_power_of_two(packet_payload_bytes)) {
    throw ConfigError("pcie.packet_bytes must be a power of two in [64, 4096] (got " +
                      std::to_string(packet_payload_bytes) + ")");
  }
  if (inflight_window_bytes < packet_payload_bytes) {
    throw ConfigError("pcie.window_bytes must be >= pcie.packet_bytes");
  }
  if (rc_latency_ns < 0 || switch_latency_ns < 0 || turnaround_ns < 0) {
    throw ConfigError("pcie latencies must be >= 0");
  }
  if (hops == 0) throw ConfigError("pcie hop count must be >= 1");
}

double effective_bandwidth(const PcieConfig& cfg) {
  if (cfg.lanes == 0 || !(cfg.lane_rate_gbps > 0.0)) {
    throw ConfigError("pcie bandwidth needs lanes > 0 and lane_rate_gbps > 0");
  }
  return static_cast<double>(cfg.lanes) * cfg.lane_rate_gbps / 8.0;
}

double fixed_latency_ns(const PcieConfig& cfg) {
  return cfg.rc_latency_ns + cfg.switch_latency_ns + cfg.turnaround_ns;
}

double packet_serialization_ns(const PcieConfig& cfg) {
  return static_cast<double>(cfg.packet_payload_bytes + cfg.header_bytes) / effective_bandwidth(cfg);
}

double round_trip_ns(const PcieConfig& cfg) {
  return fixed_latency_ns(cfg) + cfg.hops * packet_serialization_ns(cfg);
}

double steady_throughput(const PcieConfig& cfg) {
  const double p = cfg.packet_payload_bytes;
  const double link = effective_bandwidth(cfg) * p / (p + cfg.header_bytes);
  const double in_flight = std::floor(static_cast<double>(cfg.inflight_window_bytes) / p) * p;
  const double window = in_flight / round_trip_ns(cfg);
  return std::min(link, window);
}

double pipeline_fill_ns(const PcieConfig& cfg) {
  // First packet latency minus the per-packet interval already counted by
  // total_bytes / throughput.
  return round_trip_ns(cfg) - cfg.packet_payload_bytes / steady_throughput(cfg);
}

double request_interval_ns(const PcieConfig& cfg) { return cfg.packet_payload_bytes / steady_throughput(cfg); }

double transfer_time_ns(std::uint64_t total_bytes, const PcieConfig& cfg) {
  if (total_bytes == 0) throw ConfigError("pcie transfer of zero bytes");
  if (cfg.packet_payload_bytes > cfg.inflight_window_bytes) {
    throw ConfigError("pcie.packet_bytes exceeds pcie.window_bytes");
  }
  return pipeline_fill_ns(cfg) + static_cast<double>(total_bytes) / steady_throughput(cfg);
}

SimTime transfer_time(std::uint64_t total_bytes, const PcieConfig& cfg) {
  return SimTime::ceil_ns(transfer_time_ns(total_bytes, cfg));
}

const char* to_string(Direction d) { return d == Direction::HostToDevice ? "h2d" : "d2h"; }

PcieFabric::PcieFabric(Engine& engine, PcieConfig cfg) : engine_(&engine), cfg_(cfg) {
  cfg_.validate();
  phy_id_ = engine.register_component("pcie.phy");
  root_complex_ = Hop{engine.register_component("pcie.root_complex"), cfg_.rc_latency_ns, 0.0};
  switch_ = Hop{engine.register_component("pcie.switch"), cfg_.switch_latency_ns, 0.0};
}

std::vector<PcieFabric::Hop*> PcieFabric::hops_for(Direction dir) {
  if (dir == Direction::HostToDevice) return {&root_complex_, &switch_};
  return {&switch_, &root_complex_};
}

void PcieFabric::route(const Packet& packet, ArrivalFn on_arrival) {
  forward(packet, engine_->now().as_double(), 0, hops_for(packet.direction), std::move(on_arrival));
}

void PcieFabric::forward(Packet packet, double exact_ns, std::size_t stage, std::vector<Hop*> path,
                         ArrivalFn on_arrival) {
  if (stage == path.size()) {
    arrivals_.push_back(engine_->now());
    if (on_arrival) on_arrival(engine_->now());
    return;
  }
  // Link occupancy is tracked in fractional ns so that per-packet rounding
  // does not accumulate; events fire at the rounded-up instant.
  Hop& hop = *path[stage];
  const double ser = static_cast<double>(packet.payload_bytes + cfg_.header_bytes) / effective_bandwidth(cfg_);
  const double start = std::max(exact_ns, hop.busy_until_ns);
  hop.busy_until_ns = start + ser;
  const double next = hop.busy_until_ns + hop.latency_ns;
  engine_->schedule(max(engine_->now(), SimTime::ceil_ns(next)), hop.id,
                    [this, packet, next, stage, path = std::move(path), cb = std::move(on_arrival)]() mutable {
                      forward(packet, next, stage + 1, std::move(path), std::move(cb));
                    });
}

void PcieFabric::start_transfer(Direction dir, std::uint64_t total_bytes, DoneFn on_done) {
  if (total_bytes == 0) throw ConfigError("pcie transfer of zero bytes");
  Flow flow;
  flow.transfer = Transfer{dir, total_bytes, engine_->now(), SimTime{}};
  flow.next_issue_ns = engine_->now().as_double();
  flow.on_done = std::move(on_done);
  flows_.push_back(std::move(flow));
  pump(flows_.size() - 1);
}

void PcieFabric::pump(std::uint64_t flow_id) {
  Flow& flow = flows_[flow_id];
  const std::uint64_t p = cfg_.packet_payload_bytes;
  const SimTime now = engine_->now();
  while (flow.requested < flow.transfer.total_bytes) {
    const auto size = static_cast<std::uint32_t>(std::min<std::uint64_t>(p, flow.transfer.total_bytes - flow.requested));
    if (flow.outstanding + size > cfg_.inflight_window_bytes) break;
    // Requests are paced evenly across the window rather than issued as one
    // burst per round trip.
    const double issue_exact = flow.next_issue_ns;
    if (SimTime::ceil_ns(issue_exact) > now) {
      if (!flow.wakeup_pending) {
        flow.wakeup_pending = true;
        engine_->schedule(SimTime::ceil_ns(issue_exact), phy_id_, [this, flow_id] {
          flows_[flow_id].wakeup_pending = false;
          pump(flow_id);
        });
      }
      break;
    }
    flow.next_issue_ns = std::max(issue_exact, now.as_double() - 1.0) + request_interval_ns(cfg_);
    flow.requested += size;
    flow.outstanding += size;
    const Packet packet{flow_id, size, flow.transfer.direction};
    if (packet.direction == Direction::HostToDevice) {
      // Zero-byte read request: fixed turnaround only, no link bandwidth.
      engine_->schedule_in(SimTime::ceil_ns(cfg_.turnaround_ns), phy_id_, [this, packet, flow_id] {
        route(packet, [this, flow_id, size = packet.payload_bytes](SimTime) {
          flows_[flow_id].outstanding -= size;
          on_delivered(flow_id, size);
          pump(flow_id);
        });
      });
    } else {
      // Non-posted write: the acknowledgement returns after the turnaround.
      route(packet, [this, flow_id, size = packet.payload_bytes](SimTime) {
        engine_->schedule_in(SimTime::ceil_ns(cfg_.turnaround_ns), phy_id_, [this, flow_id, size] {
          flows_[flow_id].outstanding -= size;
          on_delivered(flow_id, size);
          pump(flow_id);
        });
      });
    }
  }
}

void PcieFabric::on_delivered(std::uint64_t flow_id, std::uint32_t payload) {
  Flow& flow = flows_[flow_id];
  flow.delivered += payload;
  if (flow.delivered == flow.transfer.total_bytes) {
    flow.transfer.completion_time = engine_->now();
    if (flow.on_done) flow.on_done(flow.transfer);
  }
}

}  // namespace linksim
