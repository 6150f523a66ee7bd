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

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "linksim/des.hpp"

namespace linksim {

/// PCIe-like link and hierarchy parameters. Lane rate is the effective
/// (post-encoding) rate, so bandwidth in GB/s is lanes * lane_rate / 8.
struct PcieConfig {
  std::uint32_t lanes = 4;
  double lane_rate_gbps = 4.0;
  std::uint32_t packet_payload_bytes = 256;
  std::uint32_t header_bytes = 12;
  double rc_latency_ns = 150.0;
  double switch_latency_ns = 50.0;
  /// Endpoint turnaround added to the fixed round-trip latency.
  double turnaround_ns = 2450.0;
  std::uint64_t inflight_window_bytes = 20480;
  /// Store-and-forward stages between host memory and the accelerator.
  std::uint32_t hops = 2;

  /// Throws ConfigError naming the offending pcie.* key.
  void validate() const;
};

/// Link bandwidth in bytes per ns (numerically equal to GB/s).
double effective_bandwidth(const PcieConfig& cfg);

/// Sum of the fixed latencies seen by one request/completion round trip.
double fixed_latency_ns(const PcieConfig& cfg);

/// Per-hop serialization time of one full packet, header included.
double packet_serialization_ns(const PcieConfig& cfg);

/// Round-trip time of one packet: fixed latency plus store-and-forward
/// serialization at every hop.
double round_trip_ns(const PcieConfig& cfg);

/// Steady-state delivered payload throughput (bytes/ns): the smaller of the
/// header-limited link rate and the in-flight window limit.
double steady_throughput(const PcieConfig& cfg);

/// Fixed part of a transfer: the first packet's round trip minus one
/// request interval (which total_bytes / throughput already covers).
double pipeline_fill_ns(const PcieConfig& cfg);

/// Interval between successive requests issued by a paced requester.
double request_interval_ns(const PcieConfig& cfg);

/// Closed-form duration of a transfer of `total_bytes`.
double transfer_time_ns(std::uint64_t total_bytes, const PcieConfig& cfg);
SimTime transfer_time(std::uint64_t total_bytes, const PcieConfig& cfg);

enum class Direction { HostToDevice, DeviceToHost };

const char* to_string(Direction d);

struct Transfer {
  Direction direction = Direction::HostToDevice;
  std::uint64_t total_bytes = 0;
  SimTime issue_time;
  SimTime completion_time;
};

struct Packet {
  std::uint64_t transfer_id = 0;
  std::uint32_t payload_bytes = 0;
  Direction direction = Direction::HostToDevice;
};

/// Event-driven model of the Root Complex / Switch / PHY chain. Every hop is
/// a store-and-forward stage: a packet is fully received, serialized onto the
/// hop's link (FIFO), then delayed by the hop's fixed latency.
///
/// Reads (host to device) are driven by zero-byte requests that only incur
/// the endpoint turnaround; writes (device to host) are acknowledged after
/// the turnaround. In both directions at most inflight_window_bytes of
/// payload are outstanding, and the requester paces issue at one packet per
/// request_interval_ns().
class PcieFabric {
 public:
  using DoneFn = std::function<void(const Transfer&)>;
  using ArrivalFn = std::function<void(SimTime)>;

  PcieFabric(Engine& engine, PcieConfig cfg);

  const PcieConfig& config() const { return cfg_; }

  /// Starts a transfer at engine.now(); `on_done` fires when the last payload
  /// byte is delivered.
  void start_transfer(Direction dir, std::uint64_t total_bytes, DoneFn on_done);

  /// Sends a single packet through all hops; `on_arrival` fires at the sink.
  void route(const Packet& packet, ArrivalFn on_arrival);

  /// Arrival times at the sink for every packet routed so far, in order.
  const std::vector<SimTime>& arrivals() const { return arrivals_; }

 private:
  struct Hop {
    ComponentId id = 0;
    double latency_ns = 0.0;
    double busy_until_ns = 0.0;
  };
  struct Flow {
    Transfer transfer;
    std::uint64_t requested = 0;
    std::uint64_t delivered = 0;
    std::uint64_t outstanding = 0;
    double next_issue_ns = 0.0;
    bool wakeup_pending = false;
    DoneFn on_done;
  };

  std::vector<Hop*> hops_for(Direction dir);
  void forward(Packet packet, double exact_ns, std::size_t stage, std::vector<Hop*> path, ArrivalFn on_arrival);
  void pump(std::uint64_t flow_id);
  void on_delivered(std::uint64_t flow_id, std::uint32_t payload);

  Engine* engine_;
  PcieConfig cfg_;
  ComponentId phy_id_;
  Hop root_complex_;
  Hop switch_;
  std::deque<Flow> flows_;
  std::vector<SimTime> arrivals_;
};

}  // namespace linksim
