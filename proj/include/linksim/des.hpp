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

#include <compare>
#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "linksim/errors.hpp"

namespace linksim {

/// Virtual time with 1 ns resolution. The modeled CPU and accelerator run at
/// 1 GHz, so one cycle is one nanosecond.
class SimTime {
 public:
  /// Largest time the engine accepts; leaves ample headroom above 10^15 ns.
  static constexpr std::uint64_t kMaxNs = std::uint64_t{1} << 62;

  constexpr SimTime() = default;
  constexpr explicit SimTime(std::uint64_t ns) : ns_(ns) {}

  /// Converts a non-negative duration in (fractional) ns, rounding up so that
  /// modeled latencies are never shortened.
  static SimTime ceil_ns(double ns);

  constexpr std::uint64_t ns() const { return ns_; }
  constexpr double as_double() const { return static_cast<double>(ns_); }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(SimTime o) const { return SimTime{ns_ + o.ns_}; }
  constexpr SimTime& operator+=(SimTime o) {
    ns_ += o.ns_;
    return *this;
  }
  /// Saturates at zero.
  constexpr SimTime operator-(SimTime o) const { return SimTime{ns_ > o.ns_ ? ns_ - o.ns_ : 0}; }

 private:
  std::uint64_t ns_ = 0;
};

constexpr SimTime max(SimTime a, SimTime b) { return a < b ? b : a; }

using ComponentId = std::uint32_t;

struct Event {
  SimTime fire_time;
  std::uint64_t sequence = 0;
  ComponentId target = 0;
  std::function<void()> action;
};

/// Sequential discrete-event kernel. Events are dispatched in
/// (fire_time, sequence) order; sequence numbers are assigned at scheduling
/// time, so equal-time events run in the order they were scheduled.
///
/// One engine is single-threaded. Independent engines share nothing.
class Engine {
 public:
  Engine() = default;
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  ComponentId register_component(std::string name);
  const std::string& component_name(ComponentId id) const;
  std::size_t component_count() const { return names_.size(); }

  SimTime now() const { return now_; }

  /// Throws SimulationFault when `at` is in the past or beyond kMaxNs.
  std::uint64_t schedule(SimTime at, ComponentId target, std::function<void()> action);
  std::uint64_t schedule_in(SimTime delay, ComponentId target, std::function<void()> action) {
    return schedule(now_ + delay, target, std::move(action));
  }

  /// Dispatches every event with fire_time <= deadline. Returns the time of
  /// the last dispatched event, or `deadline` when nothing was pending.
  SimTime run_until(SimTime deadline);

  /// Drains the queue completely.
  SimTime run();

  std::size_t pending() const { return queue_.size(); }
  std::uint64_t dispatched() const { return dispatched_; }
  std::uint64_t scheduled() const { return next_sequence_; }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
      return a.sequence > b.sequence;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::vector<std::string> names_;
  SimTime now_{};
  std::uint64_t next_sequence_ = 0;
  std::uint64_t dispatched_ = 0;
};

/// Unidirectional fixed-delay channel between two components. Messages are
/// delivered to the sink callback no earlier than send time + fixed_delay and
/// in FIFO order.
template <typename Msg>
class Port {
 public:
  using Sink = std::function<void(const Msg&)>;

  Port(Engine& engine, ComponentId source, ComponentId sink, SimTime fixed_delay, Sink deliver)
      : engine_(&engine), source_(source), sink_(sink), delay_(fixed_delay), deliver_(std::move(deliver)) {}

  void send(Msg msg) {
    ++sent_;
    engine_->schedule_in(delay_, sink_, [this, m = std::move(msg)] {
      ++delivered_;
      deliver_(m);
    });
  }

  ComponentId source() const { return source_; }
  ComponentId sink() const { return sink_; }
  SimTime fixed_delay() const { return delay_; }
  std::uint64_t sent() const { return sent_; }
  std::uint64_t delivered() const { return delivered_; }

 private:
  Engine* engine_;
  ComponentId source_;
  ComponentId sink_;
  SimTime delay_;
  Sink deliver_;
  std::uint64_t sent_ = 0;
  std::uint64_t delivered_ = 0;
};

}  // namespace linksim
