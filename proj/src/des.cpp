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

#include "linksim/des.hpp"

#include <cmath>

namespace linksim {

SimTime SimTime::ceil_ns(double ns) {
  if (!(ns >= 0.0)) throw SimulationFault("negative or NaN duration: " + std::to_string(ns));
  // Tolerate accumulated floating error just above an integer.
  const double x = ns - 1e-9;
  if (x <= 0.0) return SimTime{0};
  if (x >= static_cast<double>(kMaxNs)) throw SimulationFault("duration overflows SimTime: " + std::to_string(ns));
  auto t = static_cast<std::uint64_t>(x);
  if (static_cast<double>(t) < x) ++t;
  return SimTime{t};
}

ComponentId Engine::register_component(std::string name) {
  names_.push_back(std::move(name));
  return static_cast<ComponentId>(names_.size() - 1);
}

const std::string& Engine::component_name(ComponentId id) const {
  if (id >= names_.size()) throw SimulationFault("unknown component id " + std::to_string(id));
  return names_[id];
}

std::uint64_t Engine::schedule(SimTime at, ComponentId target, std::function<void()> action) {
  if (at < now_) {
    throw SimulationFault("event scheduled in the past: t=" + std::to_string(at.ns()) +
                          " now=" + std::to_string(now_.ns()));
  }
  if (at.ns() > SimTime::kMaxNs) throw SimulationFault("event time exceeds SimTime headroom");
  const std::uint64_t seq = next_sequence_++;
  queue_.push(Event{at, seq, target, std::move(action)});
  return seq;
}

SimTime Engine::run_until(SimTime deadline) {
  bool any = false;
  while (!queue_.empty() && queue_.top().fire_time <= deadline) {
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.fire_time;
    any = true;
    ++dispatched_;
    if (ev.action) ev.action();
  }
  if (!any) {
    if (now_ < deadline) now_ = deadline;
    return deadline;
  }
  return now_;
}

SimTime Engine::run() {
  while (!queue_.empty()) {
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.fire_time;
    ++dispatched_;
    if (ev.action) ev.action();
  }
  return now_;
}

}  // namespace linksim
