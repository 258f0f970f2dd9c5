// Copyright 2026 The pelletflow Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Two ways of spreading replications over p workers. Scheme 1 runs the
// score-sorted list in synchronous batches of p; scheme 2 lets idle workers
// pull the next task from the shared sorted list. Both also exist as
// deterministic discrete-event simulations for timing analysis.

#ifndef BQP_SCHED_HPP
#define BQP_SCHED_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace bqp {

struct TaskDescriptor {
  int index = 0;        // identifies the replication; passed to the work function
  double score = 0.0;   // descending execution priority
  double cost_hint = 0.0;
  std::uint64_t seed = 0;
};

struct ScheduleEntry {
  int task = 0;
  int worker = 0;
  double start_ms = 0.0;
  double end_ms = 0.0;
};

struct SchedulerTrace {
  std::vector<ScheduleEntry> entries;  // in task completion-record order
  double makespan_ms = 0.0;
  double busy_ms = 0.0;
  double idle_ms = 0.0;
};

namespace detail {

inline std::vector<int> priority_order(const std::vector<TaskDescriptor>& tasks) {
  std::vector<int> order(tasks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (tasks[a].score != tasks[b].score) return tasks[a].score > tasks[b].score;
    return tasks[a].index < tasks[b].index;
  });
  return order;
}

}  // namespace detail

using TaskFn = std::function<void(const TaskDescriptor&)>;

inline SchedulerTrace run_serial(const std::vector<TaskDescriptor>& tasks,
                                 const TaskFn& fn) {
  SchedulerTrace tr;
  auto t0 = std::chrono::steady_clock::now();
  for (int i : detail::priority_order(tasks)) {
    auto a = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                 .count();
    fn(tasks[i]);
    auto b = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                 .count();
    tr.entries.push_back({tasks[i].index, 0, a, b});
    tr.busy_ms += b - a;
    tr.makespan_ms = b;
  }
  return tr;
}

/// Synchronous batches: the sorted list is cut into chunks of p; every chunk
/// must finish before the next one starts.
inline SchedulerTrace run_scheme1(const std::vector<TaskDescriptor>& tasks, int p,
                                  const TaskFn& fn) {
  if (p < 1) throw std::invalid_argument("run_scheme1: need p >= 1");
  SchedulerTrace tr;
  auto order = detail::priority_order(tasks);
  auto t0 = std::chrono::steady_clock::now();
  auto now_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  };
  for (std::size_t base = 0; base < order.size(); base += p) {
    std::size_t n = std::min<std::size_t>(p, order.size() - base);
    std::vector<ScheduleEntry> batch(n);
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < n; ++k) {
      const TaskDescriptor& t = tasks[order[base + k]];
      ScheduleEntry* e = &batch[k];
      int worker = static_cast<int>(k);
      pool.emplace_back([&, e, worker, t] {
        e->task = t.index;
        e->worker = worker;
        e->start_ms = now_ms();
        fn(t);
        e->end_ms = now_ms();
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : batch) {
      tr.entries.push_back(e);
      tr.busy_ms += e.end_ms - e.start_ms;
      tr.makespan_ms = std::max(tr.makespan_ms, e.end_ms);
    }
  }
  tr.idle_ms = p * tr.makespan_ms - tr.busy_ms;
  return tr;
}

/// Shared pool: each worker repeatedly claims the next unclaimed task in
/// priority order, so no worker waits on a batch boundary.
inline SchedulerTrace run_scheme2(const std::vector<TaskDescriptor>& tasks, int p,
                                  const TaskFn& fn) {
  if (p < 1) throw std::invalid_argument("run_scheme2: need p >= 1");
  SchedulerTrace tr;
  auto order = detail::priority_order(tasks);
  std::vector<ScheduleEntry> slots(order.size());
  std::atomic<std::size_t> next{0};
  auto t0 = std::chrono::steady_clock::now();
  auto now_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < p; ++w) {
    pool.emplace_back([&, w] {
      for (;;) {
        std::size_t k = next.fetch_add(1);
        if (k >= order.size()) return;
        const TaskDescriptor& t = tasks[order[k]];
        slots[k].task = t.index;
        slots[k].worker = w;
        slots[k].start_ms = now_ms();
        fn(t);
        slots[k].end_ms = now_ms();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : slots) {
    tr.entries.push_back(e);
    tr.busy_ms += e.end_ms - e.start_ms;
    tr.makespan_ms = std::max(tr.makespan_ms, e.end_ms);
  }
  tr.idle_ms = p * tr.makespan_ms - tr.busy_ms;
  return tr;
}

/// Discrete-event versions with caller-supplied durations (indexed by task
/// position in `tasks`, not by TaskDescriptor::index). Deterministic, used
/// for timing comparisons that must not depend on the host machine.
inline SchedulerTrace simulate_scheme1(const std::vector<TaskDescriptor>& tasks, int p,
                                       const std::vector<double>& durations) {
  if (p < 1) throw std::invalid_argument("simulate_scheme1: need p >= 1");
  if (durations.size() != tasks.size())
    throw std::invalid_argument("simulate_scheme1: need one duration per task");
  SchedulerTrace tr;
  auto order = detail::priority_order(tasks);
  double t = 0.0;
  for (std::size_t base = 0; base < order.size(); base += p) {
    std::size_t n = std::min<std::size_t>(p, order.size() - base);
    double batch_end = t;
    for (std::size_t k = 0; k < n; ++k) {
      int i = order[base + k];
      double end = t + durations[i];
      tr.entries.push_back({tasks[i].index, static_cast<int>(k), t, end});
      tr.busy_ms += durations[i];
      batch_end = std::max(batch_end, end);
    }
    t = batch_end;
  }
  tr.makespan_ms = t;
  tr.idle_ms = p * tr.makespan_ms - tr.busy_ms;
  return tr;
}

inline SchedulerTrace simulate_scheme2(const std::vector<TaskDescriptor>& tasks, int p,
                                       const std::vector<double>& durations) {
  if (p < 1) throw std::invalid_argument("simulate_scheme2: need p >= 1");
  if (durations.size() != tasks.size())
    throw std::invalid_argument("simulate_scheme2: need one duration per task");
  SchedulerTrace tr;
  auto order = detail::priority_order(tasks);
  std::vector<double> avail(p, 0.0);  // list scheduling onto the earliest worker
  for (int i : order) {
    int w = 0;
    for (int c = 1; c < p; ++c)
      if (avail[c] < avail[w]) w = c;
    double start = avail[w];
    double end = start + durations[i];
    tr.entries.push_back({tasks[i].index, w, start, end});
    tr.busy_ms += durations[i];
    avail[w] = end;
    tr.makespan_ms = std::max(tr.makespan_ms, end);
  }
  tr.idle_ms = p * tr.makespan_ms - tr.busy_ms;
  return tr;
}

}  // namespace bqp

#endif  // BQP_SCHED_HPP
