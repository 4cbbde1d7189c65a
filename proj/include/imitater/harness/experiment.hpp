/**
 * Copyright 2026 The Imitater Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "imitater/netsim/simulator.hpp"

namespace imitater::harness {

/// A parameter sweep. Every combination of the axes is one point; each point runs
/// once per seed. Empty axes fall back to the matching field of `base`.
struct ExperimentSpec {
    std::string name = "run";
    netsim::SimConfig base;
    std::vector<netsim::Protocol> protocols;
    std::vector<std::size_t> nodes;
    std::vector<std::size_t> faulty;          ///< number of Byzantine nodes
    bool faulty_max = false;                  ///< use floor((n-1)/3) faulty nodes at every n
    std::vector<std::string> strategies;      ///< faulty-node mix for imitater, e.g. "crash+flooder"
    std::vector<std::string> baseline_strategies; ///< same for the baseline; empty: reuse `strategies`
    std::vector<double> bandwidth_mbps;
    std::vector<std::size_t> batch_sizes;
    /// Where faulty ids go: "spread" evenly over the committee, or "tail" (the
    /// highest ids, so faulty leaders are consecutive in the rotation).
    std::string placement = "spread";
    std::uint64_t first_seed = 1;
    std::size_t seeds = 1;
    std::size_t threads = 1;
    std::filesystem::path out_dir = "out";
    bool write_trace = false;
};

struct MetricsRow {
    std::string status = "ok"; ///< "ok" or "warning"
    std::string note;
    std::string protocol;
    std::size_t n = 0;
    std::size_t f = 0;
    std::size_t faulty = 0;
    std::string strategy;
    double bandwidth_mbps = 0;
    std::size_t batch = 0;
    std::uint64_t seed = 0;
    double throughput = 0;
    double latency_mean_ms = 0;
    double latency_p95_ms = 0;
    std::uint64_t bytes_dispersal = 0;
    std::uint64_t bytes_retrieval = 0;
    std::uint64_t bytes_consensus = 0;
    std::uint64_t memory_high_water = 0;
    std::uint64_t committed = 0;
    bool verified = true;
};

extern const char *const kCsvHeader;
void write_csv(std::ostream &out, const std::vector<MetricsRow> &rows);
/// Mean and sample standard deviation of every (point) across seeds.
void write_summary_csv(std::ostream &out, const std::vector<MetricsRow> &rows);

/// A built sweep point: the configuration plus its row template.
struct Point {
    netsim::SimConfig config;
    MetricsRow row;
    bool feasible = true;
};

std::vector<Point> expand_points(const ExperimentSpec &spec);
/// Assign a strategy mix ("crash+flooder" alternates) to `count` node ids.
std::map<NodeId, netsim::Strategy> assign_strategies(std::size_t n, std::size_t count, const std::string &mix,
                                                     const std::string &placement = "spread");
MetricsRow run_point(const Point &point, bool verify, const std::filesystem::path *trace_path = nullptr);

/// Runs every (point, seed), writes metrics.csv, summary.csv and plots/<name>.json
/// under spec.out_dir, and returns the rows in point order.
std::vector<MetricsRow> run_experiment(const ExperimentSpec &spec);

/// Reads a key = value document with [sections]; see README for the keys.
ExperimentSpec load_spec(const std::filesystem::path &path);
ExperimentSpec parse_spec(std::istream &in);

/// Built-in sweeps mirroring the faulty-count and scalability figures.
ExperimentSpec fig3_spec();
ExperimentSpec fig4_spec();         ///< saturated throughput
ExperimentSpec fig4_latency_spec(); ///< commit latency at moderate load

} // namespace imitater::harness
