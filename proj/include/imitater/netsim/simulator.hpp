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

#include <map>
#include <string>

#include "imitater/baseline/pull_replica.hpp"
#include "imitater/netsim/trace.hpp"
#include "imitater/replica/imitater_replica.hpp"

namespace imitater::netsim {

enum class BandwidthKind { Constant, UniformJitter, StepChange };

/// Per-node link rate process; uplink and downlink of a node follow the same rate.
struct BandwidthProfile {
    BandwidthKind kind = BandwidthKind::Constant;
    double mean_bps = 100e6;
    double jitter = 0.3;                      ///< UniformJitter: +/- fraction of the mean
    SimTime jitter_period = 100 * kMillisecond; ///< UniformJitter: rate redrawn per period
    SimTime step_at = 0;                      ///< StepChange: time of the change
    double step_factor = 0.5;                 ///< StepChange: rate multiplier after step_at
};

enum class Protocol { Imitater, Baseline };
std::string to_string(Protocol p);
Protocol parse_protocol(const std::string &s);

struct SimConfig {
    Protocol protocol = Protocol::Imitater;
    std::size_t n = 4;
    std::size_t f = 1;
    std::uint64_t seed = 1;
    std::string signature = "sim";

    SimTime delta = 100 * kMillisecond;  ///< post-GST bound on propagation delay
    SimTime gst = -1;                    ///< negative: 10% of duration
    SimTime min_propagation = 5 * kMillisecond;
    SimTime max_propagation = 40 * kMillisecond;
    double pre_gst_delay_probability = 0.3;
    BandwidthProfile bandwidth;

    double tx_rate = 200;               ///< transactions per second per honest node
    std::uint32_t tx_size = 256;        ///< modeled bytes per transaction
    std::uint32_t tx_data = 8;          ///< bytes of real payload inside each transaction
    std::uint32_t clients_per_node = 4;
    SimTime duration = 5 * kSecond;
    SimTime drain = 3 * kSecond;        ///< run on without new clients so commits settle

    std::map<NodeId, Strategy> byzantine;

    // protocol knobs
    std::size_t batch_size = 256;
    std::uint64_t k_threshold = 32;
    bool guard_enabled = true;
    bool idle_balancing = true;
    SimTime initial_tau = 20 * kMillisecond;
    SimTime base_timeout = -1;          ///< negative: 4 * delta
    SimTime baseline_backlog = 2 * kMillisecond;
    SimTime baseline_pull_delay = 400 * kMillisecond;

    bool record_trace = false;
    bool record_messages = false;
    bool keep_logs = true;
    SimTime sample_interval = 50 * kMillisecond;

    SimTime effective_gst() const { return gst >= 0 ? gst : duration / 10; }
    SimTime effective_timeout() const { return base_timeout > 0 ? base_timeout : 4 * delta; }
    bool is_honest(NodeId id) const;
    /// Throws std::invalid_argument when n != 3f+1, too many Byzantine nodes, etc.
    void validate() const;
};

struct PacerSample {
    SimTime time = 0;
    NodeId node = 0;
    SimTime tau = 0;
    std::uint64_t dispersed = 0;
    std::uint64_t retrieved = 0;
};

struct Metrics {
    std::uint64_t submitted = 0;
    std::uint64_t committed = 0;          ///< mean over honest nodes, whole run
    double throughput = 0;                ///< tx/s in the steady window, mean over honest nodes
    std::vector<double> window_throughput; ///< 10 equal windows across the steady window
    double latency_mean_ms = 0;
    double latency_p50_ms = 0;
    double latency_p95_ms = 0;
    std::uint64_t latency_samples = 0;
    std::uint64_t max_views_to_commit = 0; ///< over transactions submitted after GST
    std::uint64_t uncommitted_after_gst = 0;
    std::map<std::string, std::uint64_t> bytes_by_type;
    std::map<std::string, std::uint64_t> messages_by_type;
    std::vector<std::uint64_t> egress_bytes;    ///< per node, excluding self-delivery
    std::vector<std::uint64_t> memory_high_water; ///< per node, mempool bytes
    std::vector<std::uint64_t> max_held_positions; ///< per chain, max over honest nodes and time
    std::uint64_t min_committed_height = 0;
    std::uint64_t max_view = 0;
    std::uint64_t microblocks_committed = 0; ///< slots executed at the reference honest node
    std::uint64_t microblocks_honest = 0;
    bool logs_consistent = true;
    std::vector<PacerSample> pacer;
    /// (time, max over honest nodes of held positions) per chain, one row per sample.
    std::vector<std::pair<SimTime, std::vector<std::uint64_t>>> held_series;

    double chain_quality() const;
    /// Compact deterministic JSON (maps ordered, floats with fixed precision).
    std::string to_json() const;
};

struct RunResult {
    Metrics metrics;
    Trace trace;
    /// Committed logs of honest nodes, one export per node.
    std::map<NodeId, std::string> logs;
};

/// Deterministic discrete-event simulation of one configuration.
RunResult run(const SimConfig &config);

/// Serialization time of `bytes` at `bps`, rounded up to whole microseconds.
SimTime transmission_time(std::uint64_t bytes, double bps);

/// Fluid downlink: a message starts arriving at up_start + prop, the receiver
/// drains it at down_bps behind earlier arrivals, and it cannot complete before
/// its last byte left the sender (up_done + prop). Advances `down_free`.
/// Control messages skip the queue but still push queued bulk data back.
SimTime deliver_model(SimTime up_start, SimTime up_done, SimTime prop, std::uint64_t bytes, double down_bps,
                      SimTime &down_free, bool control = false);

/// Bytes per microblock of the two mempool phases, measured from real messages.
struct PhaseBytes {
    double dispersal = 0;
    double retrieval = 0;
};
/// Disperses and retrieves one microblock of m body bytes among n = 3f+1 mempools
/// (every message counted, self-delivery included) and checks every node decodes it.
PhaseBytes measure_phase_bytes(std::size_t n, std::size_t m, std::uint64_t seed = 1);

/// Closed-form byte costs of the two phases.
double dispersal_formula(std::size_t n, std::size_t m);
double retrieval_formula(std::size_t n, std::size_t m);

} // namespace imitater::netsim
