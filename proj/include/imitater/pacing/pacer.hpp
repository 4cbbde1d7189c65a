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

#include <optional>

#include "imitater/common.hpp"

namespace imitater::pacing {

struct PacerConfig {
    SimTime initial_tau = 20 * kMillisecond;
    SimTime alpha = 2 * kMillisecond;
    SimTime tau_min = kMillisecond;
    SimTime tau_max = 1000 * kMillisecond;
    std::uint64_t threshold = 4;
    std::size_t batch_size = 256;
    bool idle_balancing = true;

    /// alpha = 10% of the initial interval, bounds [1 ms, 1000 ms].
    static PacerConfig with_initial(SimTime initial_tau);
    void validate() const;
};

/// Dispersal-rate controller: the interval grows while too many own microblocks
/// are dispersed but not yet retrieved, and shrinks otherwise.
struct PacerState {
    PacerConfig config;
    SimTime tau = 0;
    std::uint64_t dispersed = 0; ///< N_d
    std::uint64_t retrieved = 0; ///< N_r

    explicit PacerState(PacerConfig cfg = {});
    std::uint64_t gap() const { return dispersed > retrieved ? dispersed - retrieved : 0; }
};

/// Adjusts tau after a dispersal and returns it.
SimTime pacer_step(PacerState &state);

/// Number of pending transactions to package now (0 means an empty microblock), or
/// nullopt when no dispersal should start. Fires at most once per tau and only once
/// the predecessor's AC exists; an empty microblock is produced only with idle
/// balancing on and when `chain_idle` (nothing of this chain awaits commitment).
std::optional<std::size_t> next_dispersal(const PacerState &state, SimTime now, std::optional<SimTime> last_dispersal,
                                          std::size_t pending, bool prev_ac_ready, bool chain_idle);

enum class GuardDecision { Allow, Withhold };

/// Withholds acks for positions more than k ahead of the chain's last commit.
GuardDecision over_distribution_guard(NodeId chain, Position dis_position, Position last_committed, std::uint64_t k);

} // namespace imitater::pacing
