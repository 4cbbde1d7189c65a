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
#include <vector>

#include "imitater/common.hpp"

namespace imitater::netsim {

enum class StrategyKind {
    Honest,
    Crash,               ///< silent from the start
    SilentLeader,        ///< never proposes
    EquivocatingLeader,  ///< sends two different blocks to the two halves of the committee
    CensoringLeader,     ///< drops chosen chains' ACs from its proposals
    DelayedVoter,        ///< holds every vote back for one base timeout
    EquivocateDisperser, ///< two microblocks per odd position, non-codeword chunks at even ones
    Flooder,             ///< disperses as fast as ACs allow and never reports its ACs
    PullSpammer,         ///< pull-based mempool only: requests every microblock from every honest node
};

struct Strategy {
    StrategyKind kind = StrategyKind::Honest;
    std::vector<NodeId> censored; ///< CensoringLeader targets

    bool honest() const { return kind == StrategyKind::Honest; }
    bool byzantine() const { return !honest(); }
};

std::string to_string(StrategyKind k);
/// Accepts the names printed by to_string (case-insensitive, '-' or '_' optional).
StrategyKind parse_strategy(const std::string &name);

/// Node ids for `count` Byzantine nodes spread evenly over 0..n-1.
std::vector<NodeId> spread_ids(std::size_t n, std::size_t count);

} // namespace imitater::netsim
