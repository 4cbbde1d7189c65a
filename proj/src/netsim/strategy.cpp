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

#include "imitater/netsim/strategy.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace imitater::netsim {

namespace {

constexpr std::array kNames = {
    std::pair{StrategyKind::Honest, "Honest"},
    std::pair{StrategyKind::Crash, "Crash"},
    std::pair{StrategyKind::SilentLeader, "SilentLeader"},
    std::pair{StrategyKind::EquivocatingLeader, "EquivocatingLeader"},
    std::pair{StrategyKind::CensoringLeader, "CensoringLeader"},
    std::pair{StrategyKind::DelayedVoter, "DelayedVoter"},
    std::pair{StrategyKind::EquivocateDisperser, "EquivocateDisperser"},
    std::pair{StrategyKind::Flooder, "Flooder"},
    std::pair{StrategyKind::PullSpammer, "PullSpammer"},
};

std::string normalize(const std::string &s) {
    std::string out;
    for (char c : s)
        if (c != '-' && c != '_' && c != ' ')
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

} // namespace

std::string to_string(StrategyKind k) {
    for (const auto &[kind, name] : kNames)
        if (kind == k)
            return name;
    return "Unknown";
}

StrategyKind parse_strategy(const std::string &name) {
    const auto key = normalize(name);
    for (const auto &[kind, label] : kNames)
        if (normalize(label) == key)
            return kind;
    throw std::invalid_argument("unknown strategy: " + name);
}

std::vector<NodeId> spread_ids(std::size_t n, std::size_t count) {
    std::vector<NodeId> ids;
    if (count == 0)
        return ids;
    if (count > n)
        throw std::invalid_argument("more Byzantine nodes than nodes");
    for (std::size_t i = 0; i < count; ++i)
        ids.push_back(static_cast<NodeId>((2 * i + 1) * n / (2 * count)));
    return ids;
}

} // namespace imitater::netsim
