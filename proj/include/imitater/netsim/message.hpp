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

#include <variant>

#include "imitater/baseline/types.hpp"
#include "imitater/consensus/types.hpp"

namespace imitater::netsim {

/// Uplink scheduling class. Control is consensus, acks and requests and is
/// always served first. Bulk carries data that is already ordered or requested
/// (chunks, full microblocks, pull responses). Background is new dispersal;
/// it alternates with bulk so neither starves.
enum class Priority : std::uint8_t { Control = 0, Bulk = 1, Background = 2 };
inline constexpr std::size_t kPriorityClasses = 3;

using Body = std::variant<smp::MbDis, smp::MbAck, smp::MbChk, consensus::Proposal, consensus::Vote,
                          consensus::NewView, consensus::BlockRequest, consensus::BlockResponse, baseline::MbFull,
                          baseline::PullRequest, baseline::PullResponse>;

struct Message {
    smp::WireTag tag;
    std::size_t bytes = 0;
    Priority priority = Priority::Control;
    Body body;
};
using MessagePtr = std::shared_ptr<const Message>;

smp::WireTag tag_of(const Body &body);
const char *tag_name(smp::WireTag tag);
Priority default_priority(smp::WireTag tag);
/// Microblock payload carriers; everything else is small control traffic.
bool is_bulk(smp::WireTag tag);

/// Wraps a payload with its exact wire size for a committee of n nodes.
MessagePtr make_message(Body body, std::size_t n);
MessagePtr make_message(Body body, std::size_t n, Priority priority);

/// Canonical bytes of the message (size equals Message::bytes).
Bytes serialize(const Message &m, std::size_t n);

} // namespace imitater::netsim
