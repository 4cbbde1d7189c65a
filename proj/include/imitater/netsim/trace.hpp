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

#include <iosfwd>
#include <vector>

#include "imitater/common.hpp"

namespace imitater::netsim {

enum class TraceKind : std::uint8_t { Submit, Ac, ChkBroadcast, Resolve, Commit, Execute, Message };

const char *to_string(TraceKind k);
TraceKind parse_trace_kind(const std::string &s);

/// One protocol event. Field use by kind:
///   Submit    node, client, seq, root = tx hash
///   Ac        node (disperser), chain, position, root
///   ChkBroadcast node, root
///   Resolve   node, chain, position, root, state (1 decoded, 2 empty), digest = content
///   Commit    node, index = height, root = block hash, seq = block view
///   Execute   node, index = log index, chain, position, client, seq, root = tx hash
///   Message   node (src), dst, state = wire tag, index = bytes
struct TraceEvent {
    SimTime time = 0;
    TraceKind kind = TraceKind::Submit;
    NodeId node = 0;
    NodeId chain = 0;
    Position position = 0;
    Digest root;
    Digest digest;
    std::uint64_t index = 0;
    std::uint32_t client = 0;
    std::uint64_t seq = 0;
    std::uint8_t state = 0;
    NodeId dst = 0;

    bool operator==(const TraceEvent &) const = default;
};

struct Trace {
    std::size_t n = 0;
    std::size_t f = 0;
    SimTime gst = 0;
    std::vector<NodeId> byzantine;
    std::vector<TraceEvent> events;

    bool honest(NodeId id) const;
    /// First line: run metadata; then one JSON object per event.
    void write_ndjson(std::ostream &out) const;
    static Trace read_ndjson(std::istream &in);
};

Digest digest_from_hex(const std::string &hex);

} // namespace imitater::netsim
