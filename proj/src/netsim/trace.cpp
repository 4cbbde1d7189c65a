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

#include "imitater/netsim/trace.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace imitater::netsim {

using nlohmann::json;

namespace {

constexpr std::array<const char *, 7> kKinds = {"submit", "ac", "chk", "resolve", "commit", "execute", "msg"};

} // namespace

const char *to_string(TraceKind k) { return kKinds.at(static_cast<std::size_t>(k)); }

TraceKind parse_trace_kind(const std::string &s) {
    for (std::size_t i = 0; i < kKinds.size(); ++i)
        if (s == kKinds[i])
            return static_cast<TraceKind>(i);
    throw std::invalid_argument("unknown trace event kind: " + s);
}

Digest digest_from_hex(const std::string &hex) {
    if (hex.size() != 2 * kLambda)
        throw std::invalid_argument("digest must be 64 hex characters");
    Digest d;
    for (std::size_t i = 0; i < kLambda; ++i)
        d.bytes()[i] = static_cast<std::uint8_t>(std::stoul(hex.substr(2 * i, 2), nullptr, 16));
    return d;
}

bool Trace::honest(NodeId id) const { return std::find(byzantine.begin(), byzantine.end(), id) == byzantine.end(); }

void Trace::write_ndjson(std::ostream &out) const {
    out << json{{"n", n}, {"f", f}, {"gst", gst}, {"byzantine", byzantine}}.dump() << '\n';
    for (const auto &e : events) {
        json j{{"t", e.time}, {"kind", to_string(e.kind)}, {"node", e.node}};
        switch (e.kind) {
        case TraceKind::Submit:
            j.update({{"client", e.client}, {"seq", e.seq}, {"tx", e.root.hex()}});
            break;
        case TraceKind::Ac:
            j.update({{"chain", e.chain}, {"position", e.position}, {"root", e.root.hex()}});
            break;
        case TraceKind::ChkBroadcast:
            j.update({{"root", e.root.hex()}});
            break;
        case TraceKind::Resolve:
            j.update({{"chain", e.chain},
                      {"position", e.position},
                      {"root", e.root.hex()},
                      {"state", e.state == 1 ? "decoded" : "empty"},
                      {"content", e.digest.hex()}});
            break;
        case TraceKind::Commit:
            j.update({{"height", e.index}, {"view", e.seq}, {"block", e.root.hex()}});
            break;
        case TraceKind::Execute:
            j.update({{"index", e.index},
                      {"chain", e.chain},
                      {"position", e.position},
                      {"client", e.client},
                      {"seq", e.seq},
                      {"tx", e.root.hex()}});
            break;
        case TraceKind::Message:
            j.update({{"dst", e.dst}, {"type", e.state}, {"bytes", e.index}});
            break;
        }
        out << j.dump() << '\n';
    }
}

Trace Trace::read_ndjson(std::istream &in) {
    Trace t;
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("empty trace");
    auto meta = json::parse(line);
    t.n = meta.at("n").get<std::size_t>();
    t.f = meta.at("f").get<std::size_t>();
    t.gst = meta.at("gst").get<SimTime>();
    t.byzantine = meta.at("byzantine").get<std::vector<NodeId>>();
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto j = json::parse(line);
        TraceEvent e;
        e.time = j.at("t").get<SimTime>();
        e.kind = parse_trace_kind(j.at("kind").get<std::string>());
        e.node = j.at("node").get<NodeId>();
        auto hex = [&](const char *key) { return digest_from_hex(j.at(key).get<std::string>()); };
        switch (e.kind) {
        case TraceKind::Submit:
            e.client = j.at("client");
            e.seq = j.at("seq");
            e.root = hex("tx");
            break;
        case TraceKind::Ac:
            e.chain = j.at("chain");
            e.position = j.at("position");
            e.root = hex("root");
            break;
        case TraceKind::ChkBroadcast:
            e.root = hex("root");
            break;
        case TraceKind::Resolve:
            e.chain = j.at("chain");
            e.position = j.at("position");
            e.root = hex("root");
            e.state = j.at("state").get<std::string>() == "decoded" ? 1 : 2;
            e.digest = hex("content");
            break;
        case TraceKind::Commit:
            e.index = j.at("height");
            e.seq = j.at("view");
            e.root = hex("block");
            break;
        case TraceKind::Execute:
            e.index = j.at("index");
            e.chain = j.at("chain");
            e.position = j.at("position");
            e.client = j.at("client");
            e.seq = j.at("seq");
            e.root = hex("tx");
            break;
        case TraceKind::Message:
            e.dst = j.at("dst");
            e.state = j.at("type");
            e.index = j.at("bytes");
            break;
        }
        t.events.push_back(e);
    }
    return t;
}

} // namespace imitater::netsim
