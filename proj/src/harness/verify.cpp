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

#include "imitater/harness/verify.hpp"

#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace imitater::harness {

using netsim::Trace;
using netsim::TraceEvent;
using netsim::TraceKind;

bool VerifyReport::ok() const {
    for (const auto &c : checks)
        if (!c.pass)
            return false;
    return true;
}

const CheckResult *VerifyReport::find(const std::string &name) const {
    for (const auto &c : checks)
        if (c.name == name)
            return &c;
    return nullptr;
}

std::string VerifyReport::to_text() const {
    std::ostringstream out;
    for (const auto &c : checks) {
        out << c.name << (c.pass ? " PASS" : " FAIL");
        if (!c.pass) {
            if (c.event)
                out << " at event " << *c.event;
            out << ": " << c.detail;
        }
        out << '\n';
    }
    return out.str();
}

namespace {

void fail(CheckResult &c, std::size_t index, std::string detail) {
    if (!c.pass)
        return;
    c.pass = false;
    c.event = index;
    c.detail = std::move(detail);
}

std::string slot_name(NodeId chain, Position pos) {
    return "chain " + std::to_string(chain) + " position " + std::to_string(pos);
}

struct Resolved {
    Digest root;
    Digest content;
    std::uint8_t state;
};

} // namespace

VerifyReport verify_run(const Trace &trace) {
    CheckResult safety{"safety", true, std::nullopt, {}};
    CheckResult totality{"totality", true, std::nullopt, {}};
    CheckResult uniqueness{"uniqueness", true, std::nullopt, {}};
    CheckResult consistency{"chain-consistency", true, std::nullopt, {}};
    CheckResult order{"order-keeping", true, std::nullopt, {}};
    CheckResult quality{"chain-quality", true, std::nullopt, {}};
    CheckResult retrieval{"at-most-once-retrieval", true, std::nullopt, {}};

    std::unordered_map<std::uint64_t, Digest> committed;    // height -> block
    std::unordered_map<std::uint64_t, Digest> executed;     // log index -> tx
    std::map<std::pair<NodeId, Position>, Digest> certified; // slot -> AC root
    std::map<std::pair<NodeId, Position>, Resolved> outcome;
    std::map<std::pair<NodeId, NodeId>, Position> resolved_top; // (node, chain) -> last position
    std::set<std::pair<NodeId, Digest>> broadcasts;
    std::unordered_map<std::uint32_t, NodeId> client_home;
    std::map<std::pair<NodeId, std::uint32_t>, std::uint64_t> last_seq; // (executor, client) -> seq
    std::map<NodeId, std::pair<std::uint64_t, std::uint64_t>> quality_by_node; // node -> (honest, total)

    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        const TraceEvent &e = trace.events[i];
        const bool honest = trace.honest(e.node);
        switch (e.kind) {
        case TraceKind::Submit:
            if (honest)
                client_home.emplace(e.client, e.node);
            break;
        case TraceKind::Ac: {
            auto [it, fresh] = certified.emplace(std::pair{e.chain, e.position}, e.root);
            if (!fresh && it->second != e.root)
                fail(uniqueness, i, "two certified roots at " + slot_name(e.chain, e.position));
            break;
        }
        case TraceKind::ChkBroadcast:
            if (honest && !broadcasts.emplace(e.node, e.root).second)
                fail(retrieval, i, "node " + std::to_string(e.node) + " broadcast chunks twice for " +
                                       e.root.short_hex());
            break;
        case TraceKind::Resolve: {
            if (!honest)
                break;
            auto &top = resolved_top[{e.node, e.chain}];
            if (e.position != top + 1)
                fail(totality, i, "node " + std::to_string(e.node) + " skipped to " + slot_name(e.chain, e.position));
            top = e.position;
            auto [it, fresh] = outcome.emplace(std::pair{e.chain, e.position}, Resolved{e.root, e.digest, e.state});
            if (!fresh) {
                if (it->second.root != e.root)
                    fail(consistency, i, "diverging roots at " + slot_name(e.chain, e.position));
                else if (it->second.state != e.state || it->second.content != e.digest)
                    fail(totality, i, "diverging outcome at " + slot_name(e.chain, e.position));
            }
            if (auto c = certified.find({e.chain, e.position});
                c != certified.end() && e.root != Digest{} && c->second != e.root && trace.honest(e.chain))
                fail(uniqueness, i, "resolved root differs from certified root at " + slot_name(e.chain, e.position));
            if (e.state == 1) {
                auto &q = quality_by_node[e.node];
                ++q.second;
                if (trace.honest(e.chain))
                    ++q.first;
            }
            break;
        }
        case TraceKind::Commit: {
            if (!honest)
                break;
            auto [it, fresh] = committed.emplace(e.index, e.root);
            if (!fresh && it->second != e.root)
                fail(safety, i, "conflicting commits at height " + std::to_string(e.index));
            break;
        }
        case TraceKind::Execute: {
            if (!honest)
                break;
            auto [it, fresh] = executed.emplace(e.index, e.root);
            if (!fresh && it->second != e.root)
                fail(safety, i, "logs diverge at index " + std::to_string(e.index));
            auto home = client_home.find(e.client);
            if (home != client_home.end()) {
                auto &last = last_seq[{e.node, e.client}];
                if (e.seq <= last)
                    fail(order, i,
                         "client " + std::to_string(e.client) + " seq " + std::to_string(e.seq) +
                             " executed after seq " + std::to_string(last) + " at node " + std::to_string(e.node));
                last = e.seq;
            }
            break;
        }
        case TraceKind::Message:
            break;
        }
    }

    // Chain quality is judged on the honest node that executed the most content.
    std::uint64_t best = 0;
    std::pair<std::uint64_t, std::uint64_t> q{0, 0};
    for (const auto &[node, counts] : quality_by_node)
        if (counts.second > best) {
            best = counts.second;
            q = counts;
        }
    if (q.second > 0 && 3 * q.first < 2 * q.second) {
        quality.pass = false;
        quality.detail = std::to_string(q.first) + " of " + std::to_string(q.second) +
                         " committed microblocks come from honest chains";
    }

    return VerifyReport{{safety, totality, uniqueness, consistency, order, quality, retrieval}};
}

} // namespace imitater::harness
