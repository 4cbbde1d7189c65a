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

#include "imitater/netsim/message.hpp"

namespace imitater::netsim {

using smp::WireTag;

namespace {

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

} // namespace

WireTag tag_of(const Body &body) {
    return std::visit(overloaded{
                          [](const smp::MbDis &) { return WireTag::MbDis; },
                          [](const smp::MbAck &) { return WireTag::MbAck; },
                          [](const smp::MbChk &) { return WireTag::MbChk; },
                          [](const consensus::Proposal &) { return WireTag::Proposal; },
                          [](const consensus::Vote &) { return WireTag::Vote; },
                          [](const consensus::NewView &) { return WireTag::NewView; },
                          [](const consensus::BlockRequest &) { return WireTag::BlockRequest; },
                          [](const consensus::BlockResponse &) { return WireTag::BlockResponse; },
                          [](const baseline::MbFull &) { return WireTag::MbFull; },
                          [](const baseline::PullRequest &) { return WireTag::PullRequest; },
                          [](const baseline::PullResponse &) { return WireTag::PullResponse; },
                      },
                      body);
}

const char *tag_name(WireTag tag) {
    switch (tag) {
    case WireTag::MbDis:
        return "mb-dis";
    case WireTag::MbAck:
        return "mb-ack";
    case WireTag::MbChk:
        return "mb-chk";
    case WireTag::Proposal:
        return "proposal";
    case WireTag::Vote:
        return "vote";
    case WireTag::NewView:
        return "new-view";
    case WireTag::MbFull:
        return "mb-full";
    case WireTag::PullRequest:
        return "pull-request";
    case WireTag::PullResponse:
        return "pull-response";
    case WireTag::BlockRequest:
        return "block-request";
    case WireTag::BlockResponse:
        return "block-response";
    }
    return "unknown";
}

bool is_bulk(smp::WireTag tag) {
    using smp::WireTag;
    return tag == WireTag::MbDis || tag == WireTag::MbChk || tag == WireTag::MbFull || tag == WireTag::PullResponse;
}

Priority default_priority(WireTag tag) {
    switch (tag) {
    case WireTag::MbDis:
        return Priority::Background;
    case WireTag::MbChk:
    case WireTag::MbFull:
    case WireTag::PullResponse:
        return Priority::Bulk;
    default:
        return Priority::Control;
    }
}

MessagePtr make_message(Body body, std::size_t n, Priority priority) {
    auto m = std::make_shared<Message>();
    m->tag = tag_of(body);
    m->priority = priority;
    m->bytes = std::visit([n](const auto &b) { return b.wire_size(n); }, body);
    m->body = std::move(body);
    return m;
}

MessagePtr make_message(Body body, std::size_t n) {
    const auto priority = default_priority(tag_of(body));
    return make_message(std::move(body), n, priority);
}

Bytes serialize(const Message &m, std::size_t n) {
    return std::visit([n](const auto &b) { return b.serialize(n); }, m.body);
}

} // namespace imitater::netsim
