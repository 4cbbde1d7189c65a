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

#include "imitater/baseline/types.hpp"

#include "imitater/primitives/hash.hpp"

namespace imitater::baseline {

namespace {

void put_full(Writer &w, const FullMicroblock &mb) {
    w.digest(mb.block->id);
    w.blob(*mb.body);
    w.u32(static_cast<std::uint32_t>(mb.block->virtual_total));
    w.zeros(mb.block->virtual_total);
}

} // namespace

Digest microblock_id(ByteView body) {
    static constexpr std::uint8_t kTag[] = {'f', 'u', 'l', 'l'};
    return primitives::sha256({ByteView(kTag), body});
}

smp::AvailabilityCertificate make_ref(NodeId chain, Position position, const Digest &id) {
    if (position == 0)
        return smp::AvailabilityCertificate::genesis(chain);
    return smp::AvailabilityCertificate{chain, position, id, {}};
}

FullMicroblock make_full_microblock(NodeId chain, Position position, std::vector<smp::TxPtr> txs,
                                    const smp::AvailabilityCertificate &prev_ref, SimTime now, std::size_t n) {
    if (position == 0 || prev_ref.chain != chain || prev_ref.position + 1 != position)
        throw smp::ChainBreak("previous reference does not link to this position");
    auto body = std::make_shared<Bytes>(smp::serialize_body(chain, position, now, prev_ref, txs, n));
    auto mb = std::make_shared<smp::Microblock>();
    mb->chain = chain;
    mb->position = position;
    mb->created_at = now;
    mb->prev_ac = prev_ref;
    for (const auto &tx : txs)
        mb->virtual_total += tx->virtual_size;
    mb->txs = std::move(txs);
    mb->id = microblock_id(*body);
    mb->body_size = body->size();
    return FullMicroblock{std::move(mb), std::move(body)};
}

FullMicroblock parse_full_microblock(ByteView body, std::uint32_t virtual_total) {
    auto id = microblock_id(body);
    auto mb = std::make_shared<smp::Microblock>(smp::parse_body(body, id));
    if (mb->virtual_total != virtual_total)
        throw ProtocolError("virtual payload length mismatch");
    return FullMicroblock{std::move(mb), std::make_shared<Bytes>(body.begin(), body.end())};
}

Bytes MbFull::serialize(std::size_t n) const {
    Writer w(wire_size(n));
    w.u8(static_cast<std::uint8_t>(smp::WireTag::MbFull));
    put_full(w, mb);
    return w.take();
}

Bytes PullRequest::serialize(std::size_t n) const {
    Writer w(wire_size(n));
    w.u8(static_cast<std::uint8_t>(smp::WireTag::PullRequest));
    w.u32(chain);
    w.u64(position);
    w.digest(id);
    return w.take();
}

PullRequest PullRequest::parse(ByteView b) {
    Reader r(b);
    if (r.u8() != static_cast<std::uint8_t>(smp::WireTag::PullRequest))
        throw ProtocolError("unexpected message tag");
    PullRequest m;
    m.chain = r.u32();
    m.position = r.u64();
    m.id = r.digest();
    if (!r.done())
        throw ProtocolError("trailing bytes in message");
    return m;
}

Bytes PullResponse::serialize(std::size_t n) const {
    Writer w(wire_size(n));
    w.u8(static_cast<std::uint8_t>(smp::WireTag::PullResponse));
    w.digest(id);
    w.u8(mb ? 1 : 0);
    if (mb)
        put_full(w, *mb);
    return w.take();
}

} // namespace imitater::baseline
