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

#include "imitater/smp/messages.hpp"

namespace imitater::smp {

namespace {

constexpr std::size_t kHeader = 1 + 4 + 8 + kLambda;

void put_header(Writer &w, WireTag tag, NodeId chain, Position position, const Digest &root) {
    w.u8(static_cast<std::uint8_t>(tag));
    w.u32(chain);
    w.u64(position);
    w.digest(root);
}

template <typename M>
void get_header(Reader &r, WireTag tag, M &m) {
    if (r.u8() != static_cast<std::uint8_t>(tag))
        throw ProtocolError("unexpected message tag");
    m.chain = r.u32();
    m.position = r.u64();
    m.root = r.digest();
}

void expect_done(const Reader &r) {
    if (!r.done())
        throw ProtocolError("trailing bytes in message");
}

} // namespace

void serialize_chunk(Writer &w, const Chunk &c) {
    w.u32(c.index);
    w.blob(c.data);
    w.u32(c.virtual_len);
    w.zeros(c.virtual_len);
}

Chunk parse_chunk(Reader &r) {
    Chunk c;
    c.index = r.u32();
    c.data = r.blob();
    c.virtual_len = r.u32();
    r.take(c.virtual_len);
    return c;
}

std::size_t chunk_wire_size(const Chunk &c) { return 4 + 4 + c.data.size() + 4 + c.virtual_len; }

void serialize_proof(Writer &w, const primitives::MerkleProof &p) {
    w.u32(static_cast<std::uint32_t>(p.siblings.size()));
    for (const auto &d : p.siblings)
        w.digest(d);
}

primitives::MerkleProof parse_proof(Reader &r) {
    primitives::MerkleProof p;
    auto count = r.u32();
    if (count > 64)
        throw ProtocolError("merkle proof too long");
    p.siblings.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i)
        p.siblings.push_back(r.digest());
    return p;
}

// -- Mb-Dis ------------------------------------------------------------------

std::size_t MbDis::wire_size(std::size_t n) const {
    return kHeader + prev_ac.wire_size(n) + chunk_wire_size(chunk) + 4 + proof.wire_size();
}

Bytes MbDis::serialize(std::size_t n) const {
    Writer w(wire_size(n));
    put_header(w, WireTag::MbDis, chain, position, root);
    prev_ac.serialize(w, n);
    serialize_chunk(w, chunk);
    serialize_proof(w, proof);
    return w.take();
}

MbDis MbDis::parse(ByteView b) {
    Reader r(b);
    MbDis m;
    get_header(r, WireTag::MbDis, m);
    m.prev_ac = AvailabilityCertificate::parse(r);
    m.chunk = parse_chunk(r);
    m.proof = parse_proof(r);
    expect_done(r);
    return m;
}

// -- Mb-Ack ------------------------------------------------------------------

std::size_t MbAck::wire_size(std::size_t) const { return kHeader + sig.wire_size(); }

Bytes MbAck::serialize(std::size_t n) const {
    Writer w(wire_size(n));
    put_header(w, WireTag::MbAck, chain, position, root);
    serialize_partial(w, sig);
    return w.take();
}

MbAck MbAck::parse(ByteView b) {
    Reader r(b);
    MbAck m;
    get_header(r, WireTag::MbAck, m);
    m.sig = parse_partial(r);
    expect_done(r);
    return m;
}

// -- Mb-Chk ------------------------------------------------------------------

std::size_t MbChk::wire_size(std::size_t) const { return kHeader + chunk_wire_size(chunk) + 4 + proof.wire_size(); }

Bytes MbChk::serialize(std::size_t n) const {
    Writer w(wire_size(n));
    put_header(w, WireTag::MbChk, chain, position, root);
    serialize_chunk(w, chunk);
    serialize_proof(w, proof);
    return w.take();
}

MbChk MbChk::parse(ByteView b) {
    Reader r(b);
    MbChk m;
    get_header(r, WireTag::MbChk, m);
    m.chunk = parse_chunk(r);
    m.proof = parse_proof(r);
    expect_done(r);
    return m;
}

} // namespace imitater::smp
