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

#include "imitater/smp/types.hpp"

#include "imitater/primitives/hash.hpp"

namespace imitater::smp {

using primitives::sha256;

Transaction Transaction::make(std::uint32_t client, std::uint64_t seq, TxOp op, std::uint32_t key,
                              std::int64_t value, Bytes data, std::uint32_t virtual_size) {
    Transaction tx;
    tx.client = client;
    tx.seq = seq;
    tx.op = static_cast<std::uint8_t>(op);
    tx.key = key;
    tx.value = value;
    tx.data = std::move(data);
    tx.virtual_size = virtual_size;
    tx.hash = tx.compute_hash();
    return tx;
}

void Transaction::serialize(Writer &w) const {
    w.u32(client);
    w.u64(seq);
    w.u8(op);
    w.u32(key);
    w.i64(value);
    w.blob(data);
    w.u32(virtual_size);
}

Transaction Transaction::parse(Reader &r) {
    Transaction tx;
    tx.client = r.u32();
    tx.seq = r.u64();
    tx.op = r.u8();
    tx.key = r.u32();
    tx.value = r.i64();
    tx.data = r.blob();
    tx.virtual_size = r.u32();
    tx.hash = tx.compute_hash();
    return tx;
}

Digest Transaction::compute_hash() const {
    Writer w(encoded_size());
    serialize(w);
    return sha256(w.bytes());
}

// -- availability certificates ---------------------------------------------

Digest AvailabilityCertificate::ack_digest(NodeId chain, Position position, const Digest &root) {
    static constexpr std::uint8_t kTag[] = {'m', 'b', '-', 'a', 'c', 'k'};
    Writer w(64);
    w.u32(chain);
    w.u64(position);
    w.digest(root);
    return sha256({ByteView(kTag), w.bytes()});
}

void AvailabilityCertificate::serialize(Writer &w, std::size_t n) const {
    w.u32(chain);
    w.u64(position);
    w.digest(root);
    serialize_aggregate(w, sig, n);
}

AvailabilityCertificate AvailabilityCertificate::parse(Reader &r) {
    AvailabilityCertificate ac;
    ac.chain = r.u32();
    ac.position = r.u64();
    ac.root = r.digest();
    ac.sig = parse_aggregate(r);
    return ac;
}

bool verify_ac(const AvailabilityCertificate &ac, const SignatureScheme &scheme) {
    if (ac.chain >= scheme.n())
        return false;
    if (ac.position == 0)
        return ac.is_genesis();
    return scheme.verify(AvailabilityCertificate::ack_digest(ac.chain, ac.position, ac.root), ac.sig);
}

void serialize_aggregate(Writer &w, const AggregateSignature &sig, std::size_t n) {
    Bytes bitmap((n + 7) / 8, 0);
    for (auto s : sig.signers) {
        if (s >= n)
            throw ProtocolError("signer outside committee");
        bitmap[s / 8] |= static_cast<std::uint8_t>(1u << (s % 8));
    }
    w.blob(bitmap);
    w.blob(sig.material);
}

AggregateSignature parse_aggregate(Reader &r) {
    AggregateSignature sig;
    auto bitmap = r.blob();
    for (std::size_t i = 0; i < bitmap.size() * 8; ++i)
        if (bitmap[i / 8] & (1u << (i % 8)))
            sig.signers.push_back(static_cast<NodeId>(i));
    sig.material = r.blob();
    return sig;
}

void serialize_partial(Writer &w, const PartialSignature &sig) {
    w.u32(sig.signer);
    w.blob(sig.material);
}

PartialSignature parse_partial(Reader &r) {
    PartialSignature sig;
    sig.signer = r.u32();
    sig.material = r.blob();
    return sig;
}

// -- microblocks -------------------------------------------------------------

Bytes serialize_body(NodeId chain, Position position, SimTime created_at, const AvailabilityCertificate &prev_ac,
                     std::span<const TxPtr> txs, std::size_t n) {
    std::size_t hint = 64 + prev_ac.wire_size(n);
    for (const auto &tx : txs)
        hint += tx->encoded_size();
    Writer w(hint);
    w.u32(chain);
    w.u64(position);
    w.i64(created_at);
    prev_ac.serialize(w, n);
    w.u32(static_cast<std::uint32_t>(txs.size()));
    for (const auto &tx : txs)
        tx->serialize(w);
    return w.take();
}

Microblock parse_body(ByteView body, const Digest &id) {
    Reader r(body);
    Microblock mb;
    mb.chain = r.u32();
    mb.position = r.u64();
    mb.created_at = r.i64();
    mb.prev_ac = AvailabilityCertificate::parse(r);
    auto count = r.u32();
    // Each transaction takes at least 33 bytes; reject counts that cannot fit.
    if (count > r.remaining() / 33 + 1)
        throw ProtocolError("transaction count exceeds body");
    mb.txs.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        auto tx = std::make_shared<Transaction>(Transaction::parse(r));
        mb.virtual_total += tx->virtual_size;
        mb.txs.push_back(std::move(tx));
    }
    if (!r.done())
        throw ProtocolError("trailing bytes in microblock body");
    mb.id = id;
    mb.body_size = body.size();
    return mb;
}

Encoding encode_body(ByteView body, const CodingParams &params) {
    Encoding enc;
    enc.chunks = primitives::encode_framed(body, params);
    enc.tree = primitives::merkle_build(enc.chunks);
    enc.frame_size = body.size() + 8;
    return enc;
}

BuiltMicroblock make_microblock(NodeId chain, Position position, std::vector<TxPtr> txs,
                                const AvailabilityCertificate &prev_ac, SimTime now, const CodingParams &params) {
    if (position == 0)
        throw ChainBreak("position 0 is reserved for the genesis certificate");
    if (prev_ac.chain != chain || prev_ac.position + 1 != position)
        throw ChainBreak("previous certificate does not link to this position");
    if (position == 1 && !prev_ac.is_genesis())
        throw ChainBreak("first microblock must link to the genesis certificate");

    auto body = serialize_body(chain, position, now, prev_ac, txs, params.n);
    auto enc = std::make_shared<Encoding>(encode_body(body, params));

    auto mb = std::make_shared<Microblock>();
    mb->chain = chain;
    mb->position = position;
    mb->created_at = now;
    mb->prev_ac = prev_ac;
    for (const auto &tx : txs)
        mb->virtual_total += tx->virtual_size;
    mb->txs = std::move(txs);
    mb->id = enc->tree.root;
    mb->body_size = body.size();
    return BuiltMicroblock{std::move(mb), std::move(enc)};
}

} // namespace imitater::smp
