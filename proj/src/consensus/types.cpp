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

#include "imitater/consensus/types.hpp"

#include <algorithm>
#include <set>

#include "imitater/primitives/hash.hpp"
#include "imitater/smp/messages.hpp"

namespace imitater::consensus {

using primitives::sha256;
using smp::WireTag;

namespace {

constexpr std::uint8_t kNoJustify = 0;
constexpr std::uint8_t kWithQc = 1;
constexpr std::uint8_t kWithAggQc = 2;

Digest tagged(std::string_view tag, ByteView body) {
    ByteView t(reinterpret_cast<const std::uint8_t *>(tag.data()), tag.size());
    return sha256({t, body});
}

void expect_tag(Reader &r, WireTag tag) {
    if (r.u8() != static_cast<std::uint8_t>(tag))
        throw ProtocolError("unexpected message tag");
}

void expect_done(const Reader &r) {
    if (!r.done())
        throw ProtocolError("trailing bytes in message");
}

} // namespace

NodeId leader_of(View view, std::size_t n) {
    if (n < 4)
        throw ProtocolError("committee needs at least 4 nodes");
    return static_cast<NodeId>(view % n);
}

Digest vote_digest(View view, const Digest &block) {
    Writer w(40);
    w.u64(view);
    w.digest(block);
    return tagged("vote", w.bytes());
}

Digest new_view_digest(View view, const QuorumCertificate &qc) {
    Writer w(48);
    w.u64(view);
    w.u64(qc.view);
    w.digest(qc.block);
    return tagged("new-view", w.bytes());
}

// -- QC ----------------------------------------------------------------------

QuorumCertificate QuorumCertificate::genesis() { return QuorumCertificate{0, Block::genesis().hash, {}}; }

bool QuorumCertificate::is_genesis() const { return view == 0 && block == Block::genesis().hash && sig.empty(); }

void QuorumCertificate::serialize(Writer &w, std::size_t n) const {
    w.u64(view);
    w.digest(block);
    smp::serialize_aggregate(w, sig, n);
}

QuorumCertificate QuorumCertificate::parse(Reader &r) {
    QuorumCertificate qc;
    qc.view = r.u64();
    qc.block = r.digest();
    qc.sig = smp::parse_aggregate(r);
    return qc;
}

bool verify_qc(const QuorumCertificate &qc, const SignatureScheme &scheme) {
    if (qc.view == 0)
        return qc.is_genesis();
    return scheme.verify(vote_digest(qc.view, qc.block), qc.sig);
}

// -- AggQC -------------------------------------------------------------------

const QuorumCertificate &AggregatedQC::hqc() const {
    if (entries.empty())
        throw ProtocolError("empty aggregated QC");
    const QuorumCertificate *best = &entries.front().qc;
    for (const auto &e : entries)
        if (e.qc.view > best->view)
            best = &e.qc;
    return *best;
}

void AggregatedQC::serialize(Writer &w, std::size_t n) const {
    w.u64(view);
    w.u32(static_cast<std::uint32_t>(entries.size()));
    for (const auto &e : entries) {
        w.u32(e.sender);
        e.qc.serialize(w, n);
        smp::serialize_partial(w, e.sig);
    }
}

AggregatedQC AggregatedQC::parse(Reader &r) {
    AggregatedQC agg;
    agg.view = r.u64();
    auto count = r.u32();
    if (count > 4096)
        throw ProtocolError("aggregated QC too large");
    for (std::uint32_t i = 0; i < count; ++i) {
        AggEntry e;
        e.sender = r.u32();
        e.qc = QuorumCertificate::parse(r);
        e.sig = smp::parse_partial(r);
        agg.entries.push_back(std::move(e));
    }
    return agg;
}

std::size_t AggregatedQC::wire_size(std::size_t n) const {
    std::size_t s = 8 + 4;
    for (const auto &e : entries)
        s += 4 + e.qc.wire_size(n) + e.sig.wire_size();
    return s;
}

bool verify_agg_qc(const AggregatedQC &agg, const SignatureScheme &scheme) {
    std::set<NodeId> senders;
    for (const auto &e : agg.entries) {
        if (e.sender >= scheme.n() || e.sig.signer != e.sender || !senders.insert(e.sender).second)
            return false;
        if (e.qc.view >= agg.view)
            return false;
        if (!scheme.verify_partial(new_view_digest(agg.view, e.qc), e.sig) || !verify_qc(e.qc, scheme))
            return false;
    }
    return senders.size() >= scheme.quorum();
}

// -- Block -------------------------------------------------------------------

const Block &Block::genesis() {
    static const Block g = [] {
        Block b;
        b.hash = b.compute_hash(0);
        return b;
    }();
    return g;
}

const QuorumCertificate &Block::justify() const {
    if (qc)
        return *qc;
    if (agg_qc)
        return agg_qc->hqc();
    throw ProtocolError("block carries no justification");
}

void Block::serialize(Writer &w, std::size_t n) const {
    w.u64(view);
    if (qc) {
        w.u8(kWithQc);
        qc->serialize(w, n);
    } else if (agg_qc) {
        w.u8(kWithAggQc);
        agg_qc->serialize(w, n);
    } else {
        w.u8(kNoJustify);
    }
    w.digest(parent);
    w.u32(static_cast<std::uint32_t>(mbs.size()));
    for (const auto &ac : mbs)
        ac.serialize(w, n);
}

Block Block::parse(Reader &r, std::size_t n) {
    Block b;
    b.view = r.u64();
    switch (r.u8()) {
    case kNoJustify:
        break;
    case kWithQc:
        b.qc = QuorumCertificate::parse(r);
        break;
    case kWithAggQc:
        b.agg_qc = AggregatedQC::parse(r);
        break;
    default:
        throw ProtocolError("unknown block justification");
    }
    b.parent = r.digest();
    auto count = r.u32();
    if (count > n)
        throw ProtocolError("more certificates than chains");
    for (std::uint32_t i = 0; i < count; ++i)
        b.mbs.push_back(AvailabilityCertificate::parse(r));
    b.hash = b.compute_hash(n);
    return b;
}

std::size_t Block::wire_size(std::size_t n) const {
    std::size_t s = 8 + 1 + kLambda + 4;
    if (qc)
        s += qc->wire_size(n);
    else if (agg_qc)
        s += agg_qc->wire_size(n);
    for (const auto &ac : mbs)
        s += ac.wire_size(n);
    return s;
}

Digest Block::compute_hash(std::size_t n) const {
    Writer w(wire_size(n));
    serialize(w, n);
    return tagged("block", w.bytes());
}

// -- messages ----------------------------------------------------------------

Bytes Proposal::serialize(std::size_t n) const {
    Writer w(wire_size(n));
    w.u8(static_cast<std::uint8_t>(WireTag::Proposal));
    block->serialize(w, n);
    return w.take();
}

Proposal Proposal::parse(ByteView b, std::size_t n) {
    Reader r(b);
    expect_tag(r, WireTag::Proposal);
    auto block = std::make_shared<Block>(Block::parse(r, n));
    expect_done(r);
    return Proposal{std::move(block)};
}

Bytes Vote::serialize(std::size_t n) const {
    Writer w(wire_size(n));
    w.u8(static_cast<std::uint8_t>(WireTag::Vote));
    w.u64(view);
    w.digest(block);
    smp::serialize_partial(w, sig);
    ac.serialize(w, n);
    return w.take();
}

Vote Vote::parse(ByteView b) {
    Reader r(b);
    expect_tag(r, WireTag::Vote);
    Vote v;
    v.view = r.u64();
    v.block = r.digest();
    v.sig = smp::parse_partial(r);
    v.ac = AvailabilityCertificate::parse(r);
    expect_done(r);
    return v;
}

Bytes NewView::serialize(std::size_t n) const {
    Writer w(wire_size(n));
    w.u8(static_cast<std::uint8_t>(WireTag::NewView));
    w.u64(view);
    hqc.serialize(w, n);
    smp::serialize_partial(w, sig);
    ac.serialize(w, n);
    return w.take();
}

NewView NewView::parse(ByteView b) {
    Reader r(b);
    expect_tag(r, WireTag::NewView);
    NewView m;
    m.view = r.u64();
    m.hqc = QuorumCertificate::parse(r);
    m.sig = smp::parse_partial(r);
    m.ac = AvailabilityCertificate::parse(r);
    expect_done(r);
    return m;
}

Bytes BlockRequest::serialize(std::size_t n) const {
    Writer w(wire_size(n));
    w.u8(static_cast<std::uint8_t>(WireTag::BlockRequest));
    w.digest(hash);
    return w.take();
}

BlockRequest BlockRequest::parse(ByteView b) {
    Reader r(b);
    expect_tag(r, WireTag::BlockRequest);
    BlockRequest m{r.digest()};
    expect_done(r);
    return m;
}

Bytes BlockResponse::serialize(std::size_t n) const {
    Writer w(wire_size(n));
    w.u8(static_cast<std::uint8_t>(WireTag::BlockResponse));
    block->serialize(w, n);
    return w.take();
}

BlockResponse BlockResponse::parse(ByteView b, std::size_t n) {
    Reader r(b);
    expect_tag(r, WireTag::BlockResponse);
    auto block = std::make_shared<Block>(Block::parse(r, n));
    expect_done(r);
    return BlockResponse{std::move(block)};
}

// -- utilities ---------------------------------------------------------------

QuorumCertificate create_qc(std::span<const std::pair<NodeId, Vote>> votes, const SignatureScheme &scheme) {
    if (votes.empty())
        throw primitives::ThresholdNotMet("no votes");
    const auto view = votes.front().second.view;
    const auto block = votes.front().second.block;
    std::vector<PartialSignature> partials;
    for (const auto &[sender, v] : votes) {
        if (v.view != view || v.block != block)
            throw ProtocolError("votes name different blocks");
        if (v.sig.signer == sender)
            partials.push_back(v.sig);
    }
    return QuorumCertificate{view, block, scheme.combine(vote_digest(view, block), partials)};
}

AggregatedQC create_agg_qc(View view, std::span<const std::pair<NodeId, NewView>> new_views,
                           const SignatureScheme &scheme) {
    AggregatedQC agg;
    agg.view = view;
    std::set<NodeId> senders;
    for (const auto &[sender, nv] : new_views) {
        if (nv.view != view || nv.sig.signer != sender || nv.hqc.view >= view || !senders.insert(sender).second)
            continue;
        if (!scheme.verify_partial(new_view_digest(view, nv.hqc), nv.sig) || !verify_qc(nv.hqc, scheme))
            continue;
        agg.entries.push_back(AggEntry{sender, nv.hqc, nv.sig});
        if (agg.entries.size() == scheme.quorum())
            break;
    }
    if (agg.entries.size() < scheme.quorum())
        throw primitives::ThresholdNotMet("not enough New-View messages");
    return agg;
}

Block create_block(View view, std::optional<QuorumCertificate> qc, std::optional<AggregatedQC> agg_qc,
                   const Block &parent, std::vector<AvailabilityCertificate> acs, std::size_t n) {
    if (qc.has_value() == agg_qc.has_value())
        throw ProtocolError("a block carries exactly one of qc and agg_qc");
    std::sort(acs.begin(), acs.end(), [](const auto &a, const auto &b) { return a.chain < b.chain; });
    for (std::size_t i = 1; i < acs.size(); ++i)
        if (acs[i].chain == acs[i - 1].chain)
            throw ProtocolError("one certificate per chain");
    Block b;
    b.view = view;
    b.qc = std::move(qc);
    b.agg_qc = std::move(agg_qc);
    b.parent = parent.hash;
    b.mbs = std::move(acs);
    b.hash = b.compute_hash(n);
    return b;
}

bool safe_proposal(const Block &b, View current_view, const SignatureScheme &scheme) {
    if (b.view == 0 || b.view < current_view)
        return false;
    for (std::size_t i = 0; i < b.mbs.size(); ++i) {
        if (i > 0 && b.mbs[i].chain <= b.mbs[i - 1].chain)
            return false;
        if (!smp::verify_ac(b.mbs[i], scheme))
            return false;
    }
    if (b.qc && !b.agg_qc) {
        return b.view == b.qc->view + 1 && b.parent == b.qc->block && verify_qc(*b.qc, scheme);
    }
    if (b.agg_qc && !b.qc) {
        return b.view == b.agg_qc->view && verify_agg_qc(*b.agg_qc, scheme) && b.parent == b.agg_qc->hqc().block;
    }
    return false;
}

} // namespace imitater::consensus
