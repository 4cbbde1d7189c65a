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

#include "imitater/smp/mempool.hpp"

#include <algorithm>

namespace imitater::smp {

const char *to_string(EntryState s) {
    switch (s) {
    case EntryState::Pending:
        return "pending";
    case EntryState::Decoded:
        return "decoded";
    case EntryState::Empty:
        return "empty";
    }
    return "?";
}

Mempool::Mempool(NodeId self, CodingParams params, const SignatureScheme &scheme, primitives::Signer signer)
    : self_(self), params_(params), scheme_(scheme), signer_(std::move(signer)) {
    params_.validate();
    if (self_ >= params_.n)
        throw ProtocolError("node id outside committee");
    chains_.resize(params_.n);
    gc_floor_.assign(params_.n, 0);
}

// -- dispersal ---------------------------------------------------------------

std::vector<MbDis> Mempool::start_dispersal(const BuiltMicroblock &mb) {
    const auto &block = *mb.block;
    if (block.chain != self_)
        throw ProtocolError("can only disperse on the local chain");
    if (!dispersed_.insert(block.position).second)
        throw ProtocolError("position already dispersed");
    expect_acks(block.position, block.id);
    own_roots_.insert(block.id);

    auto &st = state_for(block.id, self_, block.position);
    if (st.outcome == EntryState::Pending) {
        st.outcome = EntryState::Decoded;
        st.block = mb.block;
        st.held_bytes = block.modeled_size();
        stored_bytes_ += st.held_bytes;
    }

    const auto vlen = static_cast<std::uint32_t>((block.virtual_total + params_.k - 1) / params_.k);
    std::vector<MbDis> out;
    out.reserve(params_.n);
    for (std::size_t j = 0; j < params_.n; ++j) {
        MbDis m;
        m.chain = self_;
        m.position = block.position;
        m.root = block.id;
        m.prev_ac = block.prev_ac;
        m.chunk = Chunk{static_cast<std::uint32_t>(j), mb.encoding->chunks[j], vlen};
        m.proof = mb.encoding->tree.proofs[j];
        out.push_back(std::move(m));
    }
    return out;
}

void Mempool::expect_acks(Position p, const Digest &root) {
    auto &acc = acks_[{p, root}];
    if (acc.seen.empty())
        acc.seen.assign(params_.n, false);
}

bool Mempool::verify_dis(const MbDis &msg) const {
    if (msg.chain >= params_.n || msg.position == 0)
        return false;
    if (msg.prev_ac.chain != msg.chain || msg.prev_ac.position + 1 != msg.position)
        return false;
    if (!verify_ac(msg.prev_ac, scheme_))
        return false;
    return primitives::merkle_verify(msg.proof, msg.chunk.data, msg.chunk.index, msg.root);
}

std::optional<MbAck> Mempool::handle_mb_dis(NodeId, const MbDis &msg) {
    if (msg.chunk.index != self_ || !verify_dis(msg))
        return std::nullopt;
    if (msg.position <= gc_floor_[msg.chain] || chains_[msg.chain].contains(msg.position))
        return std::nullopt;
    if (guard_ && !guard_(msg.chain, msg.position)) {
        withheld_.try_emplace({msg.chain, msg.position}, msg);
        return std::nullopt;
    }
    return accept_dis(msg);
}

std::optional<MbAck> Mempool::accept_dis(const MbDis &msg) {
    ChainSlot slot{msg.root, msg.prev_ac.root, msg.chunk, msg.proof};
    stored_bytes_ += chunk_bytes(msg.chunk);
    chains_[msg.chain].emplace(msg.position, std::move(slot));
    return MbAck{msg.chain, msg.position, msg.root,
                 signer_.sign(AvailabilityCertificate::ack_digest(msg.chain, msg.position, msg.root))};
}

std::optional<MbAck> Mempool::sign_any(const MbDis &msg) const {
    if (!verify_dis(msg))
        return std::nullopt;
    return MbAck{msg.chain, msg.position, msg.root,
                 signer_.sign(AvailabilityCertificate::ack_digest(msg.chain, msg.position, msg.root))};
}

std::vector<ReleasedAck> Mempool::release_withheld() {
    std::vector<ReleasedAck> out;
    for (auto it = withheld_.begin(); it != withheld_.end();) {
        const auto &[key, msg] = *it;
        if (msg.position <= gc_floor_[msg.chain] || chains_[msg.chain].contains(msg.position)) {
            it = withheld_.erase(it);
            continue;
        }
        if (guard_ && !guard_(msg.chain, msg.position)) {
            ++it;
            continue;
        }
        if (auto ack = accept_dis(msg))
            out.push_back(ReleasedAck{msg.chain, std::move(*ack)});
        it = withheld_.erase(it);
    }
    return out;
}

std::optional<AvailabilityCertificate> Mempool::handle_mb_ack(NodeId from, const MbAck &msg) {
    if (msg.chain != self_ || msg.sig.signer != from || from >= params_.n)
        return std::nullopt;
    auto it = acks_.find({msg.position, msg.root});
    if (it == acks_.end() || it->second.done || it->second.seen[from])
        return std::nullopt;
    const auto digest = AvailabilityCertificate::ack_digest(msg.chain, msg.position, msg.root);
    if (!scheme_.verify_partial(digest, msg.sig))
        return std::nullopt;
    auto &acc = it->second;
    acc.seen[from] = true;
    acc.partials.push_back(msg.sig);
    if (acc.partials.size() < scheme_.quorum())
        return std::nullopt;

    acc.done = true;
    AvailabilityCertificate ac{self_, msg.position, msg.root, scheme_.combine(digest, acc.partials)};
    acc.partials.clear();
    own_acs_.try_emplace(msg.position, ac);
    highest_position_ = std::max(highest_position_, msg.position);
    return ac;
}

// -- retrieval ---------------------------------------------------------------

RetrievalState &Mempool::state_for(const Digest &root, NodeId chain, Position position) {
    auto [it, fresh] = retrievals_.try_emplace(root);
    if (fresh) {
        it->second.chain = chain;
        it->second.position = position;
        it->second.sender_seen.assign(params_.n, false);
    }
    return it->second;
}

RetrievalOutput Mempool::trigger_retrieval(const Digest &root, NodeId chain, Position position) {
    struct Link {
        Digest root;
        NodeId chain;
        Position position;
    };
    std::vector<Link> fresh;
    Link cur{root, chain, position};
    while (cur.position > gc_floor_[cur.chain] && !finished_.contains(cur.root)) {
        auto &st = state_for(cur.root, cur.chain, cur.position);
        if (st.triggered)
            break;
        st.triggered = true;
        // The certificate's (chain, position) is authoritative over any Mb-Chk header.
        st.chain = cur.chain;
        st.position = cur.position;
        fresh.push_back(cur);
        if (cur.position <= 1)
            break;

        std::optional<Digest> prev;
        auto slot = chains_[cur.chain].find(cur.position);
        if (slot != chains_[cur.chain].end() && slot->second.root == cur.root)
            prev = slot->second.prev_root;
        else if (st.block && st.block->prev_ac.chain == cur.chain && st.block->prev_ac.position + 1 == cur.position)
            prev = st.block->prev_ac.root;
        if (!prev)
            break;
        cur = Link{*prev, cur.chain, cur.position - 1};
    }

    RetrievalOutput out;
    for (auto it = fresh.rbegin(); it != fresh.rend(); ++it) {
        out.triggered.push_back(it->root);
        auto &st = retrievals_.at(it->root);
        auto slot = chains_[it->chain].find(it->position);
        if (slot == chains_[it->chain].end() || slot->second.root != it->root || st.broadcast)
            continue;
        if (st.chk_seen >= scheme_.quorum()) {
            st.completed_by_observation = true;
            continue;
        }
        st.broadcast = true;
        out.broadcasts.push_back(MbChk{it->chain, it->position, it->root, slot->second.chunk, slot->second.proof});
    }
    return out;
}

void Mempool::note_own_completion(const Digest &root) {
    if (own_roots_.contains(root) && own_counted_.insert(root).second)
        ++own_completed_;
}

std::optional<DecodeTrigger> Mempool::handle_mb_chk(NodeId from, const MbChk &msg) {
    if (from >= params_.n || msg.chain >= params_.n || msg.chunk.index >= params_.n)
        return std::nullopt;
    if (finished_.contains(msg.root))
        return std::nullopt;
    if (!primitives::merkle_verify(msg.proof, msg.chunk.data, msg.chunk.index, msg.root))
        return std::nullopt;
    auto &st = state_for(msg.root, msg.chain, msg.position);
    if (st.sender_seen[from])
        return std::nullopt;
    st.sender_seen[from] = true;
    ++st.chk_seen;
    if (st.chk_seen >= scheme_.quorum())
        note_own_completion(msg.root);

    if (st.outcome != EntryState::Pending || st.decode_triggered)
        return std::nullopt;
    const bool known = std::any_of(st.collected.begin(), st.collected.end(),
                                   [&](const auto &f) { return f.index == msg.chunk.index; });
    if (!known) {
        st.collected.push_back(primitives::Fragment{msg.chunk.index, msg.chunk.data});
        st.held_bytes += chunk_bytes(msg.chunk);
        stored_bytes_ += chunk_bytes(msg.chunk);
    }
    if (st.collected.size() < params_.k)
        return std::nullopt;
    st.decode_triggered = true;
    return DecodeTrigger{msg.root};
}

EntryState Mempool::finalize_decode(const Digest &root) {
    auto it = retrievals_.find(root);
    if (it == retrievals_.end())
        return EntryState::Pending;
    auto &st = it->second;
    if (st.outcome != EntryState::Pending || st.collected.size() < params_.k)
        return st.outcome;

    try {
        auto body = primitives::decode_framed(st.collected, params_);
        auto enc = encode_body(body, params_);
        if (enc.tree.root == root) {
            st.block = std::make_shared<Microblock>(parse_body(body, root));
            st.outcome = EntryState::Decoded;
        } else {
            st.outcome = EntryState::Empty;
        }
    } catch (const ProtocolError &) {
        st.outcome = EntryState::Empty;
    }
    stored_bytes_ -= st.held_bytes;
    st.held_bytes = st.block ? st.block->modeled_size() : 0;
    stored_bytes_ += st.held_bytes;
    st.collected.clear();
    st.collected.shrink_to_fit();
    return st.outcome;
}

RetrievalOutput Mempool::after_decode(const Digest &root) {
    auto it = retrievals_.find(root);
    if (it == retrievals_.end() || !it->second.triggered || !it->second.block)
        return {};
    const auto &st = it->second;
    const auto &prev = st.block->prev_ac;
    if (prev.is_genesis() || prev.chain != st.chain || prev.position + 1 != st.position)
        return {};
    return trigger_retrieval(prev.root, st.chain, prev.position);
}

// -- queries -----------------------------------------------------------------

AvailabilityCertificate Mempool::highest_ac() const {
    if (own_acs_.empty())
        return AvailabilityCertificate::genesis(self_);
    return own_acs_.rbegin()->second;
}

std::optional<AvailabilityCertificate> Mempool::own_ac(Position p) const {
    if (p == 0)
        return AvailabilityCertificate::genesis(self_);
    auto it = own_acs_.find(p);
    if (it == own_acs_.end())
        return std::nullopt;
    return it->second;
}

EntryState Mempool::state_of(const Digest &root) const {
    auto it = retrievals_.find(root);
    return it == retrievals_.end() ? EntryState::Pending : it->second.outcome;
}

MicroblockPtr Mempool::block_of(const Digest &root) const {
    auto it = retrievals_.find(root);
    return it == retrievals_.end() ? nullptr : it->second.block;
}

const RetrievalState *Mempool::retrieval(const Digest &root) const {
    auto it = retrievals_.find(root);
    return it == retrievals_.end() ? nullptr : &it->second;
}

bool Mempool::retrieval_triggered(const Digest &root) const {
    if (finished_.contains(root))
        return true;
    auto it = retrievals_.find(root);
    return it != retrievals_.end() && it->second.triggered;
}

std::size_t Mempool::undecoded_positions(NodeId chain) const {
    std::size_t count = 0;
    for (const auto &[pos, slot] : chains_.at(chain))
        if (state_of(slot.root) == EntryState::Pending)
            ++count;
    return count;
}

// -- garbage collection ------------------------------------------------------

void Mempool::release(NodeId chain, Position position, std::span<const Digest> roots) {
    for (const auto &root : roots) {
        auto it = retrievals_.find(root);
        if (it != retrievals_.end()) {
            stored_bytes_ -= it->second.held_bytes;
            retrievals_.erase(it);
        }
        note_own_completion(root);
        finished_.insert(root);
    }
    if (chain >= params_.n || position <= gc_floor_[chain])
        return;
    gc_floor_[chain] = position;
    auto &slots = chains_[chain];
    for (auto it = slots.begin(); it != slots.end() && it->first <= position;) {
        stored_bytes_ -= chunk_bytes(it->second.chunk);
        it = slots.erase(it);
    }
    for (auto it = withheld_.lower_bound({chain, 0}); it != withheld_.end() && it->first.first == chain &&
                                                      it->first.second <= position;)
        it = withheld_.erase(it);
    if (chain == self_) {
        for (auto it = acks_.begin(); it != acks_.end() && it->first.first <= position;)
            it = acks_.erase(it);
        while (own_acs_.size() > 1 && own_acs_.begin()->first < position)
            own_acs_.erase(own_acs_.begin());
    }
}

} // namespace imitater::smp
