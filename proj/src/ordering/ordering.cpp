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

#include "imitater/ordering/ordering.hpp"

#include <algorithm>

#include "imitater/primitives/hash.hpp"

namespace imitater::ordering {

NotYetAvailable::NotYetAvailable(const Digest &r, NodeId c, Position p)
    : ProtocolError("microblock not yet available"), root(r), chain(c), position(p) {}

std::vector<ExpandedMicroblock> expand_block(std::span<const smp::AvailabilityCertificate> mbs,
                                             std::vector<Position> &last_committed, const Resolver &resolve,
                                             const LinkVerifier &verify_link) {
    std::vector<ExpandedMicroblock> out;
    auto next_committed = last_committed;
    for (const auto &ac : mbs) {
        if (ac.chain >= last_committed.size())
            continue;
        const Position q = next_committed[ac.chain];
        if (ac.position <= q)
            continue;

        std::vector<ExpandedMicroblock> slots; // newest first
        Digest root = ac.root;
        Position pos = ac.position;
        bool broken = false;
        while (pos > q) {
            auto r = resolve(root);
            if (r.state == smp::EntryState::Pending)
                throw NotYetAvailable(root, ac.chain, pos);
            const auto &mb = r.block;
            if (r.state == smp::EntryState::Empty || !mb || mb->chain != ac.chain || mb->position != pos) {
                broken = true;
                break;
            }
            slots.push_back(ExpandedMicroblock{ac.chain, pos, root, mb});
            if (pos == q + 1)
                break;
            const auto &prev = mb->prev_ac;
            if (prev.chain != ac.chain || prev.position + 1 != pos || (verify_link && !verify_link(prev))) {
                root = Digest{};
                --pos;
                broken = true;
                break;
            }
            root = prev.root;
            --pos;
        }
        if (broken) {
            // `pos` is the first slot that could not be resolved; it and everything
            // below it down to q+1 are Empty. Only the first keeps its root.
            for (Position p = pos; p > q; --p)
                slots.push_back(ExpandedMicroblock{ac.chain, p, p == pos ? root : Digest{}, nullptr});
        }
        std::reverse(slots.begin(), slots.end());
        out.insert(out.end(), slots.begin(), slots.end());
        next_committed[ac.chain] = ac.position;
    }
    last_committed = std::move(next_committed);
    return out;
}

std::vector<OrderedTx> build_tx_list(std::span<const ExpandedMicroblock> mbs,
                                     std::unordered_set<Digest, DigestHash> &seen) {
    std::vector<OrderedTx> all;
    for (const auto &slot : mbs) {
        if (!slot.block)
            continue;
        const auto &mb = *slot.block;
        for (std::size_t i = 0; i < mb.txs.size(); ++i) {
            const auto &tx = mb.txs[i];
            all.push_back(OrderedTx{TxKey{mb.position, mb.created_at, mb.chain, static_cast<std::uint32_t>(i), tx->hash},
                                    tx});
        }
    }
    std::sort(all.begin(), all.end(), [](const auto &a, const auto &b) { return a.key < b.key; });
    std::vector<OrderedTx> out;
    out.reserve(all.size());
    for (auto &t : all)
        if (seen.insert(t.key.tx_hash).second)
            out.push_back(std::move(t));
    return out;
}

// -- execution ---------------------------------------------------------------

std::vector<Response> LedgerState::execute(std::span<const OrderedTx> txs, bool keep_log) {
    std::vector<Response> responses;
    responses.reserve(txs.size());
    for (const auto &t : txs) {
        const auto &tx = *t.tx;
        Response r{tx.client, tx.seq, false, 0};
        switch (static_cast<smp::TxOp>(tx.op)) {
        case smp::TxOp::Put:
            kv_[tx.key] = tx.value;
            r.ok = true;
            r.value = tx.value;
            break;
        case smp::TxOp::Get:
            r.ok = true;
            r.value = get(tx.key);
            break;
        case smp::TxOp::Credit:
            if (tx.value >= 0) {
                r.value = (kv_[tx.key] += tx.value);
                r.ok = true;
            }
            break;
        case smp::TxOp::Debit: {
            auto it = kv_.find(tx.key);
            if (tx.value >= 0 && it != kv_.end() && it->second >= tx.value) {
                r.value = (it->second -= tx.value);
                r.ok = true;
            }
            break;
        }
        default:
            break; // unknown operation: no-op
        }

        Writer w(kLambda + 1);
        w.digest(tx.hash);
        w.u8(r.ok ? 1 : 0);
        log_digest_ = primitives::sha256({ByteView(log_digest_.bytes()), w.bytes()});
        if (keep_log)
            log_.push_back(LogRecord{applied_, t.key.chain, t.key.position, tx.client, tx.seq, tx.hash, r.ok});
        ++applied_;
        responses.push_back(r);
    }
    return responses;
}

std::int64_t LedgerState::get(std::uint32_t key) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? 0 : it->second;
}

Digest LedgerState::state_digest() const {
    Writer w(kv_.size() * 12);
    for (const auto &[k, v] : kv_) {
        w.u32(k);
        w.i64(v);
    }
    return primitives::sha256(w.bytes());
}

void LedgerState::export_log(std::ostream &out) const {
    for (const auto &r : log_)
        out << r.index << ' ' << r.chain << ' ' << r.position << ' ' << r.client << ' ' << r.seq << ' '
            << r.tx_hash.hex() << ' ' << (r.ok ? 1 : 0) << '\n';
}

} // namespace imitater::ordering
