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

#include "imitater/primitives/signature.hpp"

#include <sodium.h>

#include <algorithm>

#include "imitater/bytes.hpp"
#include "imitater/primitives/hash.hpp"

namespace imitater::primitives {

SignatureScheme::SignatureScheme(std::size_t n, std::size_t f) : n_(n), f_(f) {
    if (n < 3 * f + 1)
        throw ProtocolError("signature scheme requires n >= 3f+1");
}

Signer SignatureScheme::signer(NodeId id) const {
    if (id >= n_)
        throw ProtocolError("signer id out of range");
    return Signer(this, id);
}

AggregateSignature SignatureScheme::combine(const Digest &message, std::span<const PartialSignature> partials) const {
    std::vector<PartialSignature> valid;
    valid.reserve(partials.size());
    for (const auto &p : partials) {
        if (p.signer >= n_ || !verify_partial(message, p))
            continue;
        valid.push_back(p);
    }
    std::sort(valid.begin(), valid.end(), [](const auto &a, const auto &b) { return a.signer < b.signer; });
    valid.erase(std::unique(valid.begin(), valid.end(),
                            [](const auto &a, const auto &b) { return a.signer == b.signer; }),
                valid.end());
    if (valid.size() < quorum())
        throw ThresholdNotMet("threshold not met: " + std::to_string(valid.size()) + " of " +
                              std::to_string(quorum()) + " distinct valid partials");
    valid.resize(quorum());

    AggregateSignature agg;
    for (const auto &p : valid)
        agg.signers.push_back(p.signer);
    agg.material = aggregate(message, valid);
    return agg;
}

namespace {

bool well_formed_signers(std::span<const NodeId> signers, std::size_t n, std::size_t quorum) {
    if (signers.size() < quorum)
        return false;
    for (std::size_t i = 0; i < signers.size(); ++i) {
        if (signers[i] >= n)
            return false;
        if (i > 0 && signers[i] <= signers[i - 1])
            return false;
    }
    return true;
}

Digest derive(const char *label, std::uint64_t seed, std::uint64_t index) {
    Writer w;
    w.raw(ByteView(reinterpret_cast<const std::uint8_t *>(label), std::char_traits<char>::length(label)));
    w.u64(seed);
    w.u64(index);
    return sha256(w.bytes());
}

} // namespace

// ---------------------------------------------------------------------------

SimThresholdScheme::SimThresholdScheme(std::size_t n, std::size_t f, std::uint64_t seed)
    : SignatureScheme(n, f), group_key_(derive("imitater/group-key", seed, 0)) {
    node_keys_.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        node_keys_.push_back(derive("imitater/node-key", seed, i));
}

PartialSignature SimThresholdScheme::sign(NodeId signer, const Digest &message) const {
    auto mac = hmac_sha256(ByteView(node_keys_[signer].bytes()), ByteView(message.bytes()));
    return PartialSignature{signer, Bytes(mac.bytes().begin(), mac.bytes().end())};
}

bool SimThresholdScheme::verify_partial(const Digest &message, const PartialSignature &sig) const {
    if (sig.signer >= n_ || sig.material.size() != kLambda)
        return false;
    auto mac = hmac_sha256(ByteView(node_keys_[sig.signer].bytes()), ByteView(message.bytes()));
    return std::equal(mac.bytes().begin(), mac.bytes().end(), sig.material.begin());
}

Digest SimThresholdScheme::group_mac(const Digest &message, std::span<const NodeId> signers) const {
    Writer w;
    w.digest(message);
    for (auto s : signers)
        w.u32(s);
    return hmac_sha256(ByteView(group_key_.bytes()), w.bytes());
}

Bytes SimThresholdScheme::aggregate(const Digest &message, std::span<const PartialSignature> partials) const {
    std::vector<NodeId> signers;
    for (const auto &p : partials)
        signers.push_back(p.signer);
    auto mac = group_mac(message, signers);
    return Bytes(mac.bytes().begin(), mac.bytes().end());
}

bool SimThresholdScheme::verify(const Digest &message, const AggregateSignature &sig) const {
    if (!well_formed_signers(sig.signers, n_, quorum()) || sig.material.size() != kLambda)
        return false;
    auto mac = group_mac(message, sig.signers);
    return std::equal(mac.bytes().begin(), mac.bytes().end(), sig.material.begin());
}

// ---------------------------------------------------------------------------

Ed25519MultiScheme::Ed25519MultiScheme(std::size_t n, std::size_t f, std::uint64_t seed) : SignatureScheme(n, f) {
    if (sodium_init() < 0)
        throw std::runtime_error("libsodium initialisation failed");
    public_keys_.resize(n);
    secret_keys_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto s = derive("imitater/ed25519-seed", seed, i);
        crypto_sign_seed_keypair(public_keys_[i].data(), secret_keys_[i].data(), s.bytes().data());
    }
}

PartialSignature Ed25519MultiScheme::sign(NodeId signer, const Digest &message) const {
    PartialSignature p{signer, Bytes(crypto_sign_BYTES)};
    crypto_sign_detached(p.material.data(), nullptr, message.bytes().data(), kLambda, secret_keys_[signer].data());
    return p;
}

bool Ed25519MultiScheme::verify_partial(const Digest &message, const PartialSignature &sig) const {
    if (sig.signer >= n_ || sig.material.size() != crypto_sign_BYTES)
        return false;
    return crypto_sign_verify_detached(sig.material.data(), message.bytes().data(), kLambda,
                                       public_keys_[sig.signer].data()) == 0;
}

Bytes Ed25519MultiScheme::aggregate(const Digest &, std::span<const PartialSignature> partials) const {
    Bytes out;
    out.reserve(partials.size() * crypto_sign_BYTES);
    for (const auto &p : partials)
        out.insert(out.end(), p.material.begin(), p.material.end());
    return out;
}

bool Ed25519MultiScheme::verify(const Digest &message, const AggregateSignature &sig) const {
    if (!well_formed_signers(sig.signers, n_, quorum()) ||
        sig.material.size() != sig.signers.size() * crypto_sign_BYTES)
        return false;
    for (std::size_t i = 0; i < sig.signers.size(); ++i) {
        if (crypto_sign_verify_detached(sig.material.data() + i * crypto_sign_BYTES, message.bytes().data(), kLambda,
                                        public_keys_[sig.signers[i]].data()) != 0)
            return false;
    }
    return true;
}

std::unique_ptr<SignatureScheme> make_signature_scheme(const std::string &name, std::size_t n, std::size_t f,
                                                       std::uint64_t seed) {
    if (name == "sim" || name == "sim-hmac")
        return std::make_unique<SimThresholdScheme>(n, f, seed);
    if (name == "ed25519" || name == "ed25519-multi")
        return std::make_unique<Ed25519MultiScheme>(n, f, seed);
    throw ProtocolError("unknown signature scheme: " + name);
}

} // namespace imitater::primitives
