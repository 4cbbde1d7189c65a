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

#pragma once

#include <memory>

#include "imitater/common.hpp"

namespace imitater::primitives {

class ThresholdNotMet : public ProtocolError {
  public:
    using ProtocolError::ProtocolError;
};

struct PartialSignature {
    NodeId signer = 0;
    Bytes material;

    /// u32 signer || u32 len || material
    std::size_t wire_size() const { return 8 + material.size(); }
    bool operator==(const PartialSignature &) const = default;
};

/// Proof that a quorum of distinct nodes signed one message.
struct AggregateSignature {
    std::vector<NodeId> signers; ///< sorted, distinct
    Bytes material;

    bool empty() const { return signers.empty() && material.empty(); }
    /// u32 len || signer bitmap (ceil(n/8) bytes) || u32 len || material
    std::size_t wire_size(std::size_t n) const { return 8 + (n + 7) / 8 + material.size(); }
    bool operator==(const AggregateSignature &) const = default;
};

class Signer;

/// A (2f+1, n) threshold signature scheme. Implementations must be pure: the same
/// inputs always give the same outputs, and verification never mutates state.
class SignatureScheme {
  public:
    SignatureScheme(std::size_t n, std::size_t f);
    virtual ~SignatureScheme() = default;

    std::size_t n() const { return n_; }
    std::size_t f() const { return f_; }
    std::size_t quorum() const { return 2 * f_ + 1; }

    /// Handle that can only produce partials for `id`. Nodes are given their own
    /// signer and nothing else.
    Signer signer(NodeId id) const;

    virtual bool verify_partial(const Digest &message, const PartialSignature &sig) const = 0;

    /// Combines >= 2f+1 valid partials from distinct signers. Invalid partials and
    /// repeated signers are discarded first; throws ThresholdNotMet if fewer than
    /// 2f+1 remain.
    AggregateSignature combine(const Digest &message, std::span<const PartialSignature> partials) const;

    virtual bool verify(const Digest &message, const AggregateSignature &sig) const = 0;

    virtual std::string name() const = 0;

  protected:
    friend class Signer;
    virtual PartialSignature sign(NodeId signer, const Digest &message) const = 0;
    /// Material for a pre-validated, sorted, distinct quorum of partials.
    virtual Bytes aggregate(const Digest &message, std::span<const PartialSignature> partials) const = 0;

    std::size_t n_;
    std::size_t f_;
};

class Signer {
  public:
    Signer() = default;
    NodeId id() const { return id_; }
    PartialSignature sign(const Digest &message) const { return scheme_->sign(id_, message); }
    explicit operator bool() const { return scheme_ != nullptr; }

  private:
    friend class SignatureScheme;
    Signer(const SignatureScheme *scheme, NodeId id) : scheme_(scheme), id_(id) {}
    const SignatureScheme *scheme_ = nullptr;
    NodeId id_ = 0;
};

/// Deterministic simulation scheme: partials are HMACs under per-node keys and an
/// aggregate is the sorted signer set plus a MAC over (message, signer set) under a
/// group key. Only holders of valid partials can obtain an aggregate.
class SimThresholdScheme final : public SignatureScheme {
  public:
    SimThresholdScheme(std::size_t n, std::size_t f, std::uint64_t seed = 0);

    bool verify_partial(const Digest &message, const PartialSignature &sig) const override;
    bool verify(const Digest &message, const AggregateSignature &sig) const override;
    std::string name() const override { return "sim-hmac"; }

  protected:
    PartialSignature sign(NodeId signer, const Digest &message) const override;
    Bytes aggregate(const Digest &message, std::span<const PartialSignature> partials) const override;

  private:
    Digest group_mac(const Digest &message, std::span<const NodeId> signers) const;
    std::vector<Digest> node_keys_;
    Digest group_key_;
};

/// Ed25519 multi-signature (libsodium): the aggregate carries the signer bitmap and
/// every member signature. Same contract as the simulation scheme, real keys.
class Ed25519MultiScheme final : public SignatureScheme {
  public:
    Ed25519MultiScheme(std::size_t n, std::size_t f, std::uint64_t seed = 0);

    bool verify_partial(const Digest &message, const PartialSignature &sig) const override;
    bool verify(const Digest &message, const AggregateSignature &sig) const override;
    std::string name() const override { return "ed25519-multi"; }

  protected:
    PartialSignature sign(NodeId signer, const Digest &message) const override;
    Bytes aggregate(const Digest &message, std::span<const PartialSignature> partials) const override;

  private:
    std::vector<std::array<std::uint8_t, 32>> public_keys_;
    std::vector<std::array<std::uint8_t, 64>> secret_keys_;
};

std::unique_ptr<SignatureScheme> make_signature_scheme(const std::string &name, std::size_t n, std::size_t f,
                                                       std::uint64_t seed);

} // namespace imitater::primitives
