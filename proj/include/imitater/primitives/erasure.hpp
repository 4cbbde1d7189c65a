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

#include "imitater/common.hpp"

namespace imitater::primitives {

/// Parameters of the (f+1, n) erasure code: n = 3f+1 chunks, any k = f+1 decode.
struct CodingParams {
    std::size_t n = 4;
    std::size_t k = 2;
    std::size_t f = 1;

    /// Code for a system of n = 3f+1 nodes.
    static CodingParams for_faults(std::size_t f);
    /// Code for n nodes; n must be of the form 3f+1.
    static CodingParams for_nodes(std::size_t n);

    bool valid() const { return n == 3 * f + 1 && k == f + 1 && n >= 4 && n <= 255; }
    void validate() const;

    bool operator==(const CodingParams &) const = default;
};

/// One coded fragment; index is the 0-based chunk position in [0, n).
struct Fragment {
    std::size_t index = 0;
    Bytes data;
};

/// Length of each fragment produced for a message of `len` bytes.
std::size_t fragment_length(std::size_t len, const CodingParams &params);

/// Systematic Reed-Solomon over GF(2^8). The message is zero-filled to a multiple
/// of k and split in order across the first k fragments; the remaining n-k are
/// parity. Returns n fragments of equal length.
std::vector<Bytes> encode(ByteView data, const CodingParams &params);

/// Reconstructs the message from any k fragments with distinct indices and
/// equal lengths, truncating to `original_len`. Extra fragments beyond k are ignored
/// (the k lowest indices are used, which keeps the result independent of input order).
Bytes decode(std::span<const Fragment> fragments, const CodingParams &params, std::size_t original_len);

/// Frames `data` as u64le(len) || data so the length survives coding.
std::vector<Bytes> encode_framed(ByteView data, const CodingParams &params);
/// Inverse of encode_framed; throws ProtocolError when the frame header is inconsistent.
Bytes decode_framed(std::span<const Fragment> fragments, const CodingParams &params);

} // namespace imitater::primitives
