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

#include <cstdio>

#include "imitater/common.hpp"

namespace imitater {

Digest Digest::from_span(ByteView b) {
    if (b.size() != kLambda)
        throw ProtocolError("digest must be 32 bytes");
    Digest d;
    std::copy(b.begin(), b.end(), d.bytes_.begin());
    return d;
}

bool Digest::is_zero() const {
    for (auto x : bytes_)
        if (x != 0)
            return false;
    return true;
}

std::string Digest::hex() const {
    static const char *digits = "0123456789abcdef";
    std::string out;
    out.reserve(2 * kLambda);
    for (auto x : bytes_) {
        out.push_back(digits[x >> 4]);
        out.push_back(digits[x & 0xf]);
    }
    return out;
}

std::uint64_t Digest::prefix64() const {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(bytes_[i]) << (8 * i);
    return v;
}

} // namespace imitater
