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

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace imitater {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

using NodeId = std::uint32_t;
using Position = std::uint64_t;
using View = std::uint64_t;

/// Simulated time in integer microseconds.
using SimTime = std::int64_t;

constexpr SimTime kMillisecond = 1000;
constexpr SimTime kSecond = 1000 * kMillisecond;

/// Size of digests and of one signature unit in the byte-accounting model.
constexpr std::size_t kLambda = 32;

class Digest {
  public:
    Digest() : bytes_{} {}
    explicit Digest(const std::array<std::uint8_t, kLambda> &b) : bytes_(b) {}

    static Digest from_span(ByteView b);

    const std::array<std::uint8_t, kLambda> &bytes() const { return bytes_; }
    std::array<std::uint8_t, kLambda> &bytes() { return bytes_; }
    bool is_zero() const;
    std::string hex() const;
    std::string short_hex() const { return hex().substr(0, 12); }
    /// First eight bytes as a little-endian integer; handy for hashing and traces.
    std::uint64_t prefix64() const;

    auto operator<=>(const Digest &) const = default;
    bool operator==(const Digest &) const = default;

  private:
    std::array<std::uint8_t, kLambda> bytes_;
};

struct DigestHash {
    std::size_t operator()(const Digest &d) const { return static_cast<std::size_t>(d.prefix64()); }
};

/// Raised when inputs violate an operation's preconditions.
class ProtocolError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace imitater
