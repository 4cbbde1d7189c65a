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

#include <cstring>

#include "imitater/common.hpp"

namespace imitater {

/// Little-endian append-only encoder used for every canonical serialization.
class Writer {
  public:
    Writer() = default;
    explicit Writer(std::size_t reserve) { buf_.reserve(reserve); }

    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) { put_le(v, 4); }
    void u64(std::uint64_t v) { put_le(v, 8); }
    void i64(std::int64_t v) { put_le(static_cast<std::uint64_t>(v), 8); }
    void digest(const Digest &d) { raw(ByteView(d.bytes())); }
    void raw(ByteView b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
    void zeros(std::size_t n) { buf_.resize(buf_.size() + n, 0); }
    /// u32 length followed by the bytes.
    void blob(ByteView b) {
        u32(static_cast<std::uint32_t>(b.size()));
        raw(b);
    }

    std::size_t size() const { return buf_.size(); }
    Bytes take() { return std::move(buf_); }
    const Bytes &bytes() const { return buf_; }

  private:
    void put_le(std::uint64_t v, int width) {
        for (int i = 0; i < width; ++i)
            buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    Bytes buf_;
};

class Reader {
  public:
    explicit Reader(ByteView b) : data_(b) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get_le(1)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4)); }
    std::uint64_t u64() { return get_le(8); }
    std::int64_t i64() { return static_cast<std::int64_t>(get_le(8)); }
    Digest digest() { return Digest::from_span(take(kLambda)); }
    ByteView take(std::size_t n) {
        need(n);
        auto out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }
    Bytes blob() {
        auto n = u32();
        auto v = take(n);
        return Bytes(v.begin(), v.end());
    }

    std::size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }

  private:
    void need(std::size_t n) const {
        if (data_.size() - pos_ < n)
            throw ProtocolError("truncated input");
    }
    std::uint64_t get_le(int width) {
        need(static_cast<std::size_t>(width));
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i)
            v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += static_cast<std::size_t>(width);
        return v;
    }
    ByteView data_;
    std::size_t pos_ = 0;
};

} // namespace imitater
