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

#include "imitater/primitives/erasure.hpp"

#include <algorithm>
#include <cstring>

#include "imitater/bytes.hpp"

namespace imitater::primitives {

namespace {

// GF(2^8) with the 0x11d reduction polynomial.
struct Field {
    std::uint8_t exp[512];
    std::uint8_t log[256];
    std::uint8_t mul[256][256];

    Field() {
        unsigned x = 1;
        for (int i = 0; i < 255; ++i) {
            exp[i] = static_cast<std::uint8_t>(x);
            log[x] = static_cast<std::uint8_t>(i);
            x <<= 1;
            if (x & 0x100)
                x ^= 0x11d;
        }
        for (int i = 255; i < 512; ++i)
            exp[i] = exp[i - 255];
        log[0] = 0;
        for (int a = 0; a < 256; ++a)
            for (int b = 0; b < 256; ++b)
                mul[a][b] = (a == 0 || b == 0) ? 0 : exp[log[a] + log[b]];
    }

    std::uint8_t inv(std::uint8_t a) const { return exp[255 - log[a]]; }
    std::uint8_t div(std::uint8_t a, std::uint8_t b) const { return mul[a][inv(b)]; }
};

const Field &field() {
    static const Field f;
    return f;
}

// Evaluation point of fragment j. Fragments 0..k-1 carry the data symbols.
std::uint8_t point(std::size_t j) { return static_cast<std::uint8_t>(j); }

// Lagrange basis coefficient L_s(x) over the point set `src`.
std::uint8_t lagrange(std::span<const std::size_t> src, std::size_t s, std::uint8_t x) {
    const auto &gf = field();
    std::uint8_t num = 1, den = 1;
    const auto xs = point(src[s]);
    for (std::size_t u = 0; u < src.size(); ++u) {
        if (u == s)
            continue;
        const auto xu = point(src[u]);
        num = gf.mul[num][static_cast<std::uint8_t>(x ^ xu)];
        den = gf.mul[den][static_cast<std::uint8_t>(xs ^ xu)];
    }
    return gf.div(num, den);
}

// out ^= c * in, column-wise.
void mul_add(std::uint8_t *out, const std::uint8_t *in, std::size_t len, std::uint8_t c) {
    if (c == 0)
        return;
    if (c == 1) {
        for (std::size_t i = 0; i < len; ++i)
            out[i] ^= in[i];
        return;
    }
    const auto *tab = field().mul[c];
    for (std::size_t i = 0; i < len; ++i)
        out[i] ^= tab[in[i]];
}

} // namespace

CodingParams CodingParams::for_faults(std::size_t f) { return CodingParams{3 * f + 1, f + 1, f}; }

CodingParams CodingParams::for_nodes(std::size_t n) {
    if (n < 4 || (n - 1) % 3 != 0)
        throw ProtocolError("node count must be 3f+1 with f >= 1, got " + std::to_string(n));
    return for_faults((n - 1) / 3);
}

void CodingParams::validate() const {
    if (!valid())
        throw ProtocolError("invalid coding parameters n=" + std::to_string(n) + " k=" + std::to_string(k) +
                            " f=" + std::to_string(f));
}

std::size_t fragment_length(std::size_t len, const CodingParams &params) {
    return (len + params.k - 1) / params.k;
}

std::vector<Bytes> encode(ByteView data, const CodingParams &params) {
    params.validate();
    if (data.empty())
        throw ProtocolError("cannot encode an empty message");
    const auto k = params.k, n = params.n;
    const auto len = fragment_length(data.size(), params);

    std::vector<Bytes> out(n, Bytes(len, 0));
    for (std::size_t j = 0; j < k; ++j) {
        const auto off = j * len;
        if (off < data.size())
            std::memcpy(out[j].data(), data.data() + off, std::min(len, data.size() - off));
    }

    std::vector<std::size_t> src(k);
    for (std::size_t s = 0; s < k; ++s)
        src[s] = s;
    for (std::size_t j = k; j < n; ++j)
        for (std::size_t s = 0; s < k; ++s)
            mul_add(out[j].data(), out[s].data(), len, lagrange(src, s, point(j)));
    return out;
}

Bytes decode(std::span<const Fragment> fragments, const CodingParams &params, std::size_t original_len) {
    params.validate();
    const auto k = params.k;

    std::vector<const Fragment *> chosen;
    chosen.reserve(fragments.size());
    for (const auto &fr : fragments) {
        if (fr.index >= params.n)
            throw ProtocolError("fragment index out of range");
        chosen.push_back(&fr);
    }
    std::sort(chosen.begin(), chosen.end(), [](auto *a, auto *b) { return a->index < b->index; });
    for (std::size_t i = 1; i < chosen.size(); ++i)
        if (chosen[i]->index == chosen[i - 1]->index)
            throw ProtocolError("duplicate fragment index");
    if (chosen.size() < k)
        throw ProtocolError("insufficient fragments: need " + std::to_string(k) + ", got " +
                            std::to_string(chosen.size()));
    chosen.resize(k);

    const auto len = chosen.front()->data.size();
    for (auto *fr : chosen)
        if (fr->data.size() != len)
            throw ProtocolError("malformed fragments: mixed lengths");
    if (original_len > len * k)
        throw ProtocolError("original length exceeds coded capacity");

    std::vector<std::size_t> src(k);
    for (std::size_t s = 0; s < k; ++s)
        src[s] = chosen[s]->index;

    Bytes out(len * k, 0);
    for (std::size_t t = 0; t < k; ++t) {
        auto *row = out.data() + t * len;
        auto hit = std::find(src.begin(), src.end(), t);
        if (hit != src.end()) {
            std::memcpy(row, chosen[static_cast<std::size_t>(hit - src.begin())]->data.data(), len);
            continue;
        }
        for (std::size_t s = 0; s < k; ++s)
            mul_add(row, chosen[s]->data.data(), len, lagrange(src, s, point(t)));
    }
    out.resize(original_len);
    return out;
}

std::vector<Bytes> encode_framed(ByteView data, const CodingParams &params) {
    Writer w(data.size() + 8);
    w.u64(data.size());
    w.raw(data);
    return encode(w.bytes(), params);
}

Bytes decode_framed(std::span<const Fragment> fragments, const CodingParams &params) {
    if (fragments.empty())
        throw ProtocolError("insufficient fragments");
    const auto frame_len = fragments.front().data.size() * params.k;
    auto frame = decode(fragments, params, frame_len);
    Reader r(frame);
    const auto len = r.u64();
    if (len > r.remaining())
        throw ProtocolError("frame length prefix exceeds payload");
    auto body = r.take(static_cast<std::size_t>(len));
    return Bytes(body.begin(), body.end());
}

} // namespace imitater::primitives
