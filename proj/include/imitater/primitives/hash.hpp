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

#include <initializer_list>

#include "imitater/common.hpp"

namespace imitater::primitives {

/// SHA-256 of the concatenation of the given parts.
Digest sha256(std::initializer_list<ByteView> parts);
inline Digest sha256(ByteView data) { return sha256({data}); }

/// HMAC-SHA-256 keyed MAC.
Digest hmac_sha256(ByteView key, ByteView message);

} // namespace imitater::primitives
