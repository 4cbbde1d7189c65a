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

#include <optional>
#include <string>
#include <vector>

#include "imitater/netsim/trace.hpp"

namespace imitater::harness {

struct CheckResult {
    std::string name;
    bool pass = true;
    std::optional<std::size_t> event; ///< index of the first counterexample
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;

    bool ok() const;
    const CheckResult *find(const std::string &name) const;
    /// One line per invariant: "<name> PASS" or "<name> FAIL at event <i>: <detail>".
    std::string to_text() const;
};

/// Post-hoc invariant checks over a recorded run: safety, totality, uniqueness,
/// chain consistency, order keeping, chain quality and at-most-once retrieval.
VerifyReport verify_run(const netsim::Trace &trace);

} // namespace imitater::harness
