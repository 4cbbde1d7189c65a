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

#include "imitater/pacing/pacer.hpp"

#include <algorithm>

namespace imitater::pacing {

PacerConfig PacerConfig::with_initial(SimTime initial_tau) {
    PacerConfig c;
    c.initial_tau = initial_tau;
    c.alpha = std::max<SimTime>(1, initial_tau / 10);
    return c;
}

void PacerConfig::validate() const {
    if (tau_min <= 0 || tau_max < tau_min)
        throw ProtocolError("pacer bounds must satisfy 0 < tau_min <= tau_max");
    if (alpha <= 0)
        throw ProtocolError("pacer step must be positive");
    if (threshold == 0)
        throw ProtocolError("pacer threshold must be positive");
    if (batch_size == 0)
        throw ProtocolError("batch size must be positive");
}

PacerState::PacerState(PacerConfig cfg) : config(cfg) {
    config.validate();
    tau = std::clamp(config.initial_tau, config.tau_min, config.tau_max);
}

SimTime pacer_step(PacerState &s) {
    if (s.gap() >= s.config.threshold)
        s.tau = std::min(s.tau + s.config.alpha, s.config.tau_max);
    else
        s.tau = std::max(s.tau - s.config.alpha, s.config.tau_min);
    return s.tau;
}

std::optional<std::size_t> next_dispersal(const PacerState &s, SimTime now, std::optional<SimTime> last,
                                          std::size_t pending, bool prev_ac_ready, bool chain_idle) {
    if (!prev_ac_ready)
        return std::nullopt;
    if (last && now - *last < s.tau)
        return std::nullopt;
    if (pending > 0)
        return std::min(pending, s.config.batch_size);
    if (s.config.idle_balancing && chain_idle)
        return 0;
    return std::nullopt;
}

GuardDecision over_distribution_guard(NodeId, Position dis_position, Position last_committed, std::uint64_t k) {
    if (dis_position > last_committed && dis_position - last_committed > k)
        return GuardDecision::Withhold;
    return GuardDecision::Allow;
}

} // namespace imitater::pacing
