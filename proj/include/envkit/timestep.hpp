#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "envkit/value.hpp"

namespace envkit {

// FIRST comes only from reset. LAST with discount 0 is termination; LAST with
// discount 1 is truncation (step-limit expiry).
enum class StepType : std::uint8_t { First = 0, Mid = 1, Last = 2 };

// Flat string->scalar metric map. Metrics are visible to loggers, not agents.
using Extras = std::vector<std::pair<std::string, double>>;

// Agent-visible record of one transition.
struct TimeStep {
    StepType step_type = StepType::First;
    double reward = 0.0;
    double discount = 1.0;
    Value observation;
    Extras extras;

    bool first() const { return step_type == StepType::First; }
    bool mid() const { return step_type == StepType::Mid; }
    bool last() const { return step_type == StepType::Last; }

    friend bool operator==(const TimeStep&, const TimeStep&) = default;

    static TimeStep restart(Value observation, Extras extras = {}) {
        return TimeStep{StepType::First, 0.0, 1.0, std::move(observation), std::move(extras)};
    }
    static TimeStep transition(double reward, Value observation, Extras extras = {}) {
        return TimeStep{StepType::Mid, reward, 1.0, std::move(observation), std::move(extras)};
    }
    static TimeStep termination(double reward, Value observation, Extras extras = {}) {
        return TimeStep{StepType::Last, reward, 0.0, std::move(observation), std::move(extras)};
    }
    static TimeStep truncation(double reward, Value observation, Extras extras = {}) {
        return TimeStep{StepType::Last, reward, 1.0, std::move(observation), std::move(extras)};
    }
};

} // namespace envkit
