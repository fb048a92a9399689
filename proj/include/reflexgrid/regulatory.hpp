#pragma once

// Regulatory layer: appliance decision rules and the central controller.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "reflexgrid/circuit.hpp"

namespace reflexgrid::regulatory {

enum class RuleKind { PassiveCycle, ReactiveThreshold, ProbabilisticReactive, Commanded };

std::string_view to_string(RuleKind kind) noexcept;
/// Accepts the display names ("ReactiveThreshold") and the short scenario
/// file spellings ("reactive"). Throws std::invalid_argument otherwise.
RuleKind parse_rule_kind(std::string_view text);

/// How a ProbabilisticReactive agent draws. PerStep redraws on every
/// triggering step; PerEvent draws once when a band excursion starts and
/// keeps that decision until the sensed voltage returns to the band or
/// crosses to the other side.
enum class Latching { PerStep, PerEvent };

struct Rule {
    RuleKind kind = RuleKind::PassiveCycle;
    double probability = 1.0; ///< only read by ProbabilisticReactive
    Latching latching = Latching::PerStep;

    static Rule passive() { return {}; }
    static Rule reactive() { return {RuleKind::ReactiveThreshold}; }
    static Rule probabilistic(double p, Latching l = Latching::PerStep) {
        return {RuleKind::ProbabilisticReactive, p, l};
    }
    static Rule commanded() { return {RuleKind::Commanded}; }

    friend bool operator==(const Rule&, const Rule&) = default;
};

struct Band {
    double v_low;
    double v_high;

    bool contains(double v) const noexcept { return v >= v_low && v <= v_high; }
    double midpoint() const noexcept { return 0.5 * (v_low + v_high); }
    friend bool operator==(const Band&, const Band&) = default;
};

struct AgentConfig {
    std::size_t id = 0;
    std::int64_t period = 1;   ///< steps per cycle
    std::int64_t on_steps = 1; ///< flexible load connected for this many steps per cycle
    std::int64_t phase = 0;
    Rule rule;
    double v_low = 0.0;
    double v_high = 0.0;
    std::int64_t max_shift = 0;

    /// Throws std::invalid_argument on a broken invariant.
    void validate() const;
};

enum class Action { Hold, Postpone, Advance };
std::string_view to_string(Action action) noexcept;

struct Instruction {
    std::size_t agent_id;
    Action action;
    friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct AgentState {
    std::int64_t shift = 0; ///< accumulated postponement; positive = delayed
    Action pending = Action::Hold;

    // PerEvent latch: the direction of the excursion being tracked
    // (Hold = none) and whether this agent drew to react to it.
    Action latched_event = Action::Hold;
    bool latched_react = false;

    friend bool operator==(const AgentState&, const AgentState&) = default;
};

/// True iff ((t - phase - shift) mod period) < on_steps, with a
/// non-negative modulo.
bool desired_load(const AgentConfig& config, const AgentState& state, std::int64_t t) noexcept;

struct StepResult {
    AgentState state;
    bool flex_on;
    /// The shift actually applied this step (Hold when none or saturated).
    Action reaction;
};

/// Advances one agent by one step.
///
/// A reaction moves the cycle by one step and also acts on the current step:
/// postponing keeps the flexible load disconnected now and delays the rest of
/// the cycle, and advancing connects it now and brings the cycle forward. A
/// saturated shift (|shift| at max_shift) means no reaction. rng_draw is
/// only consulted by ProbabilisticReactive.
StepResult agent_step(const AgentConfig& config, const AgentState& state, std::int64_t t,
                      double sensed_v, double rng_draw);

/// Index of the connected-count target: the n in [0, N] whose predicted
/// v_load is closest to v_nominal, ties toward the smaller n.
std::size_t controller_target(const circuit::CircuitConfig& config, double v_source_now, double v_nominal);

/// Plans one instruction per agent. current_flex is the load state the agents
/// are about to produce this step if left alone. When the predicted v_load
/// for that state already lies in the band, every instruction is Hold.
/// Otherwise the |n_on - n_target| lowest-id agents that are on (when
/// shedding) or off (when adding) are told to postpone or advance.
/// Throws std::invalid_argument for heterogeneous branches or sensed_v <= 0.
std::vector<Instruction> controller_plan(double sensed_v, double v_nominal, const Band& band,
                                         const circuit::CircuitConfig& config, double v_source_now,
                                         const circuit::LoadState& current_flex);

} // namespace reflexgrid::regulatory
