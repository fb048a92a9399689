#include "reflexgrid/regulatory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace reflexgrid::regulatory {

std::string_view to_string(RuleKind kind) noexcept {
    switch (kind) {
    case RuleKind::PassiveCycle: return "PassiveCycle";
    case RuleKind::ReactiveThreshold: return "ReactiveThreshold";
    case RuleKind::ProbabilisticReactive: return "ProbabilisticReactive";
    case RuleKind::Commanded: return "Commanded";
    }
    return "?";
}

RuleKind parse_rule_kind(std::string_view text) {
    if (text == "passive" || text == "PassiveCycle") return RuleKind::PassiveCycle;
    if (text == "reactive" || text == "ReactiveThreshold") return RuleKind::ReactiveThreshold;
    if (text == "probabilistic" || text == "ProbabilisticReactive") return RuleKind::ProbabilisticReactive;
    if (text == "commanded" || text == "Commanded") return RuleKind::Commanded;
    throw std::invalid_argument("unknown rule '" + std::string(text) + "'");
}

std::string_view to_string(Action action) noexcept {
    switch (action) {
    case Action::Hold: return "hold";
    case Action::Postpone: return "postpone";
    case Action::Advance: return "advance";
    }
    return "?";
}

void AgentConfig::validate() const {
    const std::string who = "agent " + std::to_string(id) + ": ";
    if (period <= 0) throw std::invalid_argument(who + "period must be positive");
    if (on_steps < 1 || on_steps >= period) throw std::invalid_argument(who + "on_steps must lie in [1, period)");
    if (phase < 0 || phase >= period) throw std::invalid_argument(who + "phase must lie in [0, period)");
    if (max_shift < 0) throw std::invalid_argument(who + "max_shift must be non-negative");
    if (!(v_low < v_high)) throw std::invalid_argument(who + "v_low must be below v_high");
    if (rule.kind == RuleKind::ProbabilisticReactive &&
        !(rule.probability >= 0.0 && rule.probability <= 1.0)) {
        throw std::invalid_argument(who + "probability must lie in [0, 1]");
    }
}

bool desired_load(const AgentConfig& config, const AgentState& state, std::int64_t t) noexcept {
    std::int64_t pos = (t - config.phase - state.shift) % config.period;
    if (pos < 0) {
        pos += config.period;
    }
    return pos < config.on_steps;
}

namespace {

Action trigger_for(const AgentConfig& config, double sensed_v) noexcept {
    if (sensed_v < config.v_low) return Action::Postpone;
    if (sensed_v > config.v_high) return Action::Advance;
    return Action::Hold;
}

bool apply_shift(const AgentConfig& config, AgentState& state, Action action) noexcept {
    if (action == Action::Postpone && state.shift < config.max_shift) {
        ++state.shift;
        return true;
    }
    if (action == Action::Advance && state.shift > -config.max_shift) {
        --state.shift;
        return true;
    }
    return false;
}

} // namespace

StepResult agent_step(const AgentConfig& config, const AgentState& state, std::int64_t t,
                      double sensed_v, double rng_draw) {
    AgentState next = state;
    const Action pending = next.pending;
    next.pending = Action::Hold;

    Action wanted = Action::Hold;
    switch (config.rule.kind) {
    case RuleKind::PassiveCycle:
        break;
    case RuleKind::ReactiveThreshold:
        wanted = trigger_for(config, sensed_v);
        break;
    case RuleKind::ProbabilisticReactive: {
        const Action trigger = trigger_for(config, sensed_v);
        if (config.rule.latching == Latching::PerStep) {
            if (trigger != Action::Hold && rng_draw < config.rule.probability) {
                wanted = trigger;
            }
        } else {
            if (trigger == Action::Hold) {
                next.latched_event = Action::Hold;
                next.latched_react = false;
            } else {
                if (next.latched_event != trigger) {
                    next.latched_event = trigger;
                    next.latched_react = rng_draw < config.rule.probability;
                }
                if (next.latched_react) {
                    wanted = trigger;
                }
            }
        }
        break;
    }
    case RuleKind::Commanded:
        wanted = pending;
        break;
    }

    const Action applied = apply_shift(config, next, wanted) ? wanted : Action::Hold;
    bool on = desired_load(config, next, t);
    if (applied == Action::Postpone) {
        on = false;
    } else if (applied == Action::Advance) {
        on = true;
    }
    return {next, on, applied};
}

std::size_t controller_target(const circuit::CircuitConfig& config, double v_source_now, double v_nominal) {
    const std::size_t n = config.size();
    // v_load_for_count is strictly decreasing in the count, so the closest
    // value sits next to the first count that drops to or below v_nominal.
    std::size_t lo = 0;
    std::size_t hi = n + 1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (circuit::v_load_for_count(config, v_source_now, mid) <= v_nominal) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    if (lo == 0) return 0;
    if (lo > n) return n;
    const double above = circuit::v_load_for_count(config, v_source_now, lo - 1) - v_nominal;
    const double below = v_nominal - circuit::v_load_for_count(config, v_source_now, lo);
    return below < above ? lo : lo - 1;
}

std::vector<Instruction> controller_plan(double sensed_v, double v_nominal, const Band& band,
                                         const circuit::CircuitConfig& config, double v_source_now,
                                         const circuit::LoadState& current_flex) {
    if (!config.is_homogeneous()) {
        throw std::invalid_argument("controller_plan requires identical branches");
    }
    if (!(sensed_v > 0.0)) {
        throw std::invalid_argument("controller_plan: sensed voltage must be positive");
    }
    if (current_flex.size() != config.size()) {
        throw std::invalid_argument("controller_plan: load state does not match the circuit");
    }
    const std::size_t n = config.size();
    std::vector<Instruction> plan;
    plan.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        plan.push_back({i, Action::Hold});
    }

    const std::size_t n_on = current_flex.count_on();
    if (band.contains(circuit::v_load_for_count(config, v_source_now, n_on))) {
        return plan;
    }
    const std::size_t n_target = controller_target(config, v_source_now, v_nominal);
    const bool shed = n_target < n_on;
    std::size_t remaining = shed ? n_on - n_target : n_target - n_on;
    for (std::size_t i = 0; i < n && remaining > 0; ++i) {
        if (current_flex.flex_on[i] == shed) {
            plan[i].action = shed ? Action::Postpone : Action::Advance;
            --remaining;
        }
    }
    return plan;
}

} // namespace reflexgrid::regulatory
