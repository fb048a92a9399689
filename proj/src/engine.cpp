#include "reflexgrid/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "reflexgrid/rng.hpp"

namespace reflexgrid::engine {

using regulatory::AgentConfig;
using regulatory::AgentState;
using regulatory::RuleKind;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw std::invalid_argument("scenario: " + what); }

} // namespace

void Scenario::validate() const {
    const std::size_t n = agents.size();
    if (n != circuit.size()) {
        invalid("agent count " + std::to_string(n) + " does not match " + std::to_string(circuit.size()) +
                " circuit branches");
    }
    if (wiring.size() != n) {
        invalid("wiring list does not match the agent count");
    }
    if (horizon <= 0) invalid("horizon must be positive");
    if (sensing_delay < 1) invalid("sensing_delay must be at least 1");
    if (!std::isfinite(v_source_base) || v_source_base < 0.0) invalid("v_source_base must be non-negative");
    const auto& d = disturbance;
    if (!(0 <= d.t_start && d.t_start <= d.t_end && d.t_end <= horizon)) {
        invalid("disturbance must satisfy 0 <= t_start <= t_end <= horizon");
    }
    if (!std::isfinite(d.delta_v) || v_source_base - d.delta_v < 0.0) {
        invalid("disturbance would drive the source negative");
    }
    if (!(band.v_low < band.v_high)) invalid("band v_low must be below v_high");
    for (std::size_t i = 0; i < n; ++i) {
        if (agents[i].id != i) invalid("agent ids must be 0..N-1 in order");
        agents[i].validate();
        for (std::size_t peer : wiring[i].peer_images) {
            if (peer >= n) invalid("agent " + std::to_string(i) + " has a peer image of unknown agent");
        }
    }
    if (controller) {
        if (!circuit.is_homogeneous()) invalid("the controller needs identical branches");
        if (controller->control_interval < 1) invalid("control_interval must be at least 1");
        if (!(controller->band.v_low < controller->band.v_high)) invalid("controller band is empty");
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            if (wiring[i].controller_channel) invalid("controller channel declared without a controller");
        }
    }
}

double Scenario::v_source_at(std::int64_t t) const noexcept {
    const bool disturbed = t >= disturbance.t_start && t < disturbance.t_end;
    return disturbed ? v_source_base - disturbance.delta_v : v_source_base;
}

bool Scenario::records_shifts() const noexcept { return record_shifts.value_or(agents.size() <= 1000); }

Calibration calibrate_nominal(const circuit::CircuitConfig& circuit, double v_source_base, std::int64_t period,
                              std::int64_t on_steps, double band_ratio) {
    if (period <= 0 || on_steps < 0 || on_steps > period) {
        throw std::invalid_argument("calibrate_nominal: bad duty cycle");
    }
    if (!(band_ratio > 0.0 && band_ratio < 1.0)) {
        throw std::invalid_argument("calibrate_nominal: band_ratio must lie in (0, 1)");
    }
    // round(N * on_steps / period), halves up, in integers.
    const auto n = static_cast<std::int64_t>(circuit.size());
    const auto expected_on = static_cast<std::size_t>((2 * n * on_steps + period) / (2 * period));
    const double v_nominal = circuit::v_load_for_count(circuit, v_source_base, expected_on);
    return {v_nominal, {v_nominal * (1.0 - band_ratio), v_nominal * (1.0 + band_ratio)}};
}

Calibration calibrate_nominal(const Scenario& scenario, double band_ratio) {
    if (scenario.agents.empty()) {
        throw std::invalid_argument("calibrate_nominal: no agents");
    }
    const AgentConfig& first = scenario.agents.front();
    for (const AgentConfig& a : scenario.agents) {
        if (a.period != first.period || a.on_steps != first.on_steps) {
            throw std::invalid_argument("calibrate_nominal requires agents with identical cycles");
        }
    }
    return calibrate_nominal(scenario.circuit, scenario.v_source_base, first.period, first.on_steps, band_ratio);
}

Scenario build_homogeneous(const HomogeneousSpec& spec) {
    auto circuit = circuit::CircuitConfig::homogeneous(spec.r_source, spec.count, {spec.r_base, spec.r_flex});
    const Calibration cal =
        calibrate_nominal(circuit, spec.v_source_base, spec.period, spec.on_steps, spec.band_ratio);

    std::vector<AgentConfig> agents;
    std::vector<AgentWiring> wiring;
    agents.reserve(spec.count);
    wiring.reserve(spec.count);
    std::set<std::size_t> everyone;
    if (spec.rule.kind == RuleKind::ProbabilisticReactive) {
        for (std::size_t i = 0; i < spec.count; ++i) everyone.insert(everyone.end(), i);
    }
    for (std::size_t i = 0; i < spec.count; ++i) {
        AgentConfig a;
        a.id = i;
        a.period = spec.period;
        a.on_steps = spec.on_steps;
        a.phase = spec.uniform_phases ? static_cast<std::int64_t>(i) % spec.period : 0;
        a.rule = spec.rule;
        a.v_low = cal.band.v_low;
        a.v_high = cal.band.v_high;
        a.max_shift = spec.max_shift.value_or(spec.period);
        agents.push_back(a);
        wiring.push_back({true, everyone, spec.rule.kind == RuleKind::Commanded});
    }
    std::optional<ControllerConfig> controller;
    if (spec.controller) {
        controller = ControllerConfig{cal.v_nominal, cal.band, spec.control_interval, true};
    }
    Scenario s{
        .circuit = std::move(circuit),
        .v_source_base = spec.v_source_base,
        .disturbance = spec.disturbance,
        .agents = std::move(agents),
        .wiring = std::move(wiring),
        .controller = controller,
        .band = cal.band,
        .horizon = spec.horizon,
        .seed = spec.seed,
        .sensing_delay = spec.sensing_delay,
        .record_shifts = std::nullopt,
    };
    s.validate();
    return s;
}

std::vector<double> Trace::v_load() const {
    std::vector<double> v;
    v.reserve(steps.size());
    for (const StepRecord& s : steps) v.push_back(s.v_load);
    return v;
}

Trace run(const Scenario& scenario) {
    scenario.validate();
    const std::size_t n = scenario.agents.size();
    const auto horizon = static_cast<std::size_t>(scenario.horizon);
    const double r_source = scenario.circuit.r_source();
    const double g_base = scenario.circuit.base_conductance();
    std::vector<double> g_flex(n);
    for (std::size_t i = 0; i < n; ++i) {
        g_flex[i] = 1.0 / scenario.circuit.branches()[i].r_flex;
    }

    std::vector<AgentState> states(n);
    const bool record_shifts = scenario.records_shifts();

    Trace trace;
    trace.agent_count = n;
    trace.steps.reserve(horizon);
    if (record_shifts) trace.shifts.reserve(horizon * n);

    // Before the first delayed reading exists, agents sense the steady
    // voltage of the unperturbed passive pattern at t = 0.
    double g0 = g_base;
    for (std::size_t i = 0; i < n; ++i) {
        if (regulatory::desired_load(scenario.agents[i], states[i], 0)) g0 += g_flex[i];
    }
    const double v_initial = circuit::divide(r_source, scenario.v_source_at(0), g0).v_load;

    circuit::LoadState prospective = circuit::LoadState::all(n, false);

    for (std::size_t step = 0; step < horizon; ++step) {
        const auto t = static_cast<std::int64_t>(step);
        const double v_source = scenario.v_source_at(t);
        const double sensed =
            t >= scenario.sensing_delay ? trace.steps[step - static_cast<std::size_t>(scenario.sensing_delay)].v_load
                                        : v_initial;

        if (scenario.controller && t % scenario.controller->control_interval == 0) {
            const ControllerConfig& c = *scenario.controller;
            for (std::size_t i = 0; i < n; ++i) {
                prospective.flex_on[i] = regulatory::desired_load(scenario.agents[i], states[i], t);
            }
            for (const auto& instr :
                 regulatory::controller_plan(sensed, c.v_nominal, c.band, scenario.circuit, v_source, prospective)) {
                if (instr.action != regulatory::Action::Hold) states[instr.agent_id].pending = instr.action;
            }
        }

        double g = g_base;
        std::size_t n_on = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const AgentConfig& agent = scenario.agents[i];
            // Draws are keyed by (seed, t, id); rules that ignore them skip
            // the computation without shifting anyone else's stream.
            const double draw = agent.rule.kind == RuleKind::ProbabilisticReactive
                                    ? rng::uniform_draw(scenario.seed, step, i)
                                    : 0.0;
            const auto result = regulatory::agent_step(agent, states[i], t, sensed, draw);
            states[i] = result.state;
            if (result.flex_on) {
                g += g_flex[i];
                ++n_on;
            }
        }

        const auto d = circuit::divide(r_source, v_source, g);
        trace.steps.push_back({v_source, d.v_load, d.i_total, n_on});
        if (record_shifts) {
            for (const AgentState& s : states) trace.shifts.push_back(s.shift);
        }
    }
    return trace;
}

std::vector<Trace> run_batch(std::span<const Scenario> scenarios, unsigned threads) {
    std::vector<Trace> out(scenarios.size());
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(scenarios.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(scenarios.size());
    auto worker = [&] {
        for (std::size_t i = next++; i < scenarios.size(); i = next++) {
            try {
                out[i] = run(scenarios[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

Metrics compute_metrics(std::span<const double> v_load, const Band& band, Window window) {
    if (window.begin >= window.end) {
        throw std::invalid_argument("metrics window is empty");
    }
    if (window.end > v_load.size()) {
        throw std::invalid_argument("metrics window [" + std::to_string(window.begin) + ", " +
                                    std::to_string(window.end) + ") exceeds the trace length " +
                                    std::to_string(v_load.size()));
    }
    Metrics m;
    std::size_t outside = 0;
    for (std::size_t t = window.begin; t < window.end; ++t) {
        const double v = v_load[t];
        if (!band.contains(v)) ++outside;
        m.max_overshoot = std::max(m.max_overshoot, v - band.v_high);
        m.max_undershoot = std::max(m.max_undershoot, band.v_low - v);
        if (t > window.begin) {
            const double prev = v_load[t - 1];
            if ((prev > band.v_high) != (v > band.v_high)) ++m.band_crossings;
            if ((prev < band.v_low) != (v < band.v_low)) ++m.band_crossings;
        }
    }
    const std::size_t length = window.end - window.begin;
    m.outside_band_fraction = static_cast<double>(outside) / static_cast<double>(length);
    const std::size_t tail = std::max<std::size_t>(1, length / 10);
    m.settled = std::all_of(v_load.begin() + static_cast<std::ptrdiff_t>(window.end - tail),
                            v_load.begin() + static_cast<std::ptrdiff_t>(window.end),
                            [&](double v) { return band.contains(v); });
    return m;
}

Metrics compute_metrics(const Trace& trace, const Band& band, Window window) {
    return compute_metrics(trace.v_load(), band, window);
}

Window post_disturbance_window(const Scenario& scenario) noexcept {
    return {static_cast<std::size_t>(scenario.disturbance.t_end), static_cast<std::size_t>(scenario.horizon)};
}

awareness::AwarenessDecl declare_awareness(const Scenario& scenario) {
    auto decl = awareness::AwarenessDecl::for_agents(scenario.agents.size(), scenario.controller.has_value());
    decl.controller_senses_root = scenario.controller && scenario.controller->senses_root;
    for (std::size_t i = 0; i < scenario.wiring.size(); ++i) {
        decl.agent_senses_root[i] = scenario.wiring[i].senses_root;
        decl.peer_images[i] = scenario.wiring[i].peer_images;
        decl.controller_channel[i] = scenario.wiring[i].controller_channel;
    }
    return decl;
}

std::vector<RuleKind> rule_kinds(const Scenario& scenario) {
    std::vector<RuleKind> kinds;
    kinds.reserve(scenario.agents.size());
    for (const AgentConfig& a : scenario.agents) kinds.push_back(a.rule.kind);
    return kinds;
}

} // namespace reflexgrid::engine
