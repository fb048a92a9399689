#pragma once

// Deterministic discrete-time loop coupling the source schedule, the agents,
// the optional central controller and the circuit.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "reflexgrid/awareness.hpp"
#include "reflexgrid/circuit.hpp"
#include "reflexgrid/regulatory.hpp"

namespace reflexgrid::engine {

using regulatory::Band;

/// delta_v is subtracted from the source during [t_start, t_end).
struct Disturbance {
    std::int64_t t_start = 0;
    std::int64_t t_end = 0;
    double delta_v = 0.0;
};

/// The information channels of one agent.
struct AgentWiring {
    bool senses_root = true;
    std::set<std::size_t> peer_images;
    bool controller_channel = false;
};

struct ControllerConfig {
    double v_nominal = 0.0;
    Band band{};
    std::int64_t control_interval = 1;
    bool senses_root = true;
};

struct Scenario {
    circuit::CircuitConfig circuit;
    double v_source_base = 0.0;
    Disturbance disturbance;
    std::vector<regulatory::AgentConfig> agents;
    std::vector<AgentWiring> wiring;
    std::optional<ControllerConfig> controller;
    Band band{};
    std::int64_t horizon = 0;
    std::uint64_t seed = 0;
    std::int64_t sensing_delay = 1;
    /// Unset means record when N <= 1000.
    std::optional<bool> record_shifts;

    /// Throws std::invalid_argument on a broken invariant.
    void validate() const;

    double v_source_at(std::int64_t t) const noexcept;
    bool records_shifts() const noexcept;
    std::size_t agent_count() const noexcept { return agents.size(); }
};

/// Parameters for a population of identical agents on identical branches.
struct HomogeneousSpec {
    std::size_t count = 100;
    double r_source = 0.05;
    double r_base = 100.0;
    double r_flex = 50.0;
    double v_source_base = 10.0;
    std::int64_t period = 100;
    std::int64_t on_steps = 50;
    /// Uniform spread puts agent i at phase i mod period; otherwise all at 0.
    bool uniform_phases = true;
    regulatory::Rule rule;
    /// Unset means one full period.
    std::optional<std::int64_t> max_shift;
    Disturbance disturbance{1000, 1500, 0.3};
    double band_ratio = 0.002;
    std::int64_t horizon = 5000;
    std::uint64_t seed = 0;
    std::int64_t sensing_delay = 1;
    bool controller = false;
    std::int64_t control_interval = 1;
};

/// Builds and calibrates a homogeneous scenario. Wiring follows the rule:
/// every agent senses the root; probabilistic agents hold images of every
/// agent; commanded agents get the controller channel.
Scenario build_homogeneous(const HomogeneousSpec& spec);

struct StepRecord {
    double v_source;
    double v_load;
    double i_total;
    std::size_t n_flex_on;
};

struct Trace {
    std::vector<StepRecord> steps;
    std::size_t agent_count = 0;
    /// Row-major [step][agent]; empty unless shifts were recorded.
    std::vector<std::int64_t> shifts;

    std::size_t size() const noexcept { return steps.size(); }
    bool has_shifts() const noexcept { return !shifts.empty(); }
    std::span<const std::int64_t> shifts_at(std::size_t t) const {
        return std::span<const std::int64_t>(shifts).subspan(t * agent_count, agent_count);
    }
    std::vector<double> v_load() const;
};

Trace run(const Scenario& scenario);

/// Runs independent scenarios on up to `threads` workers (0 = hardware
/// concurrency). Results are in input order and identical to serial runs.
std::vector<Trace> run_batch(std::span<const Scenario> scenarios, unsigned threads = 0);

/// Half-open step range [begin, end).
struct Window {
    std::size_t begin;
    std::size_t end;
};

struct Metrics {
    double outside_band_fraction = 0.0;
    /// Band-edge crossings between consecutive steps; a jump from above the
    /// band to below it crosses both edges and counts two.
    std::size_t band_crossings = 0;
    double max_overshoot = 0.0;  ///< volts above v_high, 0 if never above
    double max_undershoot = 0.0; ///< volts below v_low, 0 if never below
    /// Inside the band for the whole final 10% of the window.
    bool settled = false;
};

/// Throws std::invalid_argument for an empty window or one past the trace.
Metrics compute_metrics(std::span<const double> v_load, const Band& band, Window window);
Metrics compute_metrics(const Trace& trace, const Band& band, Window window);

/// [t_end, horizon): the stretch after the disturbance.
Window post_disturbance_window(const Scenario& scenario) noexcept;

struct Calibration {
    double v_nominal;
    Band band;
};

/// v_nominal is v_load at the expected connected count
/// round(N * on_steps / period); the band is v_nominal * (1 -/+ band_ratio).
/// Throws std::invalid_argument unless agents share period and on_steps and
/// the branches are identical.
Calibration calibrate_nominal(const Scenario& scenario, double band_ratio = 0.002);
Calibration calibrate_nominal(const circuit::CircuitConfig& circuit, double v_source_base,
                              std::int64_t period, std::int64_t on_steps, double band_ratio = 0.002);

/// The awareness declaration implied by a scenario's wiring: root T,
/// agents a0..a{N-1}, controller c when one is configured.
awareness::AwarenessDecl declare_awareness(const Scenario& scenario);
std::vector<regulatory::RuleKind> rule_kinds(const Scenario& scenario);

} // namespace reflexgrid::engine
