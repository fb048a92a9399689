#include <doctest.h>

#include <vector>

#include "reflexgrid/engine.hpp"
#include "reflexgrid/rng.hpp"

using namespace reflexgrid;
using namespace reflexgrid::engine;
using regulatory::Rule;

namespace {

HomogeneousSpec small(Rule rule, bool controller = false) {
    HomogeneousSpec s;
    s.count = 12;
    s.period = 10;
    s.on_steps = 5;
    s.rule = rule;
    s.controller = controller;
    s.max_shift = 40;
    s.disturbance = {50, 80, 0.3};
    s.horizon = 300;
    s.seed = 5;
    return s;
}

// Straightforward loop over the public step functions and the general
// circuit solver.
std::vector<StepRecord> reference_run(const Scenario& s) {
    const std::size_t n = s.agents.size();
    std::vector<regulatory::AgentState> states(n);
    circuit::LoadState start = circuit::LoadState::all(n, false);
    for (std::size_t i = 0; i < n; ++i) start.flex_on[i] = regulatory::desired_load(s.agents[i], states[i], 0);
    const double v_initial = circuit::solve(s.circuit, s.v_source_at(0), start).v_load;

    std::vector<StepRecord> out;
    for (std::int64_t t = 0; t < s.horizon; ++t) {
        const double vs = s.v_source_at(t);
        const double sensed = t >= s.sensing_delay ? out[static_cast<std::size_t>(t - s.sensing_delay)].v_load : v_initial;
        if (s.controller && t % s.controller->control_interval == 0) {
            circuit::LoadState now = circuit::LoadState::all(n, false);
            for (std::size_t i = 0; i < n; ++i) now.flex_on[i] = regulatory::desired_load(s.agents[i], states[i], t);
            for (const auto& ins : regulatory::controller_plan(sensed, s.controller->v_nominal, s.controller->band,
                                                               s.circuit, vs, now)) {
                if (ins.action != regulatory::Action::Hold) states[ins.agent_id].pending = ins.action;
            }
        }
        circuit::LoadState loads = circuit::LoadState::all(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = rng::uniform_draw(s.seed, static_cast<std::uint64_t>(t), i);
            const auto r = regulatory::agent_step(s.agents[i], states[i], t, sensed, u);
            states[i] = r.state;
            loads.flex_on[i] = r.flex_on;
        }
        const auto sol = circuit::solve(s.circuit, vs, loads);
        out.push_back({vs, sol.v_load, sol.i_total, loads.count_on()});
    }
    return out;
}

} // namespace

TEST_CASE("source schedule") {
    const Scenario s = build_homogeneous(small(Rule::passive()));
    CHECK(s.v_source_at(49) == 10.0);
    CHECK(s.v_source_at(50) == doctest::Approx(9.7));
    CHECK(s.v_source_at(79) == doctest::Approx(9.7));
    CHECK(s.v_source_at(80) == 10.0);
}

TEST_CASE("reference calibration") {
    const Scenario s = build_homogeneous(HomogeneousSpec{});
    // 50 of 100 flexible loads: G = 100/100 + 50/50 = 2 S, v = 10 / 1.1.
    const Calibration c = calibrate_nominal(s);
    CHECK(c.v_nominal == doctest::Approx(10.0 / 1.1).epsilon(1e-14));
    CHECK(c.band.v_low == doctest::Approx(10.0 / 1.1 * 0.998).epsilon(1e-14));
    CHECK(s.band == c.band);
    CHECK(s.agents[37].phase == 37);
    CHECK(s.agents[0].max_shift == 100);
}

TEST_CASE("engine agrees with a plain reference loop") {
    for (const auto& [name, spec] : std::vector<std::pair<const char*, HomogeneousSpec>>{
             {"passive", small(Rule::passive())},
             {"reactive", small(Rule::reactive())},
             {"probabilistic", small(Rule::probabilistic(0.3))},
             {"per-event", small(Rule::probabilistic(0.3, regulatory::Latching::PerEvent))},
             {"commanded", small(Rule::commanded(), true)}}) {
        CAPTURE(name);
        const Scenario s = build_homogeneous(spec);
        const Trace got = run(s);
        const auto want = reference_run(s);
        REQUIRE(got.size() == want.size());
        for (std::size_t t = 0; t < want.size(); ++t) {
            CAPTURE(t);
            REQUIRE(got.steps[t].n_flex_on == want[t].n_flex_on);
            REQUIRE(got.steps[t].v_load == doctest::Approx(want[t].v_load).epsilon(1e-12));
            REQUIRE(got.steps[t].i_total == doctest::Approx(want[t].i_total).epsilon(1e-12));
        }
    }
}

TEST_CASE("passive population is periodic and steady") {
    const Scenario s = build_homogeneous(HomogeneousSpec{});
    const Trace tr = run(s);
    for (std::size_t t = 0; t < tr.size(); ++t) REQUIRE(tr.steps[t].n_flex_on == 50);
    const Metrics m = compute_metrics(tr, s.band, post_disturbance_window(s));
    CHECK(m.outside_band_fraction == 0.0);
    CHECK(m.settled);
}

TEST_CASE("reactive agents herd") {
    HomogeneousSpec spec;
    spec.rule = Rule::reactive();
    spec.max_shift = 1000;
    const Scenario s = build_homogeneous(spec);
    const Trace tr = run(s);
    REQUIRE(tr.has_shifts());
    for (std::size_t t = 0; t < tr.size(); ++t) {
        const auto row = tr.shifts_at(t);
        for (auto v : row) REQUIRE(v == row[0]);
    }
}

TEST_CASE("runs are deterministic and batches match serial runs") {
    std::vector<Scenario> batch;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        auto spec = small(Rule::probabilistic(0.3));
        spec.seed = seed;
        batch.push_back(build_homogeneous(spec));
    }
    const auto traces = run_batch(batch, 3);
    for (std::size_t k = 0; k < batch.size(); ++k) {
        const Trace serial = run(batch[k]);
        REQUIRE(traces[k].v_load() == serial.v_load());
        REQUIRE(traces[k].shifts == serial.shifts);
    }
    CHECK(traces[0].v_load() != traces[1].v_load());
    auto bad = batch;
    bad[3].horizon = 0;
    CHECK_THROWS_AS(run_batch(bad, 2), std::invalid_argument);
}

TEST_CASE("shift recording follows the population size unless forced") {
    Scenario s = build_homogeneous(small(Rule::passive()));
    CHECK(s.records_shifts());
    s.record_shifts = false;
    CHECK_FALSE(run(s).has_shifts());
    HomogeneousSpec big;
    big.count = 1001;
    big.horizon = 10;
    big.disturbance = {};
    CHECK_FALSE(build_homogeneous(big).records_shifts());
}

TEST_CASE("scenario validation") {
    const Scenario good = build_homogeneous(small(Rule::passive()));
    auto s = good;
    s.sensing_delay = 0;
    CHECK_THROWS(s.validate());
    s = good;
    s.disturbance.t_end = s.horizon + 1;
    CHECK_THROWS(s.validate());
    s = good;
    s.wiring[0].controller_channel = true;
    CHECK_THROWS(s.validate());
    s = good;
    s.agents.pop_back();
    CHECK_THROWS(s.validate());
    s = good;
    s.agents[2].id = 7;
    CHECK_THROWS(s.validate());
}

TEST_CASE("metrics by hand") {
    const Band band{1.0, 2.0};
    const std::vector<double> v{1.5, 2.5, 0.5, 1.5, 1.5, 1.0, 2.0, 3.0, 1.5, 1.5};
    const Metrics m = compute_metrics(v, band, {0, v.size()});
    CHECK(m.outside_band_fraction == doctest::Approx(0.3));
    // 1.5->2.5 one, 2.5->0.5 two, 0.5->1.5 one, 2.0->3.0 one, 3.0->1.5 one
    CHECK(m.band_crossings == 6);
    CHECK(m.max_overshoot == doctest::Approx(1.0));
    CHECK(m.max_undershoot == doctest::Approx(0.5));
    CHECK(m.settled);
    CHECK_FALSE(compute_metrics(v, band, {0, 8}).settled);
    const Metrics w = compute_metrics(v, band, {3, 7});
    CHECK(w.outside_band_fraction == 0.0);
    CHECK(w.band_crossings == 0);
    CHECK(w.max_overshoot == 0.0);
    CHECK_THROWS(compute_metrics(v, band, {4, 4}));
    CHECK_THROWS(compute_metrics(v, band, {0, 11}));
}

TEST_CASE("awareness declaration mirrors the wiring") {
    const Scenario c = build_homogeneous(small(Rule::commanded(), true));
    const auto decl = declare_awareness(c);
    CHECK(decl.controller_atom.has_value());
    CHECK(decl.controller_channel[3]);
    CHECK(awareness::validate_awareness(decl, rule_kinds(c)).empty());
    const Scenario b = build_homogeneous(small(Rule::probabilistic(0.1)));
    CHECK(declare_awareness(b).peer_images[0].size() == 12);
}
