#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "reflexgrid/algebra.hpp"
#include "reflexgrid/awareness.hpp"
#include "reflexgrid/circuit.hpp"
#include "reflexgrid/engine.hpp"
#include "reflexgrid/regulatory.hpp"
#include "reflexgrid/rng.hpp"
#include "reflexgrid/scenario_file.hpp"
#include "reflexgrid/trace_io.hpp"

namespace py = pybind11;
using namespace reflexgrid;

namespace {

void bind_algebra(py::module_& m) {
    using namespace algebra;
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    py::class_<Atom>(m, "Atom")
        .def(py::init<char, std::optional<std::uint32_t>>(), py::arg("letter"), py::arg("index") = std::nullopt)
        .def_static("parse", &Atom::parse)
        .def_property_readonly("letter", &Atom::letter)
        .def_property_readonly("index", &Atom::index)
        .def("__str__", &Atom::to_string)
        .def("__repr__", [](const Atom& a) { return "Atom('" + a.to_string() + "')"; })
        .def(py::self == py::self)
        .def("__hash__", [](const Atom& a) { return py::hash(py::str(a.to_string())); });

    py::class_<Word>(m, "Word")
        .def(py::init<>())
        .def(py::init<std::vector<Atom>>())
        .def_static("parse", &Word::parse)
        .def_property_readonly("atoms", [](const Word& w) { return std::vector<Atom>(w.atoms().begin(), w.atoms().end()); })
        .def("is_unit", &Word::is_unit)
        .def("__len__", &Word::size)
        .def("__str__", &Word::to_string)
        .def("__repr__", [](const Word& w) { return "Word('" + w.to_string() + "')"; })
        .def(py::self == py::self)
        .def(py::self * py::self)
        .def("__hash__", [](const Word& w) { return py::hash(py::str(w.to_string())); });

    py::class_<Polynomial>(m, "Polynomial")
        .def(py::init<>())
        .def(py::init([](const std::vector<Word>& words) {
            Polynomial p;
            for (const Word& w : words) p.insert(w);
            return p;
        }))
        .def_static("zero", &Polynomial::zero)
        .def_static("unit", &Polynomial::unit)
        .def_property_readonly("words", [](const Polynomial& p) {
            return std::vector<Word>(p.words().begin(), p.words().end());
        })
        .def("is_zero", &Polynomial::is_zero)
        .def("__contains__", [](const Polynomial& p, const Word& w) { return p.contains(w); })
        .def("__len__", &Polynomial::size)
        .def("__str__", &to_canonical_string)
        .def("__repr__", [](const Polynomial& p) { return "Polynomial('" + to_canonical_string(p) + "')"; })
        .def(py::self == py::self)
        .def(py::self + py::self)
        .def(py::self * py::self)
        .def("__pow__", [](const Polynomial& p, std::uint64_t n) { return algebra::pow(p, n); });

    m.def("parse_expression", &parse_expression, py::arg("text"));
    m.def("add", &add);
    m.def("mul", &mul);
    m.def("pow", &algebra::pow, py::arg("p"), py::arg("n"));
    m.def("apply_awareness", [](const Polynomial& omega, const std::vector<Atom>& observers) {
        return apply_awareness(omega, observers);
    });
    m.def("equals", &equals);
    m.def("contains_word", py::overload_cast<const Polynomial&, const Word&>(&contains_word));
    m.def("reflection_depth", &reflection_depth);
    m.def("to_canonical_string", &to_canonical_string);
}

void bind_circuit(py::module_& m) {
    using namespace circuit;
    py::class_<Branch>(m, "Branch")
        .def(py::init<double, double>(), py::arg("r_base"), py::arg("r_flex"))
        .def_readwrite("r_base", &Branch::r_base)
        .def_readwrite("r_flex", &Branch::r_flex);

    py::class_<CircuitConfig>(m, "CircuitConfig")
        .def(py::init<double, std::vector<Branch>>(), py::arg("r_source"), py::arg("branches"))
        .def_static("homogeneous", &CircuitConfig::homogeneous, py::arg("r_source"), py::arg("n"), py::arg("branch"))
        .def_property_readonly("r_source", &CircuitConfig::r_source)
        .def_property_readonly("branches", [](const CircuitConfig& c) {
            return std::vector<Branch>(c.branches().begin(), c.branches().end());
        })
        .def("is_homogeneous", &CircuitConfig::is_homogeneous)
        .def("__len__", &CircuitConfig::size);

    py::class_<CircuitSolution>(m, "CircuitSolution")
        .def_readonly("v_load", &CircuitSolution::v_load)
        .def_readonly("i_total", &CircuitSolution::i_total)
        .def_readonly("branch_currents", &CircuitSolution::branch_currents);

    m.def(
        "solve",
        [](const CircuitConfig& c, double v_source, std::vector<bool> flex_on) {
            return solve(c, v_source, LoadState{std::move(flex_on)});
        },
        py::arg("config"), py::arg("v_source"), py::arg("flex_on"));
    m.def("v_load_for_count", &v_load_for_count, py::arg("config"), py::arg("v_source"), py::arg("n_on"));
}

void bind_regulatory(py::module_& m) {
    using namespace regulatory;
    py::enum_<RuleKind>(m, "RuleKind")
        .value("PassiveCycle", RuleKind::PassiveCycle)
        .value("ReactiveThreshold", RuleKind::ReactiveThreshold)
        .value("ProbabilisticReactive", RuleKind::ProbabilisticReactive)
        .value("Commanded", RuleKind::Commanded);
    py::enum_<Latching>(m, "Latching").value("PerStep", Latching::PerStep).value("PerEvent", Latching::PerEvent);
    py::enum_<Action>(m, "Action")
        .value("Hold", Action::Hold)
        .value("Postpone", Action::Postpone)
        .value("Advance", Action::Advance);

    py::class_<Rule>(m, "Rule")
        .def(py::init([](RuleKind kind, double probability, Latching latching) {
                 return Rule{kind, probability, latching};
             }),
             py::arg("kind") = RuleKind::PassiveCycle, py::arg("probability") = 1.0,
             py::arg("latching") = Latching::PerStep)
        .def_readwrite("kind", &Rule::kind)
        .def_readwrite("probability", &Rule::probability)
        .def_readwrite("latching", &Rule::latching);

    py::class_<Band>(m, "Band")
        .def(py::init<double, double>(), py::arg("v_low"), py::arg("v_high"))
        .def_readwrite("v_low", &Band::v_low)
        .def_readwrite("v_high", &Band::v_high)
        .def("contains", &Band::contains)
        .def("__repr__", [](const Band& b) {
            return "Band(" + cli::format_double(b.v_low) + ", " + cli::format_double(b.v_high) + ")";
        });

    py::class_<AgentConfig>(m, "AgentConfig")
        .def(py::init<>())
        .def_readwrite("id", &AgentConfig::id)
        .def_readwrite("period", &AgentConfig::period)
        .def_readwrite("on_steps", &AgentConfig::on_steps)
        .def_readwrite("phase", &AgentConfig::phase)
        .def_readwrite("rule", &AgentConfig::rule)
        .def_readwrite("v_low", &AgentConfig::v_low)
        .def_readwrite("v_high", &AgentConfig::v_high)
        .def_readwrite("max_shift", &AgentConfig::max_shift)
        .def("validate", &AgentConfig::validate);

    py::class_<AgentState>(m, "AgentState")
        .def(py::init<>())
        .def_readwrite("shift", &AgentState::shift)
        .def_readwrite("pending", &AgentState::pending);

    py::class_<StepResult>(m, "StepResult")
        .def_readonly("state", &StepResult::state)
        .def_readonly("flex_on", &StepResult::flex_on)
        .def_readonly("reaction", &StepResult::reaction);

    py::class_<Instruction>(m, "Instruction")
        .def_readonly("agent_id", &Instruction::agent_id)
        .def_readonly("action", &Instruction::action);

    m.def("desired_load", &desired_load, py::arg("config"), py::arg("state"), py::arg("t"));
    m.def("agent_step", &agent_step, py::arg("config"), py::arg("state"), py::arg("t"), py::arg("sensed_v"),
          py::arg("rng_draw") = 0.0);
    m.def(
        "controller_plan",
        [](double sensed_v, double v_nominal, const Band& band, const circuit::CircuitConfig& config,
           double v_source_now, std::vector<bool> current_flex) {
            return controller_plan(sensed_v, v_nominal, band, config, v_source_now,
                                   circuit::LoadState{std::move(current_flex)});
        },
        py::arg("sensed_v"), py::arg("v_nominal"), py::arg("band"), py::arg("config"), py::arg("v_source_now"),
        py::arg("current_flex"));
}

void bind_engine(py::module_& m) {
    using namespace engine;
    py::class_<Disturbance>(m, "Disturbance")
        .def(py::init<std::int64_t, std::int64_t, double>(), py::arg("t_start") = 0, py::arg("t_end") = 0,
             py::arg("delta_v") = 0.0)
        .def_readwrite("t_start", &Disturbance::t_start)
        .def_readwrite("t_end", &Disturbance::t_end)
        .def_readwrite("delta_v", &Disturbance::delta_v);

    py::class_<Scenario>(m, "Scenario")
        .def_readwrite("seed", &Scenario::seed)
        .def_readwrite("horizon", &Scenario::horizon)
        .def_readwrite("band", &Scenario::band)
        .def_readwrite("disturbance", &Scenario::disturbance)
        .def_readwrite("agents", &Scenario::agents)
        .def_readwrite("record_shifts", &Scenario::record_shifts)
        .def_readwrite("sensing_delay", &Scenario::sensing_delay)
        .def_readonly("v_source_base", &Scenario::v_source_base)
        .def_property_readonly("circuit", [](const Scenario& s) { return s.circuit; })
        .def_property_readonly("has_controller", [](const Scenario& s) { return s.controller.has_value(); })
        .def("validate", &Scenario::validate)
        .def("__len__", &Scenario::agent_count);

    py::class_<HomogeneousSpec>(m, "HomogeneousSpec")
        .def(py::init<>())
        .def_readwrite("count", &HomogeneousSpec::count)
        .def_readwrite("r_source", &HomogeneousSpec::r_source)
        .def_readwrite("r_base", &HomogeneousSpec::r_base)
        .def_readwrite("r_flex", &HomogeneousSpec::r_flex)
        .def_readwrite("v_source_base", &HomogeneousSpec::v_source_base)
        .def_readwrite("period", &HomogeneousSpec::period)
        .def_readwrite("on_steps", &HomogeneousSpec::on_steps)
        .def_readwrite("uniform_phases", &HomogeneousSpec::uniform_phases)
        .def_readwrite("rule", &HomogeneousSpec::rule)
        .def_readwrite("max_shift", &HomogeneousSpec::max_shift)
        .def_readwrite("disturbance", &HomogeneousSpec::disturbance)
        .def_readwrite("band_ratio", &HomogeneousSpec::band_ratio)
        .def_readwrite("horizon", &HomogeneousSpec::horizon)
        .def_readwrite("seed", &HomogeneousSpec::seed)
        .def_readwrite("sensing_delay", &HomogeneousSpec::sensing_delay)
        .def_readwrite("controller", &HomogeneousSpec::controller)
        .def_readwrite("control_interval", &HomogeneousSpec::control_interval);

    py::class_<Trace>(m, "Trace")
        .def("__len__", &Trace::size)
        .def_property_readonly("v_load", &Trace::v_load)
        .def_property_readonly("v_source", [](const Trace& t) {
            std::vector<double> v;
            for (const auto& s : t.steps) v.push_back(s.v_source);
            return v;
        })
        .def_property_readonly("i_total", [](const Trace& t) {
            std::vector<double> v;
            for (const auto& s : t.steps) v.push_back(s.i_total);
            return v;
        })
        .def_property_readonly("n_flex_on", [](const Trace& t) {
            std::vector<std::size_t> v;
            for (const auto& s : t.steps) v.push_back(s.n_flex_on);
            return v;
        })
        .def("has_shifts", &Trace::has_shifts)
        .def("shifts_at", [](const Trace& t, std::size_t step) {
            if (!t.has_shifts() || step >= t.size()) throw py::index_error("no shifts recorded for that step");
            auto s = t.shifts_at(step);
            return std::vector<std::int64_t>(s.begin(), s.end());
        })
        .def("to_csv", [](const Trace& t, bool with_shifts) {
            std::ostringstream out;
            cli::write_trace_csv(out, t, with_shifts);
            return out.str();
        }, py::arg("with_shifts") = false)
        .def("to_svg", [](const Trace& t, const Band& band, const Disturbance& d) {
            std::ostringstream out;
            cli::write_svg(out, t, band, d);
            return out.str();
        });

    py::class_<Metrics>(m, "Metrics")
        .def_readonly("outside_band_fraction", &Metrics::outside_band_fraction)
        .def_readonly("band_crossings", &Metrics::band_crossings)
        .def_readonly("max_overshoot", &Metrics::max_overshoot)
        .def_readonly("max_undershoot", &Metrics::max_undershoot)
        .def_readonly("settled", &Metrics::settled);

    py::class_<Calibration>(m, "Calibration")
        .def_readonly("v_nominal", &Calibration::v_nominal)
        .def_readonly("band", &Calibration::band);

    m.def("build_homogeneous", &build_homogeneous, py::arg("spec"));
    m.def("run", &run, py::arg("scenario"), py::call_guard<py::gil_scoped_release>());
    m.def(
        "run_batch", [](const std::vector<Scenario>& s, unsigned threads) { return run_batch(s, threads); },
        py::arg("scenarios"), py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());
    m.def(
        "compute_metrics",
        [](const Trace& t, const Band& band, std::optional<std::size_t> begin, std::optional<std::size_t> end) {
            return compute_metrics(t, band, {begin.value_or(0), end.value_or(t.size())});
        },
        py::arg("trace"), py::arg("band"), py::arg("begin") = std::nullopt, py::arg("end") = std::nullopt);
    m.def("post_disturbance_window", [](const Scenario& s) {
        const Window w = post_disturbance_window(s);
        return py::make_tuple(w.begin, w.end);
    });
    m.def("calibrate_nominal", py::overload_cast<const Scenario&, double>(&calibrate_nominal), py::arg("scenario"),
          py::arg("band_ratio") = 0.002);
    m.def("structure_of_awareness", [](const Scenario& s) { return awareness::derive_structure(declare_awareness(s)); });
    m.def("validate_awareness", [](const Scenario& s) {
        std::vector<std::string> lines;
        for (const auto& v : awareness::validate_awareness(declare_awareness(s), rule_kinds(s))) {
            lines.push_back(v.to_string());
        }
        return lines;
    });

    py::register_exception<cli::ScenarioError>(m, "ScenarioError", PyExc_ValueError);
    m.def("load_scenario", &cli::load_scenario, py::arg("path"));
    m.def("parse_scenario", &cli::parse_scenario, py::arg("text"), py::arg("source_name") = "<scenario>");
    m.def("uniform_draw", &rng::uniform_draw, py::arg("seed"), py::arg("step"), py::arg("agent"));
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Reflexive-process algebra and a smart-appliance grid simulator";
    m.attr("__version__") = "0.1.0";
    bind_algebra(m);
    bind_circuit(m);
    bind_regulatory(m);
    bind_engine(m);
}
