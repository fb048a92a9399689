#include "reflexgrid/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <vector>

#include "reflexgrid/algebra.hpp"
#include "reflexgrid/awareness.hpp"
#include "reflexgrid/scenario_file.hpp"
#include "reflexgrid/trace_io.hpp"

namespace reflexgrid::cli {

namespace {

// Reports violations; returns true when the caller must stop (strict mode).
bool report_awareness(const engine::Scenario& scenario, bool strict, std::ostream& err) {
    const auto violations =
        awareness::validate_awareness(engine::declare_awareness(scenario), engine::rule_kinds(scenario));
    if (violations.empty()) return false;
    err << (strict ? "error" : "warning") << ": " << violations.size()
        << " awareness violation(s) in this scenario\n";
    for (const auto& v : violations) err << v.to_string() << '\n';
    return strict;
}

engine::Window pick_window(std::optional<std::size_t> begin, std::optional<std::size_t> end,
                           engine::Window fallback) {
    return {begin.value_or(fallback.begin), end.value_or(fallback.end)};
}

engine::Window default_window(const engine::Scenario& scenario) {
    const auto w = engine::post_disturbance_window(scenario);
    if (w.begin < w.end) return w;
    return {0, static_cast<std::size_t>(scenario.horizon)};
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
    try {
        return body();
    } catch (const ScenarioError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::input_error;
    } catch (const algebra::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::input_error;
    } catch (const CsvError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::input_error;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::input_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::runtime_error;
    }
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

int run_scenario(const RunOptions& options, std::ostream& out, std::ostream& err) {
    engine::Scenario scenario = load_scenario(options.scenario);
    if (options.seed) scenario.seed = *options.seed;
    if (options.record_shifts) scenario.record_shifts = true;
    if (report_awareness(scenario, options.strict_awareness, err)) return exit_code::awareness;

    const engine::Window window = pick_window(options.window_begin, options.window_end, default_window(scenario));
    if (window.begin >= window.end || window.end > static_cast<std::size_t>(scenario.horizon)) {
        throw std::invalid_argument("metrics window is empty or beyond the horizon");
    }

    engine::Trace trace;
    try {
        trace = engine::run(scenario);
    } catch (const std::exception& e) {
        err << "error: simulation failed: " << e.what() << '\n';
        return exit_code::runtime_error;
    }
    try {
        if (options.csv) {
            auto file = open_output(*options.csv);
            write_trace_csv(file, trace, options.record_shifts);
            if (!file.flush()) throw std::runtime_error("write to " + options.csv->string() + " failed");
        }
        if (options.svg) {
            auto file = open_output(*options.svg);
            write_svg(file, trace, scenario.band, scenario.disturbance);
            if (!file.flush()) throw std::runtime_error("write to " + options.svg->string() + " failed");
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::runtime_error;
    }
    out << format_summary(engine::compute_metrics(trace, scenario.band, window), scenario.band, window);
    return exit_code::ok;
}

int validate_scenario(const std::filesystem::path& path, bool strict_awareness, std::ostream& out,
                      std::ostream& err) {
    const engine::Scenario scenario = load_scenario(path);
    const auto decl = engine::declare_awareness(scenario);
    if (report_awareness(scenario, strict_awareness, err)) return exit_code::awareness;
    const auto omega = awareness::derive_structure(decl);
    out << path.string() << ": " << scenario.agent_count() << " agents, horizon " << scenario.horizon
        << ", structure of awareness has " << omega.size() << " words\n";
    if (omega.size() <= 64) out << "Omega = " << algebra::to_canonical_string(omega) << '\n';
    return exit_code::ok;
}

} // namespace

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] { return run_scenario(options, out, err); });
}

int cmd_validate(const std::filesystem::path& path, bool strict_awareness, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] { return validate_scenario(path, strict_awareness, out, err); });
}

int cmd_algebra(AlgebraMode mode, std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        switch (mode) {
        case AlgebraMode::Eval:
            if (args.size() != 1) throw std::invalid_argument("eval takes exactly one expression");
            out << algebra::to_canonical_string(algebra::parse_expression(args[0])) << '\n';
            break;
        case AlgebraMode::Equals:
            if (args.size() != 2) throw std::invalid_argument("equals takes exactly two expressions");
            out << (algebra::equals(algebra::parse_expression(args[0]), algebra::parse_expression(args[1]))
                        ? "true"
                        : "false")
                << '\n';
            break;
        case AlgebraMode::Awareness: {
            if (args.size() < 2) throw std::invalid_argument("awareness takes a base expression and observer atoms");
            const auto base = algebra::parse_expression(args[0]);
            std::vector<algebra::Atom> observers;
            for (std::size_t i = 1; i < args.size(); ++i) observers.push_back(algebra::Atom::parse(args[i]));
            out << algebra::to_canonical_string(algebra::apply_awareness(base, observers)) << '\n';
            break;
        }
        }
        return exit_code::ok;
    });
}

int cmd_metrics(const MetricsOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        std::ifstream in(options.csv, std::ios::binary);
        if (!in) throw CsvError("cannot open " + options.csv.string());
        const engine::Trace trace = read_trace_csv(in);

        std::optional<engine::Band> band;
        engine::Window fallback{0, trace.size()};
        if (options.scenario) {
            const auto scenario = load_scenario(*options.scenario);
            band = scenario.band;
            fallback = default_window(scenario);
        }
        if (options.v_low || options.v_high) {
            if (!options.v_low || !options.v_high) throw std::invalid_argument("give both --v-low and --v-high");
            band = engine::Band{*options.v_low, *options.v_high};
        }
        if (!band) throw std::invalid_argument("metrics needs --v-low/--v-high or --scenario");
        if (!(band->v_low < band->v_high)) throw std::invalid_argument("v_low must be below v_high");

        const engine::Window window = pick_window(options.window_begin, options.window_end, fallback);
        out << format_summary(engine::compute_metrics(trace, *band, window), *band, window);
        return exit_code::ok;
    });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Reflexive-process algebra and smart-appliance grid simulator", "reflexgrid"};
    app.require_subcommand(1);

    RunOptions run_opts;
    std::uint64_t seed = 0;
    std::string csv_path;
    std::string svg_path;
    std::size_t from = 0;
    std::size_t to = 0;
    auto* run = app.add_subcommand("run", "Simulate a scenario, write the trace, print the metrics summary");
    run->add_option("scenario", run_opts.scenario, "Scenario file")->required();
    auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
    auto* csv_opt = run->add_option("--csv,-o", csv_path, "Write the CSV trace here");
    auto* svg_opt = run->add_option("--svg", svg_path, "Write an SVG chart of v_load here");
    run->add_flag("--strict-awareness", run_opts.strict_awareness, "Refuse to run when awareness validation fails");
    run->add_flag("--record-shifts", run_opts.record_shifts, "Add per-agent shift columns to the CSV");
    auto* run_from = run->add_option("--from", from, "Metrics window start (default: disturbance end)");
    auto* run_to = run->add_option("--to", to, "Metrics window end, exclusive (default: horizon)");

    std::filesystem::path validate_path;
    bool validate_strict = false;
    auto* validate = app.add_subcommand("validate", "Parse a scenario and check its structure of awareness");
    validate->add_option("scenario", validate_path, "Scenario file")->required();
    validate->add_flag("--strict-awareness", validate_strict, "Exit 3 when awareness validation fails");

    auto* algebra_cmd = app.add_subcommand("algebra", "Evaluate reflexive-process algebra expressions");
    algebra_cmd->require_subcommand(1);
    std::vector<std::string> eval_args;
    std::vector<std::string> equals_args;
    std::vector<std::string> awareness_args;
    auto* eval = algebra_cmd->add_subcommand("eval", "Print the canonical form of an expression");
    eval->add_option("expression", eval_args)->required()->expected(1);
    auto* equals = algebra_cmd->add_subcommand("equals", "Print whether two expressions are equal");
    equals->add_option("expressions", equals_args)->required()->expected(2);
    auto* aware = algebra_cmd->add_subcommand("awareness", "Apply the awareness operator: base * (1 + observers)");
    aware->add_option("base_and_observers", awareness_args, "Base expression followed by observer atoms")
        ->required()
        ->expected(2, -1);

    MetricsOptions metrics_opts;
    std::string metrics_scenario;
    double v_low = 0.0;
    double v_high = 0.0;
    auto* metrics = app.add_subcommand("metrics", "Compute band metrics from a CSV trace");
    metrics->add_option("trace", metrics_opts.csv, "CSV trace file")->required();
    auto* m_scenario = metrics->add_option("--scenario", metrics_scenario, "Take band and window from a scenario");
    auto* m_low = metrics->add_option("--v-low", v_low, "Band lower edge (volts)");
    auto* m_high = metrics->add_option("--v-high", v_high, "Band upper edge (volts)");
    auto* m_from = metrics->add_option("--from", from, "Window start (default: 0 or disturbance end)");
    auto* m_to = metrics->add_option("--to", to, "Window end, exclusive (default: trace length or horizon)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_code::input_error;
    }

    if (run->parsed()) {
        if (*seed_opt) run_opts.seed = seed;
        if (*csv_opt) run_opts.csv = csv_path;
        if (*svg_opt) run_opts.svg = svg_path;
        if (*run_from) run_opts.window_begin = from;
        if (*run_to) run_opts.window_end = to;
        return cmd_run(run_opts, out, err);
    }
    if (validate->parsed()) {
        return cmd_validate(validate_path, validate_strict, out, err);
    }
    if (algebra_cmd->parsed()) {
        if (eval->parsed()) return cmd_algebra(AlgebraMode::Eval, eval_args, out, err);
        if (equals->parsed()) return cmd_algebra(AlgebraMode::Equals, equals_args, out, err);
        return cmd_algebra(AlgebraMode::Awareness, awareness_args, out, err);
    }
    if (*m_scenario) metrics_opts.scenario = metrics_scenario;
    if (*m_low) metrics_opts.v_low = v_low;
    if (*m_high) metrics_opts.v_high = v_high;
    if (*m_from) metrics_opts.window_begin = from;
    if (*m_to) metrics_opts.window_end = to;
    return cmd_metrics(metrics_opts, out, err);
}

} // namespace reflexgrid::cli
