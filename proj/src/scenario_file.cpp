#include "reflexgrid/scenario_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace reflexgrid::cli {

using engine::Scenario;
using regulatory::AgentConfig;
using regulatory::Rule;
using regulatory::RuleKind;

ScenarioError::ScenarioError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + message : source + ": " + message),
      line_(line) {}

namespace {

const std::map<std::string, std::set<std::string>, std::less<>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>, std::less<>> keys{
        {"circuit", {"r_source", "r_base", "r_flex"}},
        {"source", {"v_base"}},
        {"disturbance", {"t_start", "t_end", "delta_v"}},
        {"agents",
         {"count", "period", "on_steps", "phase_spread", "phase", "rule", "probability", "latching", "max_shift",
          "v_low", "v_high", "senses_root", "peer_images", "controller_channel"}},
        {"agent",
         {"period", "on_steps", "phase", "rule", "probability", "latching", "max_shift", "v_low", "v_high",
          "senses_root", "peer_images", "controller_channel", "r_base", "r_flex"}},
        {"controller", {"enabled", "v_nominal", "v_low", "v_high", "control_interval", "senses_root"}},
        {"band", {"ratio", "v_low", "v_high"}},
        {"run", {"horizon", "seed", "sensing_delay", "record_shifts"}},
    };
    return keys;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Entry {
    std::string value;
    std::size_t line;
};

struct Section {
    std::size_t line = 0;
    std::map<std::string, Entry, std::less<>> entries;
};

class Document {
public:
    Document(std::string_view text, std::string source) : source_(std::move(source)) { parse(text); }

    [[noreturn]] void fail(std::size_t line, const std::string& message) const {
        throw ScenarioError(source_, line, message);
    }

    const Section* section(std::string_view name) const {
        auto it = sections_.find(name);
        return it == sections_.end() ? nullptr : &it->second;
    }

    // Per-agent override blocks, keyed by agent id.
    const std::map<std::size_t, Section>& agent_sections() const { return agents_; }

    const Entry* entry(const Section* s, std::string_view key) const {
        if (s == nullptr) return nullptr;
        auto it = s->entries.find(key);
        return it == s->entries.end() ? nullptr : &it->second;
    }

    template <typename T>
    std::optional<T> get(const Section* s, std::string_view key) const {
        const Entry* e = entry(s, key);
        if (e == nullptr) return std::nullopt;
        return convert<T>(*e, key);
    }

    template <typename T>
    T require(const Section* s, std::string_view section_name, std::string_view key) const {
        const Entry* e = entry(s, key);
        if (e == nullptr) {
            fail(s ? s->line : 0, "missing required key '" + std::string(key) + "' in [" +
                                      std::string(section_name) + "]");
        }
        return convert<T>(*e, key);
    }

    template <typename T>
    T convert(const Entry& e, std::string_view key) const {
        const std::string_view v = e.value;
        if constexpr (std::is_same_v<T, bool>) {
            if (v == "true") return true;
            if (v == "false") return false;
            fail(e.line, "'" + std::string(key) + "' expects true or false, got '" + e.value + "'");
        } else if constexpr (std::is_same_v<T, std::string>) {
            return e.value;
        } else {
            T out{};
            const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
            if (ec != std::errc{} || ptr != v.data() + v.size()) {
                fail(e.line, "'" + std::string(key) + "' expects a number, got '" + e.value + "'");
            }
            return out;
        }
    }

private:
    void parse(std::string_view text) {
        Section* current = nullptr;
        std::string current_name;
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const std::size_t nl = text.find('\n', pos);
            std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;

            if (line.front() == '[') {
                if (line.back() != ']') fail(line_no, "malformed section header");
                const std::string name(trim(line.substr(1, line.size() - 2)));
                current = open_section(name, line_no);
                current_name = name;
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
            if (current == nullptr) fail(line_no, "key outside of any section");
            const std::string key(trim(line.substr(0, eq)));
            const std::string value(trim(line.substr(eq + 1)));
            if (key.empty()) fail(line_no, "empty key");
            if (value.empty()) fail(line_no, "empty value for '" + key + "'");
            const std::string kind = current_name.starts_with("agent.") ? "agent" : current_name;
            if (!allowed_keys().at(kind).contains(key)) {
                fail(line_no, "unknown key '" + key + "' in [" + current_name + "]");
            }
            if (!current->entries.emplace(key, Entry{value, line_no}).second) {
                fail(line_no, "duplicate key '" + key + "' in [" + current_name + "]");
            }
        }
    }

    Section* open_section(const std::string& name, std::size_t line_no) {
        if (name.starts_with("agent.")) {
            const std::string_view id_text = std::string_view(name).substr(6);
            std::size_t id = 0;
            const auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
            if (id_text.empty() || ec != std::errc{} || ptr != id_text.data() + id_text.size()) {
                fail(line_no, "bad agent id in section [" + name + "]");
            }
            auto [it, inserted] = agents_.try_emplace(id);
            if (!inserted) fail(line_no, "duplicate section [" + name + "]");
            it->second.line = line_no;
            return &it->second;
        }
        if (!allowed_keys().contains(name) || name == "agent") fail(line_no, "unknown section [" + name + "]");
        auto [it, inserted] = sections_.try_emplace(name);
        if (!inserted) fail(line_no, "duplicate section [" + name + "]");
        it->second.line = line_no;
        return &it->second;
    }

    std::string source_;
    std::map<std::string, Section, std::less<>> sections_;
    std::map<std::size_t, Section> agents_;
};

regulatory::Latching parse_latching(const Document& doc, const Entry& e) {
    if (e.value == "per_step") return regulatory::Latching::PerStep;
    if (e.value == "per_event") return regulatory::Latching::PerEvent;
    doc.fail(e.line, "latching must be per_step or per_event, got '" + e.value + "'");
}

std::set<std::size_t> parse_peers(const Document& doc, const Entry& e, std::size_t n) {
    std::set<std::size_t> peers;
    if (e.value == "none") return peers;
    if (e.value == "all") {
        for (std::size_t i = 0; i < n; ++i) peers.insert(peers.end(), i);
        return peers;
    }
    std::string_view rest = e.value;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = trim(rest.substr(0, comma));
        std::size_t id = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), id);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
            doc.fail(e.line, "peer_images expects none, all, or a comma-separated id list");
        }
        if (id >= n) doc.fail(e.line, "peer image of unknown agent " + std::to_string(id));
        peers.insert(id);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    return peers;
}

// Applies the keys shared by [agents] and [agent.<id>] to one agent.
void apply_agent_keys(const Document& doc, const Section* s, std::size_t n, AgentConfig& agent,
                      engine::AgentWiring& wiring, bool& max_shift_set) {
    if (auto v = doc.get<std::int64_t>(s, "period")) agent.period = *v;
    if (auto v = doc.get<std::int64_t>(s, "on_steps")) agent.on_steps = *v;
    if (auto v = doc.get<std::int64_t>(s, "phase")) agent.phase = *v;
    if (const Entry* e = doc.entry(s, "rule")) {
        try {
            agent.rule.kind = regulatory::parse_rule_kind(e->value);
        } catch (const std::invalid_argument& ex) {
            doc.fail(e->line, ex.what());
        }
    }
    if (auto v = doc.get<double>(s, "probability")) agent.rule.probability = *v;
    if (const Entry* e = doc.entry(s, "latching")) agent.rule.latching = parse_latching(doc, *e);
    if (auto v = doc.get<std::int64_t>(s, "max_shift")) {
        agent.max_shift = *v;
        max_shift_set = true;
    }
    if (auto v = doc.get<double>(s, "v_low")) agent.v_low = *v;
    if (auto v = doc.get<double>(s, "v_high")) agent.v_high = *v;
    if (auto v = doc.get<bool>(s, "senses_root")) wiring.senses_root = *v;
    if (const Entry* e = doc.entry(s, "peer_images")) wiring.peer_images = parse_peers(doc, *e, n);
    if (auto v = doc.get<bool>(s, "controller_channel")) wiring.controller_channel = *v;
}

Scenario build(const Document& doc) {
    const Section* circuit_s = doc.section("circuit");
    const Section* source_s = doc.section("source");
    const Section* dist_s = doc.section("disturbance");
    const Section* agents_s = doc.section("agents");
    const Section* ctrl_s = doc.section("controller");
    const Section* band_s = doc.section("band");
    const Section* run_s = doc.section("run");

    if (agents_s == nullptr) doc.fail(0, "missing section [agents]");
    if (circuit_s == nullptr) doc.fail(0, "missing section [circuit]");

    const auto count = doc.require<std::size_t>(agents_s, "agents", "count");
    if (count == 0) doc.fail(doc.entry(agents_s, "count")->line, "count must be at least 1");
    for (const auto& [id, section] : doc.agent_sections()) {
        if (id >= count) doc.fail(section.line, "override for agent " + std::to_string(id) + " beyond count");
    }

    const bool controller_enabled = ctrl_s != nullptr && doc.get<bool>(ctrl_s, "enabled").value_or(true);

    // Shared agent template.
    AgentConfig shared;
    shared.period = doc.require<std::int64_t>(agents_s, "agents", "period");
    shared.on_steps = doc.require<std::int64_t>(agents_s, "agents", "on_steps");
    engine::AgentWiring shared_wiring{true, {}, controller_enabled};
    bool shared_max_shift = false;
    apply_agent_keys(doc, agents_s, count, shared, shared_wiring, shared_max_shift);
    const bool shared_v_low = doc.entry(agents_s, "v_low") != nullptr;
    const bool shared_v_high = doc.entry(agents_s, "v_high") != nullptr;

    bool uniform = true;
    if (const Entry* e = doc.entry(agents_s, "phase_spread")) {
        if (e->value == "uniform") {
            uniform = true;
        } else if (e->value == "zero") {
            uniform = false;
        } else {
            doc.fail(e->line, "phase_spread must be uniform or zero, got '" + e->value + "'");
        }
        if (doc.entry(agents_s, "phase") != nullptr) doc.fail(e->line, "phase_spread and phase are exclusive");
    } else if (doc.entry(agents_s, "phase") != nullptr) {
        uniform = false;
    }

    // Branches.
    const double r_source = doc.require<double>(circuit_s, "circuit", "r_source");
    const double r_base = doc.require<double>(circuit_s, "circuit", "r_base");
    const double r_flex = doc.require<double>(circuit_s, "circuit", "r_flex");
    std::vector<circuit::Branch> branches(count, {r_base, r_flex});

    std::vector<AgentConfig> agents(count, shared);
    std::vector<engine::AgentWiring> wiring(count, shared_wiring);
    std::vector<bool> max_shift_set(count, shared_max_shift);
    std::vector<bool> v_low_set(count, shared_v_low);
    std::vector<bool> v_high_set(count, shared_v_high);
    for (std::size_t i = 0; i < count; ++i) {
        agents[i].id = i;
        if (uniform) agents[i].phase = static_cast<std::int64_t>(i) % std::max<std::int64_t>(1, shared.period);
    }
    for (const auto& [id, section] : doc.agent_sections()) {
        bool set = max_shift_set[id];
        apply_agent_keys(doc, &section, count, agents[id], wiring[id], set);
        max_shift_set[id] = set;
        if (doc.entry(&section, "v_low")) v_low_set[id] = true;
        if (doc.entry(&section, "v_high")) v_high_set[id] = true;
        if (auto v = doc.get<double>(&section, "r_base")) branches[id].r_base = *v;
        if (auto v = doc.get<double>(&section, "r_flex")) branches[id].r_flex = *v;
        if (doc.entry(&section, "period") && !doc.entry(&section, "phase") && uniform) {
            agents[id].phase = static_cast<std::int64_t>(id) % std::max<std::int64_t>(1, agents[id].period);
        }
    }
    for (std::size_t i = 0; i < count; ++i) {
        if (!max_shift_set[i]) agents[i].max_shift = agents[i].period;
    }

    std::optional<circuit::CircuitConfig> circuit;
    try {
        circuit.emplace(r_source, std::move(branches));
    } catch (const std::invalid_argument& ex) {
        doc.fail(circuit_s->line, ex.what());
    }

    const double v_base = doc.require<double>(source_s, "source", "v_base");

    // Band: explicit edges, or calibrated from the expected connected count.
    regulatory::Band band{};
    std::optional<double> calibrated_nominal;
    const auto band_low = doc.get<double>(band_s, "v_low");
    const auto band_high = doc.get<double>(band_s, "v_high");
    const auto band_ratio = doc.get<double>(band_s, "ratio");
    if (band_low || band_high) {
        if (!band_low || !band_high) doc.fail(band_s->line, "[band] needs both v_low and v_high");
        if (band_ratio) doc.fail(doc.entry(band_s, "ratio")->line, "[band] ratio conflicts with explicit edges");
        band = {*band_low, *band_high};
    } else {
        Scenario probe{.circuit = *circuit, .v_source_base = v_base, .agents = agents};
        try {
            const auto cal = engine::calibrate_nominal(probe, band_ratio.value_or(0.002));
            band = cal.band;
            calibrated_nominal = cal.v_nominal;
        } catch (const std::invalid_argument& ex) {
            doc.fail(band_s ? band_s->line : 0, std::string("cannot calibrate the band: ") + ex.what() +
                                                    "; give [band] v_low and v_high");
        }
    }
    for (std::size_t i = 0; i < count; ++i) {
        if (!v_low_set[i]) agents[i].v_low = band.v_low;
        if (!v_high_set[i]) agents[i].v_high = band.v_high;
    }

    std::optional<engine::ControllerConfig> controller;
    if (controller_enabled) {
        engine::ControllerConfig c;
        c.band = band;
        if (auto v = doc.get<double>(ctrl_s, "v_low")) c.band.v_low = *v;
        if (auto v = doc.get<double>(ctrl_s, "v_high")) c.band.v_high = *v;
        if (const Entry* e = doc.entry(ctrl_s, "v_nominal"); e != nullptr && e->value != "auto") {
            c.v_nominal = doc.convert<double>(*e, "v_nominal");
        } else {
            c.v_nominal = calibrated_nominal.value_or(c.band.midpoint());
        }
        c.control_interval = doc.get<std::int64_t>(ctrl_s, "control_interval").value_or(1);
        c.senses_root = doc.get<bool>(ctrl_s, "senses_root").value_or(true);
        controller = c;
    }

    engine::Disturbance disturbance;
    disturbance.t_start = doc.get<std::int64_t>(dist_s, "t_start").value_or(0);
    disturbance.t_end = doc.get<std::int64_t>(dist_s, "t_end").value_or(disturbance.t_start);
    disturbance.delta_v = doc.get<double>(dist_s, "delta_v").value_or(0.0);

    std::optional<bool> record_shifts;
    if (const Entry* e = doc.entry(run_s, "record_shifts"); e != nullptr && e->value != "auto") {
        record_shifts = doc.convert<bool>(*e, "record_shifts");
    }

    Scenario scenario{
        .circuit = std::move(*circuit),
        .v_source_base = v_base,
        .disturbance = disturbance,
        .agents = std::move(agents),
        .wiring = std::move(wiring),
        .controller = controller,
        .band = band,
        .horizon = doc.require<std::int64_t>(run_s, "run", "horizon"),
        .seed = doc.get<std::uint64_t>(run_s, "seed").value_or(0),
        .sensing_delay = doc.get<std::int64_t>(run_s, "sensing_delay").value_or(1),
        .record_shifts = record_shifts,
    };
    try {
        scenario.validate();
    } catch (const std::invalid_argument& ex) {
        doc.fail(0, ex.what());
    }
    return scenario;
}

} // namespace

Scenario parse_scenario(std::string_view text, const std::string& source_name) {
    const Document doc(text, source_name);
    return build(doc);
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ScenarioError(path.string(), 0, "cannot open scenario file");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), path.string());
}

} // namespace reflexgrid::cli
