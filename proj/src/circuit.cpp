#include "reflexgrid/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace reflexgrid::circuit {

namespace {

void require_resistance(double r, const char* what) {
    if (!std::isfinite(r) || r <= 0.0) {
        throw std::invalid_argument(std::string(what) + " must be a finite positive resistance, got " +
                                    std::to_string(r));
    }
}

void require_source(double v_source) {
    if (!std::isfinite(v_source) || v_source < 0.0) {
        throw std::invalid_argument("v_source must be finite and non-negative, got " +
                                    std::to_string(v_source));
    }
}

} // namespace

CircuitConfig::CircuitConfig(double r_source, std::vector<Branch> branches)
    : r_source_(r_source), branches_(std::move(branches)) {
    require_resistance(r_source_, "r_source");
    if (branches_.empty()) {
        throw std::invalid_argument("circuit needs at least one branch");
    }
    for (const Branch& b : branches_) {
        require_resistance(b.r_base, "r_base");
        require_resistance(b.r_flex, "r_flex");
        base_conductance_ += 1.0 / b.r_base;
        homogeneous_ = homogeneous_ && b.r_base == branches_.front().r_base &&
                       b.r_flex == branches_.front().r_flex;
    }
}

CircuitConfig CircuitConfig::homogeneous(double r_source, std::size_t n, Branch branch) {
    return CircuitConfig(r_source, std::vector<Branch>(n, branch));
}

std::size_t LoadState::count_on() const noexcept {
    return static_cast<std::size_t>(std::count(flex_on.begin(), flex_on.end(), true));
}

CircuitSolution solve(const CircuitConfig& config, double v_source, const LoadState& loads) {
    require_source(v_source);
    if (loads.size() != config.size()) {
        throw std::invalid_argument("load state has " + std::to_string(loads.size()) +
                                    " entries for a circuit with " + std::to_string(config.size()) +
                                    " branches");
    }
    const auto branches = config.branches();
    std::vector<double> branch_g(branches.size());
    double g = 0.0;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        branch_g[i] = 1.0 / branches[i].r_base + (loads.flex_on[i] ? 1.0 / branches[i].r_flex : 0.0);
        g += branch_g[i];
    }
    const Divider d = divide(config.r_source(), v_source, g);
    CircuitSolution out{d.v_load, d.i_total, {}};
    out.branch_currents.reserve(branches.size());
    for (double bg : branch_g) {
        out.branch_currents.push_back(d.v_load * bg);
    }
    return out;
}

double v_load_for_count(const CircuitConfig& config, double v_source, std::size_t n_on) {
    require_source(v_source);
    if (!config.is_homogeneous()) {
        throw std::invalid_argument("v_load_for_count requires identical branches");
    }
    if (n_on > config.size()) {
        throw std::invalid_argument("n_on exceeds the branch count");
    }
    const Branch& b = config.branches().front();
    const double g = static_cast<double>(config.size()) / b.r_base + static_cast<double>(n_on) / b.r_flex;
    return divide(config.r_source(), v_source, g).v_load;
}

} // namespace reflexgrid::circuit
