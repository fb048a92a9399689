#pragma once

// Physical layer: a DC source with internal resistance feeding N parallel
// agent branches. Each branch is a base load, optionally paralleled by the
// agent's flexible load. The load-bus voltage stands in for grid frequency.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace reflexgrid::circuit {

struct Branch {
    double r_base; ///< ohms
    double r_flex; ///< ohms
};

class CircuitConfig {
public:
    /// Throws std::invalid_argument unless every resistance is finite and
    /// positive and there is at least one branch.
    CircuitConfig(double r_source, std::vector<Branch> branches);

    /// N identical branches.
    static CircuitConfig homogeneous(double r_source, std::size_t n, Branch branch);

    double r_source() const noexcept { return r_source_; }
    std::span<const Branch> branches() const noexcept { return branches_; }
    std::size_t size() const noexcept { return branches_.size(); }
    bool is_homogeneous() const noexcept { return homogeneous_; }

    /// Sum of base-load conductances (siemens).
    double base_conductance() const noexcept { return base_conductance_; }

private:
    double r_source_;
    std::vector<Branch> branches_;
    double base_conductance_ = 0.0;
    bool homogeneous_ = true;
};

struct LoadState {
    std::vector<bool> flex_on;

    static LoadState all(std::size_t n, bool on) { return {std::vector<bool>(n, on)}; }
    std::size_t size() const noexcept { return flex_on.size(); }
    std::size_t count_on() const noexcept;
};

struct CircuitSolution {
    double v_load = 0.0;  ///< volts across the parallel bank
    double i_total = 0.0; ///< amperes through r_source
    std::vector<double> branch_currents;
};

/// Closed-form voltage divider. Throws std::invalid_argument when v_source is
/// negative or not finite, or when loads does not match the branch count.
CircuitSolution solve(const CircuitConfig& config, double v_source, const LoadState& loads);

/// v_load with exactly n_on flexible loads connected. Requires identical
/// branches (std::invalid_argument otherwise) and 0 <= n_on <= N.
double v_load_for_count(const CircuitConfig& config, double v_source, std::size_t n_on);

/// Divider for a given total bank conductance; the engine's inner loop.
struct Divider {
    double v_load;
    double i_total;
};
inline Divider divide(double r_source, double v_source, double conductance) noexcept {
    const double denom = 1.0 + r_source * conductance;
    return {v_source / denom, v_source * conductance / denom};
}

} // namespace reflexgrid::circuit
