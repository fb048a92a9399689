#pragma once

// Modified nodal analysis of the feeder, solved by Gaussian elimination with
// partial pivoting. Nodes: 0 = ground, 1 = source terminal, 2 = bus. The
// source is an ideal voltage source between node 1 and ground, so the
// unknowns are V1, V2 and the source current.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace testsupport {

struct OracleSolution {
    double v_load;
    double i_total;
    std::vector<double> branch_currents;
};

inline std::array<double, 3> gauss3(std::array<std::array<double, 4>, 3> m) {
    for (std::size_t col = 0; col < 3; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < 3; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        }
        if (m[pivot][col] == 0.0) throw std::runtime_error("singular nodal matrix");
        std::swap(m[col], m[pivot]);
        for (std::size_t r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = m[r][col] / m[col][col];
            for (std::size_t c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
        }
    }
    return {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
}

// Each branch is its own pair of resistors to ground; the flexible one only
// when connected.
inline OracleSolution nodal_solve(double r_source, const std::vector<std::pair<double, double>>& branches,
                                  const std::vector<bool>& flex_on, double v_source) {
    const double gs = 1.0 / r_source;
    double g_bus = 0.0;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        g_bus += 1.0 / branches[i].first;
        if (flex_on[i]) g_bus += 1.0 / branches[i].second;
    }
    // Rows: KCL at node 1, KCL at node 2, source constraint V1 = Vs.
    // KCL at node 1: (V1 - V2) gs - I_src = 0, with I_src flowing out of the
    // source into node 1.
    std::array<std::array<double, 4>, 3> m{{
        {gs, -gs, -1.0, 0.0},
        {-gs, gs + g_bus, 0.0, 0.0},
        {1.0, 0.0, 0.0, v_source},
    }};
    const auto x = gauss3(m);
    OracleSolution out{x[1], x[2], {}};
    for (std::size_t i = 0; i < branches.size(); ++i) {
        double g = 1.0 / branches[i].first;
        if (flex_on[i]) g += 1.0 / branches[i].second;
        out.branch_currents.push_back(x[1] * g);
    }
    return out;
}

inline double rel_err(double got, double want) {
    const double scale = std::max(std::abs(want), 1e-300);
    return std::abs(got - want) / scale;
}

} // namespace testsupport
