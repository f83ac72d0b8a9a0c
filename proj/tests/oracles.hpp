// Copyright 2026 The qnuel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Reference implementations used only by the tests. They share no code with
// the library's evolution, payoff or search paths.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using C = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline bool bit(std::size_t idx, std::size_t n, std::size_t player) { return (idx >> (n - 1 - player)) & 1U; }

/// Dense firing unitary written straight from the two-qubit block:
/// |11> -> e^{-ia} c |11> + i e^{ib} s |10>,  |10> -> e^{ia} c |10> + i e^{-ib} s |11>
/// on (shooter, target), identity whenever the shooter is dead.
inline Mat firing(std::size_t n, std::size_t shooter, std::size_t target, double theta, double alpha, double beta) {
    const std::size_t d = std::size_t{1} << n;
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    const C i(0, 1);
    Mat u = Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    const std::size_t tbit = std::size_t{1} << (n - 1 - target);
    for (std::size_t col = 0; col < d; ++col) {
        const auto ec = static_cast<Eigen::Index>(col);
        if (!bit(col, n, shooter)) {
            u(ec, ec) = 1;
            continue;
        }
        const auto flipped = static_cast<Eigen::Index>(col ^ tbit);
        if (bit(col, n, target)) {
            u(ec, ec) = std::exp(-i * alpha) * c;
            u(flipped, ec) = i * std::exp(i * beta) * s;
        } else {
            u(ec, ec) = std::exp(i * alpha) * c;
            u(flipped, ec) = i * std::exp(-i * beta) * s;
        }
    }
    return u;
}

struct Move {
    std::size_t shooter;
    int target; // -1 = air
};

struct Player {
    double theta, alpha, beta;
};

/// Dense evolution of |1..1> through the move list.
inline Vec evolve(std::size_t n, const std::vector<Player> &players, const std::vector<Move> &moves) {
    const std::size_t d = std::size_t{1} << n;
    Vec v = Vec::Zero(static_cast<Eigen::Index>(d));
    v(static_cast<Eigen::Index>(d - 1)) = 1;
    for (const auto &m : moves) {
        if (m.target < 0) continue;
        const auto &p = players[m.shooter];
        v = firing(n, m.shooter, static_cast<std::size_t>(m.target), p.theta, p.alpha, p.beta) * v;
    }
    return v;
}

/// Payoffs with u_k = 1/k.
inline std::vector<double> harmonic_payoffs(std::size_t n, const Vec &v) {
    std::vector<double> out(n, 0.0);
    for (std::size_t idx = 1; idx < (std::size_t{1} << n); ++idx) {
        std::size_t alive = 0;
        for (std::size_t p = 0; p < n; ++p) alive += bit(idx, n, p);
        const double w = std::norm(v(static_cast<Eigen::Index>(idx))) / static_cast<double>(alive);
        for (std::size_t p = 0; p < n; ++p) {
            if (bit(idx, n, p)) out[p] += w;
        }
    }
    return out;
}

/// Classical sequential truel by explicit recursion over shot outcomes.
/// choose(shooter, alive mask) returns a target or -1.
using Chooser = std::function<int(std::size_t shooter, unsigned alive)>;

inline void classical_tree(std::size_t n, const std::vector<double> &miss, const Chooser &choose, std::size_t moves_left,
                           std::size_t next, unsigned alive, double prob, std::vector<double> &final_dist) {
    if (moves_left == 0) {
        final_dist[alive] += prob;
        return;
    }
    const std::size_t following = (next + 1) % n;
    const unsigned smask = 1U << (n - 1 - next);
    if (!(alive & smask)) return classical_tree(n, miss, choose, moves_left - 1, following, alive, prob, final_dist);
    const int t = choose(next, alive);
    if (t < 0 || !(alive & (1U << (n - 1 - static_cast<std::size_t>(t))))) {
        return classical_tree(n, miss, choose, moves_left - 1, following, alive, prob, final_dist);
    }
    classical_tree(n, miss, choose, moves_left - 1, following, alive, prob * miss[next], final_dist);
    classical_tree(n, miss, choose, moves_left - 1, following, alive & ~(1U << (n - 1 - static_cast<std::size_t>(t))),
                   prob * (1 - miss[next]), final_dist);
}

} // namespace oracle
