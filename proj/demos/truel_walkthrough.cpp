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

// Plays the three-player game with miss probabilities 2/3, 1/3 and 0 two
// ways: Alice abstaining first, and Alice and Bob both opening on Charles.

#include "qnuel/analysis.hpp"

#include <cstdio>

using namespace qnuel;

int main() {
    const Action A = Action::fire_at(0), B = Action::fire_at(1), C = Action::fire_at(2), air = Action::air();

    const GameConfig two = GameConfig::from_miss({2.0 / 3, 1.0 / 3, 0.0}, 2);
    const StrategyProfile air_first{{{air, B}, {C, A}, {B, A}}};
    const StateVector psi = play(two, air_first);
    std::printf("Alice abstains first. Final state:\n");
    for (std::uint32_t i = 0; i < psi.dim(); ++i) {
        if (std::norm(psi[i]) > 1e-15) {
            std::printf("  |%s>  % .6f %+.6fi\n", BasisOutcome{3, i, 0.0}.label().c_str(), psi[i].real(), psi[i].imag());
        }
    }
    const Payoffs p = expected_payoffs(psi, two);
    std::printf("  payoffs x 162: %.3f %.3f %.3f\n\n", 162 * p[0], 162 * p[1], 162 * p[2]);

    // Charles is shot in the first round for certain; three duel rounds follow.
    const GameConfig four = GameConfig::from_miss({2.0 / 3, 1.0 / 3, 0.0}, 4);
    const StrategyProfile all_fire{{{C, B, B, B}, {C, A, A, A}, {B, air, air, air}}};
    const StrategyProfile last_air{{{C, B, B, air}, {C, A, A, A}, {B, air, air, air}}};
    std::printf("Both open on Charles, then duel for three rounds:\n");
    std::printf("  Alice keeps firing:        %.6f\n", expected_payoffs(play(four, all_fire), four)[0]);
    std::printf("  Alice abstains last shot:  %.6f\n", expected_payoffs(play(four, last_air), four)[0]);

    StrategySpace space;
    space.allowed = {{{C}, {air, B}, {air, B}, {air, B}}, {{C}, {air, A}, {air, A}, {air, A}}, {{B}, {air}, {air}, {air}}};
    for (const auto &e : find_equilibria(four, space).equilibria) {
        std::printf("  equilibrium  A: %s  B: %s  Alice %.6f\n", plan_label(e.profile.plans[0]).c_str(),
                    plan_label(e.profile.plans[1]).c_str(), e.payoffs[0]);
    }
    return 0;
}
