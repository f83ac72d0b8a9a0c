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

#include "qnuel/analysis.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

using namespace qnuel;

namespace {

constexpr double kPi = std::numbers::pi;
const Action A = Action::fire_at(0), B = Action::fire_at(1), C = Action::fire_at(2), AIR = Action::air();

GameConfig duel(double a, double b, std::size_t rounds) { return GameConfig::from_miss({a, b}, rounds); }

// Opening volley on Charles followed by up to three duel rounds.
GameConfig four_round_truel() { return GameConfig::from_miss({2.0 / 3, 1.0 / 3, 0.0}, 4); }
StrategySpace four_round_space() {
    StrategySpace s;
    s.allowed = {{{C}, {AIR, B}, {AIR, B}, {AIR, B}}, {{C}, {AIR, A}, {AIR, A}, {AIR, A}}, {{B}, {AIR}, {AIR}, {AIR}}};
    return s;
}

bool contains(const std::vector<double> &xs, double x) {
    return std::any_of(xs.begin(), xs.end(), [&](double v) { return std::abs(v - x) < 1e-12; });
}

std::string tmp_path(const std::string &name) { return (std::filesystem::temp_directory_path() / name).string(); }

} // namespace

TEST(StrategySpace, LexicographicOrder) {
    const StrategySpace s = StrategySpace::full(duel(0.5, 0.5, 2));
    const auto plans = s.plans(0);
    ASSERT_EQ(plans.size(), 4u);
    EXPECT_EQ(plans[0], (Plan{AIR, AIR}));
    EXPECT_EQ(plans[1], (Plan{AIR, B}));
    EXPECT_EQ(plans[2], (Plan{B, AIR}));
    EXPECT_EQ(plans[3], (Plan{B, B}));
    EXPECT_EQ(StrategySpace::full(GameConfig::from_miss({0.5, 0.5, 0.5}, 3)).plan_count(2), 27u);
}

TEST(StrategySpace, NormalizeSortsAndRejects) {
    const GameConfig cfg = duel(0.5, 0.5, 1);
    StrategySpace s;
    s.allowed = {{{B, AIR, B}}, {{A}}};
    s.normalize(cfg);
    EXPECT_EQ(s.allowed[0][0], (std::vector<Action>{AIR, B}));
    s.allowed[1][0] = {B};
    EXPECT_THROW(s.normalize(cfg), Error);
    s.allowed[1][0] = {};
    EXPECT_THROW(s.normalize(cfg), Error);
}

TEST(BestResponse, IdentityShotPrefersAir) {
    // a = 1: firing changes nothing, so every plan ties and air wins.
    const GameConfig cfg = duel(1.0, 0.5, 2);
    const StrategyProfile fixed{{{B, B}, {A, A}}};
    const BestResponse br = best_response(cfg, StrategySpace::full(cfg), fixed, 0);
    EXPECT_EQ(br.plan, (Plan{AIR, AIR}));
}

TEST(BestResponse, SecondShotDependsOnMarksmanship) {
    StrategySpace s;
    s.allowed = {{{B}, {AIR, B}}, {{A}, {A}}};
    const StrategyProfile fixed{{{B, B}, {A, A}}};
    for (double a : {0.05, 0.2}) EXPECT_EQ(best_response(duel(a, 0.5, 2), s, fixed, 0).plan, (Plan{B, AIR})) << a;
    for (double a : {2.0 / 3, 0.85, 0.95}) EXPECT_EQ(best_response(duel(a, 0.5, 2), s, fixed, 0).plan, (Plan{B, B})) << a;
}

TEST(BestResponse, PayoffMatchesPlay) {
    const GameConfig cfg = duel(0.3, 0.6, 2);
    const StrategyProfile fixed{{{B, B}, {A, A}}};
    const BestResponse br = best_response(cfg, StrategySpace::full(cfg), fixed, 1);
    StrategyProfile prof = fixed;
    prof.plans[1] = br.plan;
    EXPECT_NEAR(br.payoff, expected_payoffs(play(cfg, prof), cfg)[1], 1e-15);
    EXPECT_THROW((void)best_response(cfg, StrategySpace::full(cfg), fixed, 2), Error);
}

TEST(FindEquilibria, FourRoundTruelHasUniqueEquilibrium) {
    const GameConfig cfg = four_round_truel();
    const EquilibriumReport rep = find_equilibria(cfg, four_round_space());
    EXPECT_EQ(rep.profiles_checked, 64u);
    ASSERT_EQ(rep.equilibria.size(), 1u);
    const Equilibrium &e = rep.equilibria.front();
    EXPECT_EQ(e.profile.plans[0], (Plan{C, B, B, AIR}));
    EXPECT_EQ(e.profile.plans[1], (Plan{C, A, AIR, AIR}));
    EXPECT_NEAR(e.payoffs[0], 0.554226, 5e-7);
    EXPECT_TRUE(verify_equilibrium(cfg, four_round_space(), e.profile).stable);
}

TEST(FindEquilibria, FourRoundAbstentionGain) {
    const GameConfig cfg = four_round_truel();
    const double fire = expected_payoffs(play(cfg, {{{C, B, B, B}, {C, A, A, A}, {B, AIR, AIR, AIR}}}), cfg)[0];
    const double air = expected_payoffs(play(cfg, {{{C, B, B, AIR}, {C, A, A, A}, {B, AIR, AIR, AIR}}}), cfg)[0];
    EXPECT_NEAR(fire, 0.448145, 5e-7);
    EXPECT_NEAR(air, 0.761379, 5e-7);
}

TEST(FindEquilibria, UselessGunsMakeEverythingAnEquilibrium) {
    const GameConfig cfg = duel(1.0, 1.0, 2);
    const EquilibriumReport rep = find_equilibria(cfg, StrategySpace::full(cfg));
    EXPECT_EQ(rep.profiles_checked, 16u);
    EXPECT_EQ(rep.equilibria.size(), 16u);
}

TEST(FindEquilibria, ThirdRoundAfterAbstainingOpening) {
    // Rounds 1-2 fixed to the abstaining opening; every round-3 action allowed.
    const GameConfig cfg = GameConfig::from_miss({2.0 / 3, 1.0 / 3, 0.0}, 3);
    StrategySpace s;
    s.allowed = {{{AIR}, {B}, {AIR, B, C}}, {{C}, {A}, {AIR, A, C}}, {{B}, {A}, {AIR, A, B}}};
    const StrategyProfile quiet{{{AIR, B, AIR}, {C, A, AIR}, {B, A, AIR}}};
    const Payoffs q = expected_payoffs(play(cfg, quiet), cfg);
    EXPECT_NEAR(q[0], 52.0 / 162, 1e-12);
    EXPECT_NEAR(q[1], 67.0 / 162, 1e-12);
    EXPECT_NEAR(q[2], 43.0 / 162, 1e-12);
    // Quiet continuation is not stable: Alice gains by firing at Bob once more.
    const DeviationCheck d = verify_equilibrium(cfg, s, quiet);
    EXPECT_FALSE(d.stable);
    EXPECT_EQ(d.deviator, 0u);
    EXPECT_EQ(d.deviation, (Plan{AIR, B, B}));
    const EquilibriumReport rep = find_equilibria(cfg, s);
    EXPECT_EQ(rep.profiles_checked, 27u);
    ASSERT_EQ(rep.equilibria.size(), 1u);
    EXPECT_EQ(rep.equilibria[0].profile.plans[0], (Plan{AIR, B, B}));
    EXPECT_EQ(rep.equilibria[0].profile.plans[1], (Plan{C, A, AIR}));
    EXPECT_EQ(rep.equilibria[0].profile.plans[2], (Plan{B, A, AIR}));
}

TEST(FindEquilibria, MatchesBruteForce) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const std::size_t n = u(rng) < 0.5 ? 2 : 3, rounds = u(rng) < 0.5 ? 1 : 2;
        if (n == 3 && rounds == 2) continue; // 9^3 profiles x replays: covered elsewhere
        std::vector<double> miss;
        for (std::size_t p = 0; p < n; ++p) miss.push_back(u(rng));
        GameConfig cfg = GameConfig::from_miss(miss, rounds);
        for (auto &ph : cfg.phases) ph = PhaseParams(6 * u(rng) - 3, 6 * u(rng) - 3);
        const StrategySpace space = StrategySpace::full(cfg);
        const EquilibriumReport rep = find_equilibria(cfg, space, kTieEps, kMaxProfiles, 1);
        // independent enumeration
        std::vector<std::vector<Plan>> plans;
        for (std::size_t p = 0; p < n; ++p) plans.push_back(space.plans(p));
        std::set<std::vector<Plan>> want;
        std::vector<std::size_t> idx(n, 0);
        while (true) {
            StrategyProfile prof;
            for (std::size_t p = 0; p < n; ++p) prof.plans.push_back(plans[p][idx[p]]);
            if (verify_equilibrium(cfg, space, prof).stable) want.insert(prof.plans);
            std::size_t p = n;
            while (p-- > 0) {
                if (++idx[p] < plans[p].size()) break;
                idx[p] = 0;
            }
            if (p == static_cast<std::size_t>(-1)) break;
        }
        std::set<std::vector<Plan>> got;
        for (const auto &e : rep.equilibria) got.insert(e.profile.plans);
        EXPECT_EQ(got, want);
    }
}

TEST(FindEquilibria, SizeCap) {
    const GameConfig cfg = GameConfig::from_miss({0.5, 0.5, 0.5}, 3);
    try {
        (void)find_equilibria(cfg, StrategySpace::full(cfg), kTieEps, 1000);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::size);
        EXPECT_NE(std::string(e.what()).find("best_response"), std::string::npos);
    }
}

TEST(PhaseLandscape, SymmetricAndConserving) {
    const GameConfig cfg = duel(2.0 / 3, 0.5, 2);
    const StrategyProfile prof{{{B, B}, {A, A}}};
    const SweepGrid g = phase_landscape(cfg, prof, phase_axis("alpha1", 37), phase_axis("alpha2", 37));
    for (std::size_t i = 0; i < 37; ++i) {
        for (std::size_t j = 0; j < 37; ++j) {
            const std::size_t c = g.cell({i, j}), m = g.cell({36 - i, 36 - j});
            EXPECT_NEAR(g.value(c, "alice"), g.value(m, "alice"), 1e-12);
            EXPECT_NEAR(g.value(c, "alice") + g.value(c, "bob"), 1.0, 1e-12);
        }
    }
}

TEST(PhaseLandscape, BetaIsIrrelevant) {
    GameConfig cfg = duel(2.0 / 3, 0.5, 2);
    const StrategyProfile prof{{{B, B}, {A, A}}};
    const SweepGrid base = phase_landscape(cfg, prof, phase_axis("x", 19), phase_axis("y", 19));
    cfg.phases = {PhaseParams(0, 1.1), PhaseParams(0, -2.3)};
    const SweepGrid shifted = phase_landscape(cfg, prof, phase_axis("x", 19), phase_axis("y", 19));
    for (std::size_t c = 0; c < base.cells(); ++c) EXPECT_NEAR(base.value(c, 0), shifted.value(c, 0), 1e-12);
}

TEST(PhaseLandscape, DuelsOnly) {
    const GameConfig cfg = GameConfig::from_miss({0.5, 0.5, 0.5}, 1);
    try {
        (void)phase_landscape(cfg, {{{B}, {A}, {A}}}, phase_axis("x", 5), phase_axis("y", 5));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::unsupported_config);
    }
}

TEST(MaximinPhases, StableUnderRefinement) {
    const GameConfig cfg = duel(2.0 / 3, 0.5, 2);
    const StrategyProfile prof{{{B, B}, {A, A}}};
    const MaximinResult coarse = maximin_phases(cfg, prof, phase_axis("alpha", 37));
    const MaximinResult fine = maximin_phases(cfg, prof, phase_axis("alpha", 73));
    for (const auto *r : {&coarse, &fine}) {
        EXPECT_EQ(r->alice_alphas.size(), 4u);
        EXPECT_EQ(r->bob_alphas.size(), 4u);
        for (double x : {-kPi, -kPi / 3, kPi / 3, kPi}) {
            EXPECT_TRUE(contains(r->alice_alphas, x)) << x;
            EXPECT_TRUE(contains(r->bob_alphas, x)) << x;
        }
        EXPECT_NEAR(r->alpha1, kPi / 3, 1e-12);
        EXPECT_NEAR(r->alpha2, kPi / 3, 1e-12);
    }
    // the maximin point moves by less than one coarse cell
    EXPECT_LT(std::abs(coarse.alpha1 - fine.alpha1), 2 * kPi / 36);
    EXPECT_LT(std::abs(coarse.alpha2 - fine.alpha2), 2 * kPi / 36);
    EXPECT_NEAR(fine.alice_guarantee, 0.34604951, 1e-8);
    EXPECT_NEAR(fine.bob_guarantee, 0.23575017, 1e-8);
    EXPECT_NEAR(fine.payoffs[0], 0.496605548, 1e-9);
    EXPECT_FALSE(fine.balanced);
}

TEST(MaximinPhases, PerfectShot) {
    const MaximinResult r = maximin_phases(duel(0.0, 0.5, 1), {{{B}, {A}}}, phase_axis("alpha", 9));
    EXPECT_NEAR(r.alice_guarantee, 1.0, 1e-15);
    EXPECT_NEAR(r.bob_guarantee, 0.0, 1e-15);
    EXPECT_EQ(r.alice_alphas.size(), 9u);
    EXPECT_EQ(r.alpha1, 0.0);
}

TEST(RepeatedDuelCurve, ValuesAndEnvelope) {
    const auto curve = repeated_duel_curve(2.0 / 3, 0.5, {}, {}, 4, phase_axis("alpha", 19));
    ASSERT_EQ(curve.size(), 4u);
    EXPECT_NEAR(curve[0].payoff, 0.5, 1e-12);
    EXPECT_NEAR(curve[0].min, 0.5, 1e-12);
    EXPECT_NEAR(curve[0].max, 0.5, 1e-12);
    EXPECT_NEAR(curve[1].payoff, 0.695844542, 1e-9);
    EXPECT_NEAR(curve[2].payoff, 0.602839774, 1e-9);
    EXPECT_NEAR(curve[3].payoff, 0.185252541, 1e-9);
    for (const auto &pt : curve) {
        EXPECT_LE(pt.min, pt.payoff);
        EXPECT_GE(pt.max, pt.payoff);
    }
    const auto shifted = repeated_duel_curve(2.0 / 3, 0.5, PhaseParams(0, 0.4), PhaseParams(0, -1.9), 4,
                                             phase_axis("alpha", 19));
    for (std::size_t m = 0; m < 4; ++m) EXPECT_NEAR(shifted[m].payoff, curve[m].payoff, 1e-12);
    EXPECT_THROW((void)repeated_duel_curve(0.5, 0.5, {}, {}, 0), Error);
}

TEST(SecondShotAdvantage, ClosedFormEdges) {
    const Axis a = Axis::linspace("a", 0.0, 1.0, 11), b = Axis::linspace("b", 0.0, 1.0, 11);
    const SweepGrid g = second_shot_advantage_surface(a, b);
    for (std::size_t j = 0; j < 11; ++j) {
        const double bv = b.values[j];
        EXPECT_NEAR(g.value(g.cell({0, j}), "delta"), 1 - bv / 2, 1e-12);
        EXPECT_NEAR(g.value(g.cell({10, j}), "delta"), 0.0, 1e-12);
    }
    for (std::size_t i = 0; i < 11; ++i) {
        const double av = a.values[i];
        EXPECT_NEAR(g.value(g.cell({i, 10}), "delta"), 0.5 * (1 - av) * (1 - 4 * av), 1e-12);
    }
    for (std::size_t c = 0; c < g.cells(); ++c) {
        EXPECT_NEAR(g.value(c, "delta"), g.value(c, "air_second") - g.value(c, "fire_both"), 1e-15);
    }
}

TEST(Scenario, Names) {
    for (Scenario s : {Scenario::one_shot, Scenario::two_shot_a_gt_b, Scenario::two_shot_b_gt_a}) {
        EXPECT_EQ(parse_scenario(scenario_name(s)), s);
    }
    try {
        (void)parse_scenario("three-shot");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::config);
    }
    EXPECT_THROW((void)Regime::decoherent(1.5), Error);
}

TEST(Scenario, OptionLabels) {
    auto labels = [](Scenario s) {
        std::vector<std::string> out;
        for (const auto &o : scenario_model(s, 0.5, 0.5).options) out.push_back(o.label);
        return out;
    };
    EXPECT_EQ(labels(Scenario::one_shot), (std::vector<std::string>{"air", "C"}));
    EXPECT_EQ(labels(Scenario::two_shot_a_gt_b), (std::vector<std::string>{"air>B", "air>C", "C>B", "C>C"}));
    EXPECT_EQ(labels(Scenario::two_shot_b_gt_a), (std::vector<std::string>{"air/A", "air/C", "C/A", "C/C"}));
}

TEST(Scenario, OneShotClassicalCrossesAtTwoThirds) {
    // Alice's gain from firing at Charles is (1-a)(3b-2)/4 in the one-shot game.
    const Axis a = Axis::half_open("a", 0.0, 1.0, 20), b = Axis::half_open("b", 0.0, 1.0, 30);
    const SweepGrid g = strategy_region_map(Scenario::one_shot, Regime::classical(), a, b);
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const auto idx = g.coords(c);
        const double av = a.values[idx[0]], bv = b.values[idx[1]];
        EXPECT_NEAR(g.value(c, "alice:C") - g.value(c, "alice:air"), 0.25 * (1 - av) * (3 * bv - 2), 1e-12);
        if (std::abs(bv - 2.0 / 3) > 1e-9) {
            EXPECT_EQ(g.label(c), bv > 2.0 / 3 ? "C" : "air");
        }
    }
}

TEST(Scenario, OneShotQuantumBoundary) {
    const Axis a = miss_axis("a", 41), b = miss_axis("b", 41);
    const SweepGrid g = strategy_region_map(Scenario::one_shot, Regime::quantum(), a, b);
    const auto bd = extract_boundary(g);
    ASSERT_EQ(bd.size(), 41u);
    for (const auto &pt : bd) {
        EXPECT_EQ(pt.from, "air");
        EXPECT_EQ(pt.to, "C");
        EXPECT_NEAR(pt.at, (1 - std::sqrt(pt.row)) / 2, 1.0 / 41);
    }
}

TEST(Scenario, DecoherentBoundariesNest) {
    const Axis a = miss_axis("a", 21), b = miss_axis("b", 81);
    std::vector<std::vector<BoundaryPoint>> rows;
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        rows.push_back(extract_boundary(strategy_region_map(Scenario::one_shot, Regime::decoherent(p), a, b)));
    }
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
        ASSERT_EQ(rows[k].size(), rows[k + 1].size());
        for (std::size_t i = 0; i < rows[k].size(); ++i) EXPECT_LE(rows[k][i].at, rows[k + 1][i].at + 1e-12);
    }
}

TEST(Scenario, FullDecoherenceIsClassical) {
    const Axis a = miss_axis("a", 21), b = miss_axis("b", 21);
    for (Scenario s : {Scenario::one_shot, Scenario::two_shot_a_gt_b, Scenario::two_shot_b_gt_a}) {
        const SweepGrid d = strategy_region_map(s, Regime::decoherent(1.0), a, b);
        const SweepGrid c = strategy_region_map(s, Regime::classical(), a, b);
        for (std::size_t k = 0; k < d.cells(); ++k) {
            EXPECT_EQ(d.label(k), c.label(k)) << scenario_name(s) << " " << k;
            for (std::size_t col = 0; col < d.columns().size(); ++col) EXPECT_NEAR(d.value(k, col), c.value(k, col), 1e-12);
        }
    }
}

TEST(Scenario, NoDecoherenceIsQuantum) {
    const Axis a = miss_axis("a", 11), b = miss_axis("b", 11);
    for (Scenario s : {Scenario::one_shot, Scenario::two_shot_a_gt_b, Scenario::two_shot_b_gt_a}) {
        const SweepGrid d = strategy_region_map(s, Regime::decoherent(0.0), a, b);
        const SweepGrid q = strategy_region_map(s, Regime::quantum(), a, b);
        for (std::size_t k = 0; k < d.cells(); ++k) {
            for (std::size_t col = 0; col < d.columns().size(); ++col) EXPECT_NEAR(d.value(k, col), q.value(k, col), 1e-12);
        }
    }
}

TEST(Scenario, ClassicalTwoShotBobFavoured) {
    // Alice abstains in round 1 exactly when b < 1/2.
    const Axis a = miss_axis("a", 21), b = miss_axis("b", 21);
    const SweepGrid g = strategy_region_map(Scenario::two_shot_b_gt_a, Regime::classical(), a, b);
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const double bv = b.values[g.coords(c)[1]];
        if (std::abs(bv - 0.5) < 1e-9) continue;
        EXPECT_EQ(g.label(c).rfind("air/", 0) == 0, bv < 0.5) << g.label(c) << " b=" << bv;
    }
}

TEST(Scenario, LabelsInvariantUnderUtilityScale) {
    const Axis a = miss_axis("a", 15), b = miss_axis("b", 15);
    RegionOptions scaled;
    scaled.utility_scale = 0.37;
    for (Scenario s : {Scenario::one_shot, Scenario::two_shot_a_gt_b, Scenario::two_shot_b_gt_a}) {
        for (const Regime &r : {Regime::quantum(), Regime::classical(), Regime::decoherent(0.5)}) {
            const SweepGrid x = strategy_region_map(s, r, a, b), y = strategy_region_map(s, r, a, b, scaled);
            for (std::size_t c = 0; c < x.cells(); ++c) {
                EXPECT_EQ(x.label(c), y.label(c)) << scenario_name(s) << " " << r.name();
                EXPECT_NEAR(y.value(c, 0), 0.37 * x.value(c, 0), 1e-12);
            }
        }
    }
    scaled.utility_scale = 0.0;
    EXPECT_THROW((void)strategy_region_map(Scenario::one_shot, Regime::quantum(), a, b, scaled), Error);
}

TEST(Scenario, TwoShotMapsStableUnderRefinement) {
    const Axis a41 = miss_axis("a", 41), b41 = miss_axis("b", 41), a82 = miss_axis("a", 82), b82 = miss_axis("b", 82);
    const SweepGrid coarse = strategy_region_map(Scenario::two_shot_a_gt_b, Regime::quantum(), a41, b41);
    const SweepGrid fine = strategy_region_map(Scenario::two_shot_a_gt_b, Regime::quantum(), a82, b82);
    EXPECT_EQ(refinement_violations(coarse, fine), 0u);
}

TEST(Scenario, BobFavouredMapHasThinSliver) {
    // Near a = 0.585, b = 0.11 Alice's air/A vs C/A margin touches zero twice;
    // air/A wins on a sliver one fine cell wide that the coarse map cannot see.
    const Axis a41 = miss_axis("a", 41), b41 = miss_axis("b", 41), a82 = miss_axis("a", 82), b82 = miss_axis("b", 82);
    const SweepGrid coarse = strategy_region_map(Scenario::two_shot_b_gt_a, Regime::quantum(), a41, b41);
    const SweepGrid fine = strategy_region_map(Scenario::two_shot_b_gt_a, Regime::quantum(), a82, b82);
    EXPECT_EQ(refinement_violations(coarse, fine), 2u);
    const std::size_t c = fine.cell({48, 9});
    EXPECT_EQ(fine.label(c), "air/A");
    EXPECT_EQ(fine.label(fine.cell({48, 8})), "C/A");
    EXPECT_EQ(fine.label(fine.cell({48, 10})), "C/A");
    EXPECT_LT(std::abs(fine.value(c, "alice:air/A") - fine.value(c, "alice:C/A")), 1e-4);
}

TEST(Scenario, McMapAgreesWithExact) {
    const Axis a = miss_axis("a", 5), b = miss_axis("b", 5);
    const SweepGrid exact = strategy_region_map(Scenario::one_shot, Regime::decoherent(0.5), a, b);
    const SweepGrid mc = mc_region_map(Scenario::one_shot, 0.5, a, b, 20000, 7);
    int outside = 0;
    for (std::size_t c = 0; c < mc.cells(); ++c) {
        for (const std::string l : {"air", "C"}) {
            if (std::abs(mc.value(c, "alice:" + l) - exact.value(c, "alice:" + l)) > 3 * mc.value(c, "se:" + l) + 1e-12) {
                ++outside;
            }
        }
    }
    EXPECT_LE(outside, 2);
    const SweepGrid again = mc_region_map(Scenario::one_shot, 0.5, a, b, 20000, 7);
    EXPECT_EQ(grid_to_csv(mc), grid_to_csv(again));
}

TEST(Grid, EmitCsvShape) {
    SweepGrid g({Axis::linspace("x", 0, 1, 2), Axis::linspace("y", 0, 1, 2)}, {"v"}, true);
    for (std::size_t c = 0; c < 4; ++c) {
        g.value(c, 0) = 0.1 * static_cast<double>(c);
        g.label(c) = c % 2 ? "C" : "air";
    }
    const std::string path = tmp_path("qnuel_grid_shape.csv");
    emit_grid(g, GridFormat::csv, path);
    std::ifstream is(path);
    std::vector<std::string> lines;
    for (std::string l; std::getline(is, l);) lines.push_back(l);
    ASSERT_EQ(lines.size(), 5u);
    EXPECT_EQ(lines[0], "x,y,v,label");
    EXPECT_EQ(lines[2], "0,1,0.10000000000000001,C");
    std::filesystem::remove(path);
}

TEST(Grid, CsvRoundTripIsBitExact) {
    const SweepGrid g = second_shot_advantage_surface(Axis::linspace("a", 0, 1, 7), Axis::linspace("b", 0, 1, 9));
    const std::string path = tmp_path("qnuel_grid_roundtrip.csv");
    emit_grid(g, GridFormat::csv, path);
    const CsvTable t = read_csv(path);
    ASSERT_EQ(t.rows.size(), g.cells());
    EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b", "fire_both", "air_second", "delta"}));
    for (std::size_t c = 0; c < g.cells(); ++c) {
        for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(t.number(c, 2 + k), g.value(c, k));
    }
    std::filesystem::remove(path);
}

TEST(Grid, JsonSchema) {
    SweepGrid g({Axis::linspace("x", 0, 1, 2), Axis::linspace("y", 0, 1, 3)}, {"v", "w"}, true);
    for (std::size_t c = 0; c < g.cells(); ++c) {
        g.value(c, 0) = 1.0 / 3;
        g.value(c, 1) = -2.0;
        g.label(c) = "air";
    }
    const nlohmann::json j = grid_to_json(g);
    EXPECT_EQ(j["schema"], kGridSchema);
    EXPECT_EQ(j["axes"].size(), 2u);
    EXPECT_EQ(j["axes"][1]["name"], "y");
    EXPECT_EQ(j["columns"], (std::vector<std::string>{"v", "w"}));
    ASSERT_EQ(j["rows"].size(), 6u);
    EXPECT_EQ(j["rows"][4]["index"], (std::vector<std::size_t>{1, 1}));
    EXPECT_EQ(j["rows"][4]["values"][0].get<double>(), 1.0 / 3);
    EXPECT_EQ(j["rows"][4]["label"], "air");
}

TEST(Grid, WriteFailureIsIoError) {
    SweepGrid g({Axis::linspace("x", 0, 1, 2)}, {"v"});
    try {
        emit_grid(g, GridFormat::csv, "/nonexistent/dir/out.csv");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::io);
    }
}

TEST(Boundary, InterpolatesSyntheticGrid) {
    SweepGrid g({Axis::linspace("a", 0, 1, 2), Axis::linspace("b", 0, 1, 5)}, {"alice:air", "alice:C"}, true);
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const auto idx = g.coords(c);
        const double b = g.axis(1).values[idx[1]], cross = idx[0] == 0 ? 0.3 : 0.6;
        g.value(c, 0) = 0.5;
        g.value(c, 1) = 0.5 + (b - cross);
        g.label(c) = b > cross ? "C" : "air";
    }
    const auto bd = extract_boundary(g);
    ASSERT_EQ(bd.size(), 2u);
    EXPECT_NEAR(bd[0].at, 0.3, 1e-12);
    EXPECT_NEAR(bd[1].at, 0.6, 1e-12);
    EXPECT_EQ(bd[1].from, "air");
    EXPECT_EQ(bd[1].to, "C");
    EXPECT_THROW((void)extract_boundary(SweepGrid({Axis::linspace("a", 0, 1, 2)}, {"v"})), Error);
}

TEST(Boundary, RefinementComparesBoundaryPositions) {
    const Axis c4 = Axis::half_open("a", 0, 1, 4), f8 = Axis::half_open("a", 0, 1, 8);
    SweepGrid coarse({c4, Axis::half_open("b", 0, 1, 4)}, {}, true);
    SweepGrid fine({f8, Axis::half_open("b", 0, 1, 8)}, {}, true);
    // vertical boundary at b = 0.5 on both grids
    auto split = [](SweepGrid &g, double at) {
        for (std::size_t c = 0; c < g.cells(); ++c) g.label(c) = g.axis(1).values[g.coords(c)[1]] < at ? "air" : "C";
    };
    split(coarse, 0.5);
    split(fine, 0.5);
    EXPECT_EQ(refinement_violations(coarse, fine), 0u);
    // a shift of one fine cell stays within one coarse cell
    split(fine, 0.625);
    EXPECT_EQ(refinement_violations(coarse, fine), 0u);
    // a larger shift does not: one miss each way on 4 shared rows
    split(fine, 0.75);
    EXPECT_EQ(refinement_violations(coarse, fine), 8u);
    // an island on a shared row and column: one far change point on the row, two on the column
    split(fine, 0.5);
    fine.label(fine.cell({4, 0})) = "C";
    EXPECT_EQ(refinement_violations(coarse, fine), 3u);
    // an island on an unshared line is invisible
    split(fine, 0.5);
    fine.label(fine.cell({5, 1})) = "C";
    EXPECT_EQ(refinement_violations(coarse, fine), 0u);
    EXPECT_THROW((void)refinement_violations(coarse, coarse), Error);
}
