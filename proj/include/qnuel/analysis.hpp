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

#include "qnuel/classical.hpp"
#include "qnuel/engine.hpp"
#include "qnuel/error.hpp"
#include "qnuel/grid.hpp"
#include "qnuel/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace qnuel {

inline constexpr double kTieEps = 1e-9;
inline constexpr std::size_t kMaxProfiles = std::size_t{1} << 20;

// ---------------------------------------------------------------------------
// Pure-strategy search.

/// Allowed actions per player and round. Each slot is kept sorted in
/// tie-break order (air first, then ascending target).
struct StrategySpace {
    std::vector<std::vector<std::vector<Action>>> allowed; // [player][round]

    static StrategySpace full(const GameConfig &cfg) {
        StrategySpace s;
        for (std::size_t p = 0; p < cfg.n_players; ++p) {
            std::vector<Action> slot{Action::air()};
            for (std::size_t t = 0; t < cfg.n_players; ++t) {
                if (t != p) slot.push_back(Action::fire_at(t));
            }
            s.allowed.emplace_back(cfg.rounds, slot);
        }
        return s;
    }

    /// Sorts and deduplicates every slot, then checks it against the game.
    void normalize(const GameConfig &cfg) {
        if (allowed.size() != cfg.n_players) throw Error(Errc::config, "strategy space needs every player");
        for (std::size_t p = 0; p < allowed.size(); ++p) {
            if (allowed[p].size() != cfg.rounds) throw Error(Errc::config, "strategy space needs every round");
            for (auto &slot : allowed[p]) {
                if (slot.empty()) throw Error(Errc::config, "empty strategy slot");
                std::sort(slot.begin(), slot.end());
                slot.erase(std::unique(slot.begin(), slot.end()), slot.end());
                for (const auto &a : slot) check_action(cfg, p, a);
            }
        }
    }

    [[nodiscard]] std::size_t plan_count(std::size_t player) const {
        std::size_t k = 1;
        for (const auto &slot : allowed[player]) k *= slot.size();
        return k;
    }

    /// Plans enumerate lexicographically (round 0 most significant).
    [[nodiscard]] Plan plan(std::size_t player, std::size_t index) const {
        const auto &slots = allowed[player];
        Plan out(slots.size());
        for (std::size_t r = slots.size(); r-- > 0;) {
            out[r] = slots[r][index % slots[r].size()];
            index /= slots[r].size();
        }
        return out;
    }

    [[nodiscard]] std::vector<Plan> plans(std::size_t player) const {
        std::vector<Plan> out;
        for (std::size_t i = 0; i < plan_count(player); ++i) out.push_back(plan(player, i));
        return out;
    }
};

struct BestResponse {
    Plan plan;
    double payoff = 0.0;
};

/// Best plan for `player` against the other plans in `fixed`. A later plan
/// replaces the incumbent only if it is better by more than eps.
[[nodiscard]] inline BestResponse best_response(const GameConfig &cfg, StrategySpace space,
                                                const StrategyProfile &fixed, std::size_t player,
                                                double eps = kTieEps) {
    space.normalize(cfg);
    check_profile(cfg, fixed);
    if (player >= cfg.n_players) throw Error(Errc::invalid_player, "no such player");
    StrategyProfile prof = fixed;
    BestResponse best;
    bool first = true;
    for (const Plan &pl : space.plans(player)) {
        prof.plans[player] = pl;
        const double v = expected_payoffs(play(cfg, prof), cfg)[player];
        if (first || v > best.payoff + eps) {
            best = {pl, v};
            first = false;
        }
    }
    return best;
}

struct Equilibrium {
    StrategyProfile profile;
    Payoffs payoffs;
};

struct EquilibriumReport {
    double epsilon = kTieEps;
    std::size_t profiles_checked = 0;
    std::vector<Equilibrium> equilibria;
};

/// Exhaustive pure-strategy Nash search. Payoffs of every profile are cached,
/// so the space is limited to max_profiles profiles (default 2^20).
[[nodiscard]] inline EquilibriumReport find_equilibria(const GameConfig &cfg, StrategySpace space,
                                                       double eps = kTieEps, std::size_t max_profiles = kMaxProfiles,
                                                       unsigned threads = 0) {
    cfg.validate();
    space.normalize(cfg);
    const std::size_t n = cfg.n_players;
    std::vector<std::size_t> radix(n);
    std::size_t total = 1;
    for (std::size_t p = 0; p < n; ++p) {
        radix[p] = space.plan_count(p);
        if (total > max_profiles / radix[p]) {
            throw Error(Errc::size, "strategy space exceeds " + std::to_string(max_profiles) +
                                        " profiles; restrict it or search coordinate-wise with best_response");
        }
        total *= radix[p];
    }
    std::vector<std::vector<Plan>> plans(n);
    for (std::size_t p = 0; p < n; ++p) plans[p] = space.plans(p);
    // player 0 is the most significant digit
    std::vector<std::size_t> stride(n, 1);
    for (std::size_t p = n - 1; p-- > 0;) stride[p] = stride[p + 1] * radix[p + 1];
    auto profile_at = [&](std::size_t idx) {
        StrategyProfile prof;
        for (std::size_t p = 0; p < n; ++p) prof.plans.push_back(plans[p][(idx / stride[p]) % radix[p]]);
        return prof;
    };

    const OperatorCache ops(cfg);
    std::vector<double> pay(total * n);
    parallel_for(
        total,
        [&](std::size_t idx) {
            const StrategyProfile prof = profile_at(idx);
            StateBuilder st(n, static_cast<std::uint32_t>(dimension(n) - 1));
            for (std::size_t r = 0; r < cfg.rounds; ++r) {
                for (std::size_t p : cfg.firing_order) ops.get(r, p, prof.action(p, r)).apply_inplace(st.data());
            }
            const auto amps = st.data();
            const Payoffs v = payoffs_from(cfg, dimension(n), [&](std::uint32_t i) { return std::norm(amps[i]); });
            std::copy(v.values.begin(), v.values.end(), pay.begin() + static_cast<std::ptrdiff_t>(idx * n));
        },
        threads);

    EquilibriumReport rep;
    rep.epsilon = eps;
    rep.profiles_checked = total;
    for (std::size_t idx = 0; idx < total; ++idx) {
        bool stable = true;
        for (std::size_t p = 0; p < n && stable; ++p) {
            const std::size_t digit = (idx / stride[p]) % radix[p];
            const std::size_t base = idx - digit * stride[p];
            for (std::size_t k = 0; k < radix[p]; ++k) {
                if (pay[(base + k * stride[p]) * n + p] > pay[idx * n + p] + eps) {
                    stable = false;
                    break;
                }
            }
        }
        if (stable) {
            Payoffs v{std::vector<double>(pay.begin() + static_cast<std::ptrdiff_t>(idx * n),
                                          pay.begin() + static_cast<std::ptrdiff_t>((idx + 1) * n))};
            rep.equilibria.push_back({profile_at(idx), std::move(v)});
        }
    }
    return rep;
}

struct DeviationCheck {
    bool stable = true;
    double max_gain = 0.0; ///< largest unilateral improvement found
    std::size_t deviator = 0;
    Plan deviation;
};

/// Replays every unilateral deviation from scratch (no shared cache with the search).
[[nodiscard]] inline DeviationCheck verify_equilibrium(const GameConfig &cfg, StrategySpace space,
                                                       const StrategyProfile &prof, double eps = kTieEps) {
    space.normalize(cfg);
    check_profile(cfg, prof);
    const Payoffs base = expected_payoffs(play(cfg, prof), cfg);
    DeviationCheck out;
    for (std::size_t p = 0; p < cfg.n_players; ++p) {
        StrategyProfile dev = prof;
        for (const Plan &pl : space.plans(p)) {
            dev.plans[p] = pl;
            const double gain = expected_payoffs(play(cfg, dev), cfg)[p] - base[p];
            if (gain > out.max_gain) {
                out.max_gain = gain;
                out.deviator = p;
                out.deviation = pl;
            }
        }
    }
    out.stable = out.max_gain < eps;
    return out;
}

// ---------------------------------------------------------------------------
// Duel phase analysis.

inline void require_duel(const GameConfig &cfg) {
    if (cfg.n_players != 2) throw Error(Errc::unsupported_config, "phase analysis is defined for duels only");
}

/// Default phase axis: 73 points over [-pi, pi].
[[nodiscard]] inline Axis phase_axis(std::string name, std::size_t n = 73) {
    return Axis::linspace(std::move(name), -std::numbers::pi, std::numbers::pi, n);
}

/// Alice's and Bob's payoffs over (alpha1, alpha2), the players' phases. Betas
/// are taken from cfg.
[[nodiscard]] inline SweepGrid phase_landscape(const GameConfig &cfg, const StrategyProfile &prof, Axis alpha1,
                                               Axis alpha2, unsigned threads = 0) {
    require_duel(cfg);
    cfg.validate();
    check_profile(cfg, prof);
    alpha1.name = alpha1.name.empty() ? "alpha1" : alpha1.name;
    alpha2.name = alpha2.name.empty() ? "alpha2" : alpha2.name;
    SweepGrid g({alpha1, alpha2}, {"alice", "bob"});
    parallel_for(
        g.cells(),
        [&](std::size_t cell) {
            const auto idx = g.coords(cell);
            GameConfig c = cfg;
            c.round_phases.clear();
            c.phases[0] = PhaseParams(g.axis(0).values[idx[0]], cfg.phases[0].beta);
            c.phases[1] = PhaseParams(g.axis(1).values[idx[1]], cfg.phases[1].beta);
            const Payoffs v = expected_payoffs(play(c, prof), c);
            g.value(cell, 0) = v[0];
            g.value(cell, 1) = v[1];
        },
        threads);
    return g;
}

struct MaximinResult {
    double alice_guarantee = 0.0; ///< max over alpha1 of min over alpha2
    double bob_guarantee = 0.0;
    std::vector<double> alice_alphas; ///< every alpha1 attaining the guarantee
    std::vector<double> bob_alphas;
    double alpha1 = 0.0; ///< representative choices
    double alpha2 = 0.0;
    Payoffs payoffs; ///< at (alpha1, alpha2)
    bool balanced = false;
};

namespace detail {

// Smallest |alpha|, positive preferred.
[[nodiscard]] inline double representative(const std::vector<double> &alphas) {
    double best = alphas.front();
    for (double x : alphas) {
        const double ax = std::abs(x), ab = std::abs(best);
        if (ax < ab - kTieEps || (std::abs(ax - ab) <= kTieEps && x > best)) best = x;
    }
    return best;
}

} // namespace detail

/// Maximin phases of both duellists on the landscape grid.
[[nodiscard]] inline MaximinResult maximin_phases(const GameConfig &cfg, const StrategyProfile &prof, Axis grid,
                                                  double eps = kTieEps, unsigned threads = 0) {
    const SweepGrid g = phase_landscape(cfg, prof, grid, grid, threads);
    const std::size_t n1 = g.axis(0).size(), n2 = g.axis(1).size();
    std::vector<double> ga(n1, 1e300), gb(n2, 1e300);
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            const std::size_t c = g.cell({i, j});
            ga[i] = std::min(ga[i], g.value(c, 0));
            gb[j] = std::min(gb[j], g.value(c, 1));
        }
    }
    MaximinResult out;
    out.alice_guarantee = *std::max_element(ga.begin(), ga.end());
    out.bob_guarantee = *std::max_element(gb.begin(), gb.end());
    std::size_t ia = 0, ib = 0;
    for (std::size_t i = 0; i < n1; ++i) {
        if (ga[i] >= out.alice_guarantee - eps) out.alice_alphas.push_back(g.axis(0).values[i]);
    }
    for (std::size_t j = 0; j < n2; ++j) {
        if (gb[j] >= out.bob_guarantee - eps) out.bob_alphas.push_back(g.axis(1).values[j]);
    }
    out.alpha1 = detail::representative(out.alice_alphas);
    out.alpha2 = detail::representative(out.bob_alphas);
    for (std::size_t i = 0; i < n1; ++i) {
        if (g.axis(0).values[i] == out.alpha1) ia = i;
    }
    for (std::size_t j = 0; j < n2; ++j) {
        if (g.axis(1).values[j] == out.alpha2) ib = j;
    }
    const std::size_t c = g.cell({ia, ib});
    out.payoffs = Payoffs{{g.value(c, 0), g.value(c, 1)}};
    out.balanced = std::abs(out.payoffs[0] - out.payoffs[1]) <= eps;
    return out;
}

struct CurvePoint {
    std::size_t rounds = 0;
    double payoff = 0.0; ///< Alice's payoff at the given phases
    double min = 0.0;    ///< envelope over the (alpha1, alpha2) grid
    double max = 0.0;
};

/// Alice's payoff after m rounds of mutual fire, m = 1..max_rounds.
[[nodiscard]] inline std::vector<CurvePoint> repeated_duel_curve(double a, double b, PhaseParams alice,
                                                                 PhaseParams bob, std::size_t max_rounds,
                                                                 const Axis &alphas = phase_axis("alpha", 37),
                                                                 unsigned threads = 0) {
    if (max_rounds < 1) throw Error(Errc::config, "max_rounds must be >= 1");
    std::vector<CurvePoint> out;
    for (std::size_t m = 1; m <= max_rounds; ++m) {
        GameConfig cfg = GameConfig::from_miss({a, b}, m);
        cfg.phases = {alice, bob};
        const StrategyProfile prof{{Plan(m, Action::fire_at(1)), Plan(m, Action::fire_at(0))}};
        CurvePoint pt;
        pt.rounds = m;
        pt.payoff = expected_payoffs(play(cfg, prof), cfg)[0];
        const SweepGrid g = phase_landscape(cfg, prof, alphas, alphas, threads);
        pt.min = pt.max = pt.payoff;
        for (std::size_t c = 0; c < g.cells(); ++c) {
            pt.min = std::min(pt.min, g.value(c, 0));
            pt.max = std::max(pt.max, g.value(c, 0));
        }
        out.push_back(pt);
    }
    return out;
}

/// Two-round duel with all phases zero: Alice's payoff when she fires twice,
/// when she fires then abstains, and delta = abstain - fire.
[[nodiscard]] inline SweepGrid second_shot_advantage_surface(const Axis &a_axis, const Axis &b_axis,
                                                             unsigned threads = 0) {
    SweepGrid g({a_axis, b_axis}, {"fire_both", "air_second", "delta"});
    const StrategyProfile fire{{{Action::fire_at(1), Action::fire_at(1)}, {Action::fire_at(0), Action::fire_at(0)}}};
    const StrategyProfile air{{{Action::fire_at(1), Action::air()}, {Action::fire_at(0), Action::fire_at(0)}}};
    parallel_for(
        g.cells(),
        [&](std::size_t cell) {
            const auto idx = g.coords(cell);
            const GameConfig cfg = GameConfig::from_miss({g.axis(0).values[idx[0]], g.axis(1).values[idx[1]]}, 2);
            const double f = expected_payoffs(play(cfg, fire), cfg)[0];
            const double s = expected_payoffs(play(cfg, air), cfg)[0];
            g.value(cell, 0) = f;
            g.value(cell, 1) = s;
            g.value(cell, 2) = s - f;
        },
        threads);
    return g;
}

// ---------------------------------------------------------------------------
// Truel strategy regions with a perfect third marksman (c = 0).

enum class Scenario { one_shot, two_shot_a_gt_b, two_shot_b_gt_a };

[[nodiscard]] inline std::string scenario_name(Scenario s) {
    switch (s) {
    case Scenario::one_shot: return "one-shot";
    case Scenario::two_shot_a_gt_b: return "two-shot-a>b";
    case Scenario::two_shot_b_gt_a: return "two-shot-b>a";
    }
    return "?";
}

[[nodiscard]] inline Scenario parse_scenario(const std::string &s) {
    for (Scenario v : {Scenario::one_shot, Scenario::two_shot_a_gt_b, Scenario::two_shot_b_gt_a}) {
        if (s == scenario_name(v)) return v;
    }
    throw Error(Errc::config, "unknown scenario '" + s + "' (one-shot, two-shot-a>b, two-shot-b>a)");
}

struct Regime {
    enum class Kind { quantum, classical, classical_hidden, decoherent };
    Kind kind = Kind::quantum;
    double p = 0.0;

    static Regime quantum() { return {}; }
    static Regime classical() { return {Kind::classical, 1.0}; }
    static Regime classical_hidden() { return {Kind::classical_hidden, 1.0}; }
    static Regime decoherent(double p) {
        check_probability(p);
        return {Kind::decoherent, p};
    }

    [[nodiscard]] std::string name() const {
        switch (kind) {
        case Kind::quantum: return "quantum";
        case Kind::classical: return "classical";
        case Kind::classical_hidden: return "classical-hidden";
        case Kind::decoherent: return "decoherent";
        }
        return "?";
    }
};

/// One candidate decision in a scenario, with every player's policy mixture.
struct ScenarioOption {
    std::string label;
    Weighted<StrategyProfile> plans;  ///< committed plans (records ignored)
    Weighted<PolicySet> policies;     ///< the same plans, overridden by the record rules
};

struct ScenarioModel {
    Scenario scenario = Scenario::one_shot;
    GameConfig cfg;
    std::vector<ScenarioOption> options;
    /// true when options form Alice x Bob (2 x 2) choices, Bob's index fastest
    bool bob_decides = false;
};

namespace detail {

using Rule = std::function<std::optional<Action>(std::size_t round, std::uint32_t alive)>;

[[nodiscard]] inline Policy ruled_policy(Plan plan, Rule rule) {
    return [plan = std::move(plan), rule = std::move(rule)](std::size_t round,
                                                            const std::optional<BasisOutcome> &rec) -> Action {
        if (rec && rule) {
            if (auto a = rule(round, rec->bits)) return *a;
        }
        return plan.at(round);
    };
}

[[nodiscard]] inline bool alive_in(std::uint32_t bits, std::size_t player) {
    return (bits & player_mask(3, player)) != 0;
}

// First alive player in `pref`, else air.
[[nodiscard]] inline Action first_alive(std::uint32_t bits, std::initializer_list<std::size_t> pref) {
    for (std::size_t t : pref) {
        if (alive_in(bits, t)) return Action::fire_at(t);
    }
    return Action::air();
}

// The sole alive opponent, air if none, or no opinion if several remain.
[[nodiscard]] inline std::optional<Action> survivor(std::uint32_t bits, std::size_t self) {
    std::optional<Action> only;
    int count = 0;
    for (std::size_t t = 0; t < 3; ++t) {
        if (t != self && alive_in(bits, t)) {
            only = Action::fire_at(t);
            ++count;
        }
    }
    if (count == 0) return Action::air();
    if (count == 1) return only;
    return std::nullopt;
}

struct PlayerSpec {
    Weighted<Plan> plans;
    Rule rule;
};

[[nodiscard]] inline ScenarioOption make_option(std::string label, const std::vector<PlayerSpec> &players) {
    ScenarioOption opt{std::move(label), {}, {}};
    // cartesian product of the players' plan mixtures
    std::vector<std::size_t> idx(players.size(), 0);
    while (true) {
        double w = 1.0;
        StrategyProfile prof;
        PolicySet pol;
        for (std::size_t p = 0; p < players.size(); ++p) {
            const auto &[wp, plan] = players[p].plans[idx[p]];
            w *= wp;
            prof.plans.push_back(plan);
            pol.push_back(ruled_policy(plan, players[p].rule));
        }
        opt.plans.emplace_back(w, std::move(prof));
        opt.policies.emplace_back(w, std::move(pol));
        std::size_t p = players.size();
        while (p-- > 0) {
            if (++idx[p] < players[p].plans.size()) break;
            idx[p] = 0;
        }
        if (p == static_cast<std::size_t>(-1)) break;
    }
    return opt;
}

} // namespace detail

inline constexpr std::size_t kA = 0, kB = 1, kC = 2;

/// The scenario's game at miss probabilities (a, b) with c = 0, and the
/// candidate decisions. Fixed players follow the stated targeting; when a
/// public record exists they switch to the most dangerous living opponent.
[[nodiscard]] inline ScenarioModel scenario_model(Scenario s, double a, double b, double utility_scale = 1.0) {
    using detail::first_alive;
    using detail::PlayerSpec;
    using detail::survivor;
    const Action air = Action::air(), fa = Action::fire_at(kA), fb = Action::fire_at(kB), fc = Action::fire_at(kC);
    ScenarioModel m;
    m.scenario = s;
    m.cfg = GameConfig::from_miss({a, b, 0.0}, s == Scenario::one_shot ? 1 : 2);
    if (!(utility_scale > 0.0)) throw Error(Errc::config, "utility scale must be positive");
    for (double &u : m.cfg.utilities.u) u *= utility_scale;

    auto alice_free = [](Plan plan) {
        return PlayerSpec{{{1.0, std::move(plan)}}, [](std::size_t r, std::uint32_t bits) -> std::optional<Action> {
                              if (r == 0) return std::nullopt;
                              return survivor(bits, kA);
                          }};
    };
    switch (s) {
    case Scenario::one_shot: {
        const PlayerSpec bob{{{1.0, {fc}}},
                             [](std::size_t, std::uint32_t bits) -> std::optional<Action> {
                                 return first_alive(bits, {kC, kA});
                             }};
        // indifferent between A and B while both live: fair coin
        const PlayerSpec charles{{{0.5, {fa}}, {0.5, {fb}}},
                                 [](std::size_t, std::uint32_t bits) { return survivor(bits, kC); }};
        for (const Action &x : {air, fc}) m.options.push_back(detail::make_option(x.label(), {alice_free({x}), bob, charles}));
        break;
    }
    case Scenario::two_shot_a_gt_b: {
        const PlayerSpec bob{{{1.0, {fc, fa}}},
                             [](std::size_t, std::uint32_t bits) -> std::optional<Action> {
                                 return first_alive(bits, {kC, kA});
                             }};
        const PlayerSpec charles{{{1.0, {fb, fa}}},
                                 [](std::size_t, std::uint32_t bits) -> std::optional<Action> {
                                     return first_alive(bits, {kB, kA});
                                 }};
        for (const Action &x : {air, fc}) {
            for (const Action &y : {fb, fc}) {
                const Plan plan{x, y};
                m.options.push_back(detail::make_option(plan_label(plan), {alice_free(plan), bob, charles}));
            }
        }
        break;
    }
    case Scenario::two_shot_b_gt_a: {
        m.bob_decides = true;
        const PlayerSpec charles{{{1.0, {fa, fb}}},
                                 [](std::size_t r, std::uint32_t bits) -> std::optional<Action> {
                                     return r == 0 ? first_alive(bits, {kA, kB}) : first_alive(bits, {kB, kA});
                                 }};
        for (const Action &x : {air, fc}) {
            for (const Action &y : {fa, fc}) {
                const PlayerSpec bob{{{1.0, {fc, y}}},
                                     [](std::size_t r, std::uint32_t bits) -> std::optional<Action> {
                                         if (r == 0) return first_alive(bits, {kC, kA});
                                         return survivor(bits, kB);
                                     }};
                m.options.push_back(
                    detail::make_option(x.label() + "/" + y.label(), {alice_free({x, fb}), bob, charles}));
            }
        }
        break;
    }
    }
    return m;
}

[[nodiscard]] inline Payoffs evaluate_option(const ScenarioModel &m, const ScenarioOption &opt, const Regime &r) {
    switch (r.kind) {
    case Regime::Kind::quantum: return expected_payoffs(play_mixture(m.cfg, opt.plans), m.cfg);
    case Regime::Kind::classical: return classical::game_tree_expectation(m.cfg, opt.policies, classical::Info::full);
    case Regime::Kind::classical_hidden:
        return classical::game_tree_expectation(m.cfg, opt.policies, classical::Info::hidden);
    case Regime::Kind::decoherent: return exact_decoherent_payoffs(m.cfg, opt.policies, r.p);
    }
    throw Error(Errc::config, "unknown regime");
}

/// Index of the chosen option given every option's payoffs.
///
/// Alice alone: the best payoff; options within eps of the best go to the
/// first in tie-break order. Alice and Bob: a pure equilibrium of the 2 x 2
/// game (the one best for Alice if several), else Alice leads and Bob
/// best-responds.
[[nodiscard]] inline std::size_t choose_option(const ScenarioModel &m, const std::vector<Payoffs> &pay,
                                               double eps = kTieEps) {
    if (!m.bob_decides) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < pay.size(); ++k) {
            if (pay[k][kA] > pay[best][kA] + eps) best = k;
        }
        return best;
    }
    const std::size_t ny = 2, nx = pay.size() / ny;
    auto at = [&](std::size_t x, std::size_t y) -> const Payoffs & { return pay[x * ny + y]; };
    std::optional<std::size_t> pick;
    for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t y = 0; y < ny; ++y) {
            bool ne = true;
            for (std::size_t x2 = 0; x2 < nx; ++x2) ne = ne && at(x2, y)[kA] <= at(x, y)[kA] + eps;
            for (std::size_t y2 = 0; y2 < ny; ++y2) ne = ne && at(x, y2)[kB] <= at(x, y)[kB] + eps;
            if (ne && (!pick || at(x, y)[kA] > pay[*pick][kA] + eps)) pick = x * ny + y;
        }
    }
    if (pick) return *pick;
    std::size_t best = 0;
    bool first = true;
    for (std::size_t x = 0; x < nx; ++x) {
        std::size_t y = 0;
        for (std::size_t y2 = 1; y2 < ny; ++y2) {
            if (at(x, y2)[kB] > at(x, y)[kB] + eps) y = y2;
        }
        if (first || at(x, y)[kA] > pay[best][kA] + eps) {
            best = x * ny + y;
            first = false;
        }
    }
    return best;
}

struct RegionOptions {
    double eps = kTieEps;
    double utility_scale = 1.0;
    unsigned threads = 0;
};

/// Default region axes: 201 points over [0, 1) for a and b.
[[nodiscard]] inline Axis miss_axis(std::string name, std::size_t n = 201) {
    return Axis::half_open(std::move(name), 0.0, 1.0, n);
}

/// Labels each (a, b) cell with the chosen decision. Value columns hold
/// "alice:<label>" (and "bob:<label>" when Bob decides too) for every option.
[[nodiscard]] inline SweepGrid strategy_region_map(Scenario s, const Regime &regime, const Axis &a_axis,
                                                   const Axis &b_axis, const RegionOptions &opts = {}) {
    const ScenarioModel proto = scenario_model(s, 0.5, 0.5, opts.utility_scale);
    std::vector<std::string> cols;
    for (const auto &o : proto.options) cols.push_back("alice:" + o.label);
    if (proto.bob_decides) {
        for (const auto &o : proto.options) cols.push_back("bob:" + o.label);
    }
    SweepGrid g({a_axis, b_axis}, cols, true);
    const std::size_t k = proto.options.size();
    parallel_for(
        g.cells(),
        [&](std::size_t cell) {
            const auto idx = g.coords(cell);
            const ScenarioModel m =
                scenario_model(s, g.axis(0).values[idx[0]], g.axis(1).values[idx[1]], opts.utility_scale);
            std::vector<Payoffs> pay;
            for (const auto &o : m.options) pay.push_back(evaluate_option(m, o, regime));
            for (std::size_t i = 0; i < k; ++i) {
                g.value(cell, i) = pay[i][kA];
                if (m.bob_decides) g.value(cell, k + i) = pay[i][kB];
            }
            g.label(cell) = m.options[choose_option(m, pay, opts.eps)].label;
        },
        opts.threads);
    return g;
}

/// Monte Carlo counterpart of the decoherent region map. Every option in a
/// cell is sampled with the same seed (common random numbers), so the
/// estimated differences are much less noisy than the payoffs themselves.
/// Adds "se:<label>" columns with the standard error of Alice's payoff.
[[nodiscard]] inline SweepGrid mc_region_map(Scenario s, double p, const Axis &a_axis, const Axis &b_axis,
                                             std::size_t trials, std::uint64_t seed, const RegionOptions &opts = {}) {
    check_probability(p);
    const ScenarioModel proto = scenario_model(s, 0.5, 0.5, opts.utility_scale);
    std::vector<std::string> cols;
    for (const auto &o : proto.options) cols.push_back("alice:" + o.label);
    for (const auto &o : proto.options) cols.push_back("se:" + o.label);
    if (proto.bob_decides) {
        for (const auto &o : proto.options) cols.push_back("bob:" + o.label);
    }
    SweepGrid g({a_axis, b_axis}, cols, true);
    const std::size_t k = proto.options.size();
    parallel_for(
        g.cells(),
        [&](std::size_t cell) {
            const auto idx = g.coords(cell);
            const ScenarioModel m =
                scenario_model(s, g.axis(0).values[idx[0]], g.axis(1).values[idx[1]], opts.utility_scale);
            const std::uint64_t cell_seed = seed + 0x9E3779B97F4A7C15ULL * (cell + 1);
            std::vector<Payoffs> pay;
            for (std::size_t i = 0; i < k; ++i) {
                const McPayoffs r = estimate_payoffs_mc(m.cfg, m.options[i].policies, p, trials, cell_seed, 1);
                g.value(cell, i) = r.mean[kA];
                g.value(cell, k + i) = r.std_error[kA];
                if (m.bob_decides) g.value(cell, 2 * k + i) = r.mean[kB];
                pay.push_back(r.mean);
            }
            g.label(cell) = m.options[choose_option(m, pay, opts.eps)].label;
        },
        opts.threads);
    return g;
}

struct BoundaryPoint {
    double row = 0.0; ///< first-axis coordinate
    double at = 0.0;  ///< interpolated second-axis coordinate of the label change
    std::string from; ///< label below the crossing
    std::string to;   ///< label above
};

/// Marches along the second axis of each row and reports every label change.
/// When both labels have "alice:<label>" columns the crossing is placed where
/// the linear interpolation of their difference vanishes, otherwise midway.
[[nodiscard]] inline std::vector<BoundaryPoint> extract_boundary(const SweepGrid &g) {
    if (g.axes().size() != 2 || !g.labelled()) throw Error(Errc::config, "boundary extraction needs a labelled 2-D grid");
    std::vector<BoundaryPoint> out;
    const Axis &rows = g.axis(0), &cols = g.axis(1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j + 1 < cols.size(); ++j) {
            const std::size_t c0 = g.cell({i, j}), c1 = g.cell({i, j + 1});
            const std::string &l0 = g.label(c0), &l1 = g.label(c1);
            if (l0 == l1) continue;
            double t = 0.5;
            const std::string k0 = "alice:" + l0, k1 = "alice:" + l1;
            if (g.has_column(k0) && g.has_column(k1)) {
                const double d0 = g.value(c0, k1) - g.value(c0, k0);
                const double d1 = g.value(c1, k1) - g.value(c1, k0);
                if (d0 != d1) t = std::clamp(d0 / (d0 - d1), 0.0, 1.0);
            }
            out.push_back({rows.values[i], cols.values[j] + t * (cols.values[j + 1] - cols.values[j]), l0, l1});
        }
    }
    return out;
}

namespace detail {

// Midpoints of label changes along one grid line. dir 1 walks the second
// axis at first-axis index `line`; dir 0 walks the first axis.
[[nodiscard]] inline std::vector<double> label_changes(const SweepGrid &g, std::size_t dir, std::size_t line) {
    const Axis &ax = g.axis(dir);
    std::vector<double> out;
    auto at = [&](std::size_t k) { return dir == 1 ? g.cell({line, k}) : g.cell({k, line}); };
    for (std::size_t k = 0; k + 1 < ax.size(); ++k) {
        if (g.label(at(k)) != g.label(at(k + 1))) out.push_back(0.5 * (ax.values[k] + ax.values[k + 1]));
    }
    return out;
}

} // namespace detail

/// Boundary points that move by more than one coarse cell when the resolution
/// doubles. `fine` has 2N points per axis over the same range, so fine line 2k
/// coincides with coarse line k; both directions are walked on every shared
/// line. A point on one grid with no point of the other within one coarse step
/// counts as a violation; fine points beyond the coarse grid's last sample are
/// outside the compared domain.
[[nodiscard]] inline std::size_t refinement_violations(const SweepGrid &coarse, const SweepGrid &fine) {
    if (coarse.axes().size() != 2 || fine.axes().size() != 2 || !coarse.labelled() || !fine.labelled()) {
        throw Error(Errc::config, "expected labelled 2-D grids");
    }
    for (std::size_t d = 0; d < 2; ++d) {
        if (fine.axis(d).size() != 2 * coarse.axis(d).size()) {
            throw Error(Errc::config, "fine grid must double the coarse resolution");
        }
    }
    std::size_t bad = 0;
    for (std::size_t dir = 0; dir < 2; ++dir) {
        const Axis &walk = coarse.axis(dir);
        const double h = walk.step(), hi = walk.values.back();
        const std::size_t lines = coarse.axis(1 - dir).size();
        for (std::size_t k = 0; k < lines; ++k) {
            const auto c = detail::label_changes(coarse, dir, k);
            auto f = detail::label_changes(fine, dir, 2 * k);
            std::erase_if(f, [&](double x) { return x > hi; });
            auto near = [h](const std::vector<double> &xs, double x) {
                return std::any_of(xs.begin(), xs.end(), [&](double y) { return std::abs(x - y) <= h * (1 + 1e-9); });
            };
            for (double x : c) bad += near(f, x) ? 0 : 1;
            for (double x : f) bad += near(c, x) ? 0 : 1;
        }
    }
    return bad;
}

} // namespace qnuel
