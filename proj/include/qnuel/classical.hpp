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

// Classical sequential duels and truels. Nothing here touches the quantum
// kernel, so these results serve as independent oracles for the engine.

#include "qnuel/engine.hpp"
#include "qnuel/error.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace qnuel::classical {

struct DuelParams {
    double a = 0.0; ///< Alice's miss probability; she shoots first.
    double b = 0.0; ///< Bob's miss probability.
    std::optional<std::size_t> bullets; ///< per player; empty means unlimited
    double tie_utility = 0.5; ///< payoff to each when ammunition runs out with both alive
};

/// Alice's expected payoff; Bob receives 1 - this.
[[nodiscard]] inline double duel_payoff(const DuelParams &d) {
    check_probability(d.a);
    check_probability(d.b);
    if (!d.bullets) {
        if (d.a * d.b >= 1.0) throw Error(Errc::invalid_probability, "unlimited duel needs ab < 1");
        return (1.0 - d.a) / (1.0 - d.a * d.b);
    }
    double v = d.tie_utility;
    for (std::size_t m = 1; m <= *d.bullets; ++m) v = 1.0 - d.a + d.a * d.b * v;
    return v;
}

enum class TruelStrategy { air, target_b, target_c };

struct Survival {
    double alice = 0.0;
    double bob = 0.0;
    double charles = 0.0;

    /// Sole-survival probabilities as utility payoffs (u1 = 1, everyone else 0).
    [[nodiscard]] Payoffs as_payoffs() const { return Payoffs{{alice, bob, charles}}; }
};

namespace detail {
// First shooter (miss x) beats second shooter (miss y) in an unlimited duel.
[[nodiscard]] inline double first_wins(double x, double y) { return (1.0 - x) / (1.0 - x * y); }
} // namespace detail

/// Unlimited-ammunition truel, Alice (worst shot) first, Bob and Charles
/// aiming at each other while both live. `s` is Alice's choice while both
/// opponents live; afterwards everyone fires at the last opponent.
[[nodiscard]] inline Survival truel_survival(double a, double b, double c, TruelStrategy s) {
    for (double x : {a, b, c}) {
        check_probability(x);
        if (x >= 1.0) throw Error(Errc::invalid_probability, "miss probabilities must be < 1");
    }
    if (!(a > b && b > c)) throw Error(Errc::ordering, "expected a > b > c (poorest shot fires first)");
    using detail::first_wins;
    const double ab = first_wins(a, b), ac = first_wins(a, c);
    Survival out;
    switch (s) {
    case TruelStrategy::air: {
        const double k = 1.0 - b * c;
        out.alice = ((1 - b) * ab + b * (1 - c) * ac) / k;
        out.bob = (1 - b) * (1 - ab) / k;
        out.charles = b * (1 - c) * (1 - ac) / k;
        break;
    }
    case TruelStrategy::target_c: {
        const double k = 1.0 - a * b * c;
        const double ba = first_wins(b, a);
        out.alice = ((1 - a) * (1 - ba) + a * (1 - b) * ab + a * b * (1 - c) * ac) / k;
        out.bob = ((1 - a) * ba + a * (1 - b) * (1 - ab)) / k;
        out.charles = a * b * (1 - c) * (1 - ac) / k;
        break;
    }
    case TruelStrategy::target_b: {
        const double k = 1.0 - a * b * c;
        const double ca = first_wins(c, a);
        out.alice = ((1 - a) * (1 - ca) + a * (1 - b) * ab + a * b * (1 - c) * ac) / k;
        out.bob = a * (1 - b) * (1 - ab) / k;
        out.charles = ((1 - a) * ca + a * b * (1 - c) * (1 - ac)) / k;
        break;
    }
    }
    return out;
}

enum class Info { full, hidden };

inline constexpr std::size_t kMaxTreeWork = std::size_t{1} << 28;

namespace detail {

[[nodiscard]] inline std::optional<BasisOutcome> view(Info info, std::size_t n, std::uint32_t alive) {
    if (info == Info::hidden) return std::nullopt;
    return BasisOutcome{n, alive, 1.0};
}

} // namespace detail

/// Exact classical expectation. The outcome tree is folded into a distribution
/// over alive sets after each move (policies see only round and alive set), so
/// the cost is rounds * n * 2^n. With Info::full each policy sees who is alive;
/// with Info::hidden it sees nothing and must act on its committed plan.
/// Shots at dead players and shots by dead players do nothing.
[[nodiscard]] inline Payoffs game_tree_expectation(const GameConfig &cfg, const PolicySet &pol, Info info,
                                                   std::size_t max_work = kMaxTreeWork) {
    cfg.validate();
    if (pol.size() != cfg.n_players) throw Error(Errc::profile, "need one policy per player");
    const std::size_t n = cfg.n_players, dim = dimension(n);
    if (cfg.rounds * n * dim > max_work) throw Error(Errc::size, "classical game tree exceeds the work cap");
    std::vector<double> dist(dim, 0.0), next(dim);
    dist[dim - 1] = 1.0;
    for (std::size_t r = 0; r < cfg.rounds; ++r) {
        for (std::size_t shooter : cfg.firing_order) {
            std::fill(next.begin(), next.end(), 0.0);
            const std::uint32_t smask = player_mask(n, shooter);
            for (std::uint32_t alive = 0; alive < dim; ++alive) {
                const double w = dist[alive];
                if (w == 0.0) continue;
                if ((alive & smask) == 0) {
                    next[alive] += w;
                    continue;
                }
                const Action act = pol[shooter](r, detail::view(info, n, alive));
                check_action(cfg, shooter, act);
                const std::uint32_t tmask = act.is_air() ? 0 : player_mask(n, act.target);
                if (act.is_air() || (alive & tmask) == 0) {
                    next[alive] += w;
                    continue;
                }
                const double miss = cfg.marksmanship[shooter].miss();
                next[alive] += w * miss;
                next[alive & ~tmask] += w * (1.0 - miss);
            }
            dist.swap(next);
        }
    }
    return payoffs_from(cfg, dim, [&](std::uint32_t i) { return dist[i]; });
}

[[nodiscard]] inline Payoffs game_tree_expectation(const GameConfig &cfg, const Weighted<PolicySet> &mixture,
                                                   Info info, std::size_t max_work = kMaxTreeWork) {
    check_weights(mixture);
    Payoffs total{std::vector<double>(cfg.n_players, 0.0)};
    for (const auto &[w, pol] : mixture) {
        const Payoffs part = game_tree_expectation(cfg, pol, info, max_work);
        for (std::size_t j = 0; j < cfg.n_players; ++j) total.values[j] += w * part[j];
    }
    return total;
}

/// Sampling counterpart of game_tree_expectation; same seed/chunk contract as
/// estimate_payoffs_mc.
[[nodiscard]] inline McPayoffs mc_classical(const GameConfig &cfg, const Weighted<PolicySet> &mixture, Info info,
                                            std::size_t trials, std::uint64_t seed, unsigned threads = 0) {
    cfg.validate();
    check_weights(mixture);
    if (trials < 1) throw Error(Errc::config, "trials must be >= 1");
    const std::size_t n = cfg.n_players;
    const std::size_t chunks = (trials + kMcChunk - 1) / kMcChunk;
    std::vector<std::vector<double>> sums(chunks, std::vector<double>(2 * n, 0.0));
    parallel_for(
        chunks,
        [&](std::size_t c) {
            Rng rng = make_rng(seed, c);
            auto &acc = sums[c];
            const std::size_t begin = c * kMcChunk, end = std::min(trials, begin + kMcChunk);
            for (std::size_t t = begin; t < end; ++t) {
                std::size_t pick = 0;
                if (mixture.size() > 1) {
                    double u = qnuel::detail::uniform01(rng);
                    while (pick + 1 < mixture.size() && u >= mixture[pick].first) u -= mixture[pick++].first;
                }
                const PolicySet &pol = mixture[pick].second;
                auto alive = static_cast<std::uint32_t>(dimension(n) - 1);
                for (std::size_t r = 0; r < cfg.rounds; ++r) {
                    for (std::size_t shooter : cfg.firing_order) {
                        if ((alive & player_mask(n, shooter)) == 0) continue;
                        const Action act = pol[shooter](r, detail::view(info, n, alive));
                        check_action(cfg, shooter, act);
                        if (act.is_air()) continue;
                        const std::uint32_t tmask = player_mask(n, act.target);
                        if ((alive & tmask) == 0) continue;
                        if (qnuel::detail::uniform01(rng) >= cfg.marksmanship[shooter].miss()) alive &= ~tmask;
                    }
                }
                const BasisOutcome o{n, alive, 1.0};
                const double u = cfg.utilities.surviving_among(o.alive_count());
                for (std::size_t j = 0; j < n; ++j) {
                    if (o.alive(j)) {
                        acc[j] += u;
                        acc[n + j] += u * u;
                    }
                }
            }
        },
        threads);
    McPayoffs out;
    out.trials = trials;
    const auto N = static_cast<double>(trials);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0, sq = 0.0;
        for (const auto &acc : sums) {
            s += acc[j];
            sq += acc[n + j];
        }
        const double mean = s / N;
        const double var = trials > 1 ? std::max(0.0, (sq - N * mean * mean) / (N - 1.0)) : 0.0;
        out.mean.values.push_back(mean);
        out.std_error.push_back(std::sqrt(var / N));
    }
    return out;
}

[[nodiscard]] inline McPayoffs mc_classical(const GameConfig &cfg, const PolicySet &pol, Info info,
                                            std::size_t trials, std::uint64_t seed, unsigned threads = 0) {
    return mc_classical(cfg, Weighted<PolicySet>{{1.0, pol}}, info, trials, seed, threads);
}

} // namespace qnuel::classical
