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

#include "qnuel/error.hpp"
#include "qnuel/operators.hpp"
#include "qnuel/parallel.hpp"
#include "qnuel/qstate.hpp"

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace qnuel {

/// Fire at a 0-based target, or fire into the air (identity).
struct Action {
    enum class Kind : std::uint8_t { air, fire };

    Kind kind = Kind::air;
    std::size_t target = 0;

    static constexpr Action air() { return {}; }
    static constexpr Action fire_at(std::size_t t) { return {Kind::fire, t}; }

    [[nodiscard]] constexpr bool is_air() const { return kind == Kind::air; }

    // Air sorts first, then ascending target: the tie-break order used by searches.
    constexpr auto operator<=>(const Action &) const = default;

    [[nodiscard]] std::string label() const {
        if (is_air()) return "air";
        if (target < 26) return std::string(1, static_cast<char>('A' + target));
        return "P" + std::to_string(target + 1);
    }
};

using Plan = std::vector<Action>;

[[nodiscard]] inline std::string plan_label(const Plan &plan) {
    std::string s;
    for (std::size_t r = 0; r < plan.size(); ++r) {
        if (r) s += '>';
        s += plan[r].label();
    }
    return s;
}

/// Pre-committed actions, plans[player][round].
struct StrategyProfile {
    std::vector<Plan> plans;

    [[nodiscard]] std::size_t n_players() const { return plans.size(); }
    [[nodiscard]] std::size_t rounds() const { return plans.empty() ? 0 : plans.front().size(); }
    [[nodiscard]] const Action &action(std::size_t player, std::size_t round) const { return plans[player][round]; }
};

/// u[k-1] is the payoff for surviving among k players.
struct UtilitySchedule {
    std::vector<double> u;

    static UtilitySchedule harmonic(std::size_t n_players) {
        UtilitySchedule s;
        for (std::size_t k = 1; k <= n_players; ++k) s.u.push_back(1.0 / static_cast<double>(k));
        return s;
    }

    [[nodiscard]] double surviving_among(std::size_t k) const { return k == 0 ? 0.0 : u[k - 1]; }

    void validate(std::size_t n_players) const {
        if (u.size() != n_players) throw Error(Errc::config, "utility schedule needs one entry per survivor count");
        if (!(u.front() > 0.0)) throw Error(Errc::config, "utilities must be positive");
        for (std::size_t k = 1; k < u.size(); ++k) {
            if (!(u[k] > 0.0 && u[k] <= u[k - 1])) throw Error(Errc::config, "utilities must satisfy 0 < un <= ... <= u1");
        }
    }
};

struct GameConfig {
    std::size_t n_players = 2;
    std::size_t rounds = 1;
    std::vector<Marksmanship> marksmanship;
    std::vector<PhaseParams> phases;
    std::vector<std::size_t> firing_order;
    UtilitySchedule utilities;
    /// Optional per-round phase override, round_phases[player][round].
    std::vector<std::vector<PhaseParams>> round_phases;

    static GameConfig make(std::vector<Marksmanship> m, std::size_t rounds) {
        GameConfig cfg;
        cfg.n_players = m.size();
        check_player_count(cfg.n_players);
        cfg.rounds = rounds;
        cfg.marksmanship = std::move(m);
        cfg.phases.assign(cfg.n_players, PhaseParams{});
        for (std::size_t k = 0; k < cfg.n_players; ++k) cfg.firing_order.push_back(k);
        cfg.utilities = UtilitySchedule::harmonic(cfg.n_players);
        cfg.validate();
        return cfg;
    }

    /// Players given by miss probability (the a, b, c of the classical game).
    static GameConfig from_miss(const std::vector<double> &miss, std::size_t rounds) {
        std::vector<Marksmanship> m;
        for (double a : miss) m.push_back(Marksmanship::from_miss_probability(a));
        return make(std::move(m), rounds);
    }

    [[nodiscard]] const PhaseParams &phase(std::size_t player, std::size_t round) const {
        return round_phases.empty() ? phases[player] : round_phases[player][round];
    }

    [[nodiscard]] FiringOp op_for(std::size_t player, std::size_t round, const Action &a) const {
        if (a.is_air()) return fire_in_air(n_players);
        return build_firing_op(n_players, player, a.target, marksmanship[player], phase(player, round));
    }

    void validate() const {
        check_player_count(n_players);
        if (rounds < 1) throw Error(Errc::config, "rounds must be >= 1");
        if (marksmanship.size() != n_players || phases.size() != n_players) {
            throw Error(Errc::config, "marksmanship and phases need one entry per player");
        }
        std::vector<bool> seen(n_players, false);
        if (firing_order.size() != n_players) throw Error(Errc::config, "firing order must list every player once");
        for (std::size_t p : firing_order) {
            if (p >= n_players || seen[p]) throw Error(Errc::config, "firing order is not a permutation");
            seen[p] = true;
        }
        utilities.validate(n_players);
        if (!round_phases.empty()) {
            if (round_phases.size() != n_players) throw Error(Errc::config, "round phase override needs every player");
            for (const auto &row : round_phases) {
                if (row.size() != rounds) throw Error(Errc::config, "round phase override needs every round");
            }
        }
    }
};

inline void check_action(const GameConfig &cfg, std::size_t player, const Action &a) {
    if (a.is_air()) return;
    if (a.target >= cfg.n_players) throw Error(Errc::profile, "target out of range");
    if (a.target == player) throw Error(Errc::profile, "player " + std::to_string(player) + " targets itself");
}

inline void check_profile(const GameConfig &cfg, const StrategyProfile &prof) {
    if (prof.n_players() != cfg.n_players) throw Error(Errc::profile, "profile has wrong player count");
    for (std::size_t p = 0; p < cfg.n_players; ++p) {
        if (prof.plans[p].size() != cfg.rounds) {
            throw Error(Errc::profile, "player " + std::to_string(p) + " plan length differs from round count");
        }
        for (const auto &a : prof.plans[p]) check_action(cfg, p, a);
    }
}

/// Operators for every (round, shooter, target), built once per config.
class OperatorCache {
  public:
    explicit OperatorCache(const GameConfig &cfg)
        : n_(cfg.n_players), per_round_(!cfg.round_phases.empty()), air_(fire_in_air(cfg.n_players)) {
        const std::size_t tables = per_round_ ? cfg.rounds : 1;
        ops_.reserve(tables * n_ * n_);
        for (std::size_t r = 0; r < tables; ++r) {
            for (std::size_t s = 0; s < n_; ++s) {
                for (std::size_t t = 0; t < n_; ++t) {
                    ops_.push_back(s == t ? air_ : cfg.op_for(s, r, Action::fire_at(t)));
                }
            }
        }
    }

    [[nodiscard]] const FiringOp &get(std::size_t round, std::size_t player, const Action &a) const {
        if (a.is_air()) return air_;
        const std::size_t table = per_round_ ? round : 0;
        return ops_[(table * n_ + player) * n_ + a.target];
    }

  private:
    std::size_t n_;
    bool per_round_;
    FiringOp air_;
    std::vector<FiringOp> ops_;
};

struct Payoffs {
    std::vector<double> values;

    [[nodiscard]] double operator[](std::size_t i) const { return values[i]; }
    [[nodiscard]] std::size_t size() const { return values.size(); }
    [[nodiscard]] double sum() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
};

/// Monte Carlo estimate with per-player standard errors.
struct McPayoffs {
    Payoffs mean;
    std::vector<double> std_error;
    std::size_t trials = 0;
};

/// Expected payoff of player j: sum over outcomes with j alive of P(outcome) * u_{alive count}.
template <class ProbabilityOf>
[[nodiscard]] Payoffs payoffs_from(const GameConfig &cfg, std::size_t dim, ProbabilityOf &&prob) {
    Payoffs out{std::vector<double>(cfg.n_players, 0.0)};
    for (std::uint32_t i = 1; i < dim; ++i) {
        const double w = prob(i) * cfg.utilities.surviving_among(static_cast<std::size_t>(std::popcount(i)));
        for (std::size_t j = 0; j < cfg.n_players; ++j) {
            if (i & player_mask(cfg.n_players, j)) out.values[j] += w;
        }
    }
    return out;
}

[[nodiscard]] inline Payoffs expected_payoffs(const StateVector &s, const GameConfig &cfg) {
    if (s.n_players() != cfg.n_players) throw Error(Errc::shape, "state and config differ in player count");
    return payoffs_from(cfg, s.dim(), [&](std::uint32_t i) { return std::norm(s[i]); });
}

[[nodiscard]] inline Payoffs expected_payoffs(const DensityMatrix &r, const GameConfig &cfg) {
    if (r.n_players() != cfg.n_players) throw Error(Errc::shape, "density and config differ in player count");
    return payoffs_from(cfg, r.dim(), [&](std::uint32_t i) { return r.population(i); });
}

[[nodiscard]] inline Payoffs outcome_payoffs(const BasisOutcome &o, const GameConfig &cfg) {
    Payoffs out{std::vector<double>(cfg.n_players, 0.0)};
    const double u = cfg.utilities.surviving_among(o.alive_count());
    for (std::size_t j = 0; j < cfg.n_players; ++j) {
        if (o.alive(j)) out.values[j] = u;
    }
    return out;
}

/// Applies every round's actions in firing order to |1...1>.
[[nodiscard]] inline StateVector play(const GameConfig &cfg, const StrategyProfile &prof) {
    cfg.validate();
    check_profile(cfg, prof);
    const OperatorCache ops(cfg);
    StateBuilder state(cfg.n_players, static_cast<std::uint32_t>(dimension(cfg.n_players) - 1));
    for (std::size_t r = 0; r < cfg.rounds; ++r) {
        for (std::size_t p : cfg.firing_order) ops.get(r, p, prof.action(p, r)).apply_inplace(state.data());
    }
    return std::move(state).build();
}

template <class T>
using Weighted = std::vector<std::pair<double, T>>;

template <class T>
void check_weights(const Weighted<T> &parts) {
    if (parts.empty()) throw Error(Errc::weight, "empty mixture");
    double total = 0.0;
    for (const auto &[w, _] : parts) {
        if (!(w >= 0.0)) throw Error(Errc::weight, "negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > kIdentityTol) throw Error(Errc::weight, "weights do not sum to 1");
}

/// sum_i w_i |psi_i><psi_i| over pre-committed profiles chosen by a private randomization.
[[nodiscard]] inline DensityMatrix play_mixture(const GameConfig &cfg, const Weighted<StrategyProfile> &profiles) {
    check_weights(profiles);
    Weighted<DensityMatrix> parts;
    parts.reserve(profiles.size());
    for (const auto &[w, prof] : profiles) parts.emplace_back(w, to_density(play(cfg, prof)));
    return mix(parts);
}

/// Density evolution with the partial-decoherence channel after every move.
[[nodiscard]] inline DensityMatrix play_decoherent(const GameConfig &cfg, const StrategyProfile &prof, double p) {
    check_probability(p);
    cfg.validate();
    check_profile(cfg, prof);
    DensityMatrix rho = to_density(all_alive(cfg.n_players));
    for (std::size_t r = 0; r < cfg.rounds; ++r) {
        for (std::size_t player : cfg.firing_order) {
            rho = decohere(apply_to_density(cfg.op_for(player, r, prof.action(player, r)), rho), p);
        }
    }
    return rho;
}

// ---------------------------------------------------------------------------
// Dynamic play under partial decoherence.

/// Decision rule for one player: (round, latest public measurement or none) -> action.
/// Records carry probability 1 (the observed outcome); rules should read only the bits.
using Policy = std::function<Action(std::size_t round, const std::optional<BasisOutcome> &record)>;
using PolicySet = std::vector<Policy>;

[[nodiscard]] inline Policy committed_policy(Plan plan) {
    return [plan = std::move(plan)](std::size_t round, const std::optional<BasisOutcome> &) { return plan.at(round); };
}

[[nodiscard]] inline PolicySet committed_policies(const StrategyProfile &prof) {
    PolicySet out;
    for (const auto &plan : prof.plans) out.push_back(committed_policy(plan));
    return out;
}

using Rng = std::mt19937_64;

/// Independent stream `stream` of master seed `seed`.
[[nodiscard]] inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

namespace detail {

[[nodiscard]] inline double uniform01(Rng &rng) { return std::generate_canonical<double, 53>(rng); }

[[nodiscard]] inline std::uint32_t sample_index(std::span<const Complex> amps, Rng &rng, double &prob) {
    const double u = uniform01(rng);
    double acc = 0.0;
    std::uint32_t last = 0;
    for (std::uint32_t i = 0; i < amps.size(); ++i) {
        const double w = std::norm(amps[i]);
        if (w <= 0.0) continue;
        acc += w;
        last = i;
        if (u < acc) {
            prob = w;
            return i;
        }
    }
    prob = std::norm(amps[last]);
    return last;
}

inline void check_policy_set(const GameConfig &cfg, const PolicySet &pol) {
    if (pol.size() != cfg.n_players) throw Error(Errc::profile, "need one policy per player");
}

/// One trajectory on a reusable buffer.
inline BasisOutcome trajectory(const GameConfig &cfg, const OperatorCache &ops, const PolicySet &pol, double p,
                               Rng &rng, StateBuilder &state) {
    const std::size_t n = cfg.n_players;
    state.collapse_to(static_cast<std::uint32_t>(dimension(n) - 1));
    std::optional<BasisOutcome> record;
    double prob = 0.0;
    for (std::size_t r = 0; r < cfg.rounds; ++r) {
        for (std::size_t player : cfg.firing_order) {
            const Action a = pol[player](r, record);
            check_action(cfg, player, a);
            ops.get(r, player, a).apply_inplace(state.data());
            if (p > 0.0 && (p >= 1.0 || uniform01(rng) < p)) {
                const std::uint32_t bits = sample_index(state.data(), rng, prob);
                state.collapse_to(bits);
                record = BasisOutcome{n, bits, 1.0};
            }
        }
    }
    const std::uint32_t bits = sample_index(state.data(), rng, prob);
    return BasisOutcome{n, bits, prob};
}

} // namespace detail

/// One Monte Carlo realization: after each move, with probability p the whole
/// system is measured (state collapses, outcome becomes the public record).
/// A terminal measurement always follows the last move.
[[nodiscard]] inline BasisOutcome run_trajectory(const GameConfig &cfg, const PolicySet &pol, double p,
                                                 std::uint64_t seed) {
    check_probability(p);
    cfg.validate();
    detail::check_policy_set(cfg, pol);
    const OperatorCache ops(cfg);
    Rng rng = make_rng(seed, 0);
    StateBuilder state(cfg.n_players, 0);
    return detail::trajectory(cfg, ops, pol, p, rng, state);
}

inline constexpr std::size_t kMcChunk = 4096;

/// Mean payoffs over `trials` trajectories. Each trial first draws a policy set
/// from the weighted mixture (e.g. a coin-flipping player). Chunk k uses stream
/// k of the seed, so the result is bit-identical for any thread count.
[[nodiscard]] inline McPayoffs estimate_payoffs_mc(const GameConfig &cfg, const Weighted<PolicySet> &mixture,
                                                   double p, std::size_t trials, std::uint64_t seed,
                                                   unsigned threads = 0) {
    check_probability(p);
    cfg.validate();
    check_weights(mixture);
    for (const auto &[_, pol] : mixture) detail::check_policy_set(cfg, pol);
    if (trials < 1) throw Error(Errc::config, "trials must be >= 1");
    const std::size_t n = cfg.n_players;
    const OperatorCache ops(cfg);
    const std::size_t chunks = (trials + kMcChunk - 1) / kMcChunk;
    std::vector<std::vector<double>> sums(chunks, std::vector<double>(2 * n, 0.0));
    parallel_for(
        chunks,
        [&](std::size_t c) {
            Rng rng = make_rng(seed, c);
            StateBuilder state(n, 0);
            auto &acc = sums[c];
            const std::size_t begin = c * kMcChunk, end = std::min(trials, begin + kMcChunk);
            for (std::size_t t = begin; t < end; ++t) {
                std::size_t pick = 0;
                if (mixture.size() > 1) {
                    double u = detail::uniform01(rng);
                    while (pick + 1 < mixture.size() && u >= mixture[pick].first) u -= mixture[pick++].first;
                }
                const BasisOutcome o = detail::trajectory(cfg, ops, mixture[pick].second, p, rng, state);
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
    std::vector<double> sum(n, 0.0), sumsq(n, 0.0);
    for (const auto &acc : sums) {
        for (std::size_t j = 0; j < n; ++j) {
            sum[j] += acc[j];
            sumsq[j] += acc[n + j];
        }
    }
    McPayoffs out;
    out.trials = trials;
    const auto N = static_cast<double>(trials);
    for (std::size_t j = 0; j < n; ++j) {
        const double mean = sum[j] / N;
        const double var = trials > 1 ? std::max(0.0, (sumsq[j] - N * mean * mean) / (N - 1.0)) : 0.0;
        out.mean.values.push_back(mean);
        out.std_error.push_back(std::sqrt(var / N));
    }
    return out;
}

[[nodiscard]] inline McPayoffs estimate_payoffs_mc(const GameConfig &cfg, const PolicySet &pol, double p,
                                                   std::size_t trials, std::uint64_t seed, unsigned threads = 0) {
    return estimate_payoffs_mc(cfg, Weighted<PolicySet>{{1.0, pol}}, p, trials, seed, threads);
}

inline constexpr std::size_t kMaxBranches = 1u << 20;

/// Exact expected payoffs of the trajectory process, by enumerating measurement
/// branches. Branches collapsed at the same move onto the same outcome are
/// identical (policies see only round and record), so they are merged; the
/// live count stays below 1 + moves * 2^n.
[[nodiscard]] inline Payoffs exact_decoherent_payoffs(const GameConfig &cfg, const PolicySet &pol, double p) {
    check_probability(p);
    cfg.validate();
    detail::check_policy_set(cfg, pol);
    const std::size_t n = cfg.n_players, dim = dimension(n);
    const OperatorCache ops(cfg);
    struct Branch {
        double weight;
        StateBuilder state;
        std::optional<BasisOutcome> record;
    };
    std::vector<Branch> live;
    live.push_back({1.0, StateBuilder(n, static_cast<std::uint32_t>(dim - 1)), std::nullopt});
    std::vector<double> collapsed(dim);
    for (std::size_t r = 0; r < cfg.rounds; ++r) {
        for (std::size_t player : cfg.firing_order) {
            for (auto &b : live) {
                const Action a = pol[player](r, b.record);
                check_action(cfg, player, a);
                ops.get(r, player, a).apply_inplace(b.state.data());
            }
            if (p == 0.0) continue;
            std::fill(collapsed.begin(), collapsed.end(), 0.0);
            for (const auto &b : live) {
                const auto amps = b.state.data();
                for (std::size_t i = 0; i < dim; ++i) collapsed[i] += b.weight * p * std::norm(amps[i]);
            }
            std::vector<Branch> next;
            if (p < 1.0) {
                next.reserve(live.size() + dim);
                for (auto &b : live) {
                    b.weight *= 1.0 - p;
                    next.push_back(std::move(b));
                }
            }
            for (std::uint32_t i = 0; i < dim; ++i) {
                if (collapsed[i] > 0.0) next.push_back({collapsed[i], StateBuilder(n, i), BasisOutcome{n, i, 1.0}});
            }
            live = std::move(next);
            if (live.size() > kMaxBranches) throw Error(Errc::size, "too many measurement branches");
        }
    }
    Payoffs total{std::vector<double>(n, 0.0)};
    for (const auto &b : live) {
        const auto amps = b.state.data();
        const Payoffs pay = payoffs_from(cfg, dim, [&](std::uint32_t i) { return std::norm(amps[i]); });
        for (std::size_t j = 0; j < n; ++j) total.values[j] += b.weight * pay[j];
    }
    return total;
}

[[nodiscard]] inline Payoffs exact_decoherent_payoffs(const GameConfig &cfg, const Weighted<PolicySet> &mixture,
                                                      double p) {
    check_weights(mixture);
    Payoffs total{std::vector<double>(cfg.n_players, 0.0)};
    for (const auto &[w, pol] : mixture) {
        const Payoffs part = exact_decoherent_payoffs(cfg, pol, p);
        for (std::size_t j = 0; j < cfg.n_players; ++j) total.values[j] += w * part[j];
    }
    return total;
}

} // namespace qnuel
