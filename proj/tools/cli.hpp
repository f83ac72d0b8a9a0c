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

#include "qnuel/analysis.hpp"
#include "qnuel/classical.hpp"
#include "qnuel/config.hpp"
#include "qnuel/engine.hpp"
#include "qnuel/grid.hpp"
#include "qnuel/rational.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace qnuel::cli {

namespace detail {

[[nodiscard]] inline std::string dec9(double v) {
    std::ostringstream os;
    os << std::setprecision(9) << v;
    return os.str();
}

/// Fractions over a common denominator, if every value is a small rational.
[[nodiscard]] inline std::vector<std::string> common_fractions(const std::vector<double> &values) {
    std::vector<Rational> rs;
    std::int64_t lcm = 1;
    for (double v : values) {
        auto r = to_fraction(v, 100000);
        if (!r) return {};
        lcm = std::lcm(lcm, r->den);
        if (lcm > 1000000) return {};
        rs.push_back(*r);
    }
    std::vector<std::string> out;
    for (const auto &r : rs) {
        const std::int64_t num = r.num * (lcm / r.den);
        out.push_back(lcm == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(lcm));
    }
    return out;
}

inline void print_values(std::ostream &out, const std::vector<std::string> &names, const std::vector<double> &values,
                         bool exact) {
    const auto fr = exact ? common_fractions(values) : std::vector<std::string>{};
    for (std::size_t i = 0; i < values.size(); ++i) {
        out << "  " << std::left << std::setw(10) << names[i] << std::right << std::setw(14) << dec9(values[i]);
        if (!fr.empty()) out << "  " << fr[i];
        out << '\n';
    }
}

[[nodiscard]] inline std::vector<std::string> player_names(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t p = 0; p < n; ++p) out.push_back(Action::fire_at(p).label());
    return out;
}

inline void print_payoffs(std::ostream &out, const Payoffs &pay, bool exact) {
    out << "payoffs\n";
    print_values(out, player_names(pay.size()), pay.values, exact);
}

template <class Outcomes>
void print_outcomes(std::ostream &out, const Outcomes &outs, bool exact) {
    std::vector<std::string> names;
    std::vector<double> probs;
    for (const auto &o : outs) {
        if (o.probability <= 1e-15) continue;
        names.push_back("|" + o.label() + ">");
        probs.push_back(o.probability);
    }
    out << "outcome probabilities\n";
    print_values(out, names, probs, exact);
}

/// Marksmanship and game-file options shared by several subcommands.
struct GameOpts {
    std::string config, profile;
    std::vector<std::string> miss_letters; // --a, --b, --c
    std::string hit, miss, theta, alpha, beta;
    std::size_t rounds = 1;
    bool rounds_set = false;
    std::vector<std::string> plans; // --alice, --bob, --charles
};

inline void add_game_opts(CLI::App *sub, GameOpts &o, std::size_t letters, bool plans = true) {
    o.miss_letters.assign(letters, "");
    o.plans.assign(letters, "");
    static const char *names[] = {"a", "b", "c"};
    static const char *who[] = {"alice", "bob", "charles"};
    sub->add_option("--config", o.config, "game definition file");
    sub->add_option("--profile", o.profile, "strategy file (strategy.X / space.X lines)");
    for (std::size_t k = 0; k < letters; ++k) {
        sub->add_option(std::string("--") + names[k], o.miss_letters[k],
                        std::string("miss probability of ") + who[k] + " (e.g. 2/3)");
        if (plans) {
            sub->add_option(std::string("--") + who[k], o.plans[k],
                            std::string("plan for ") + who[k] + ", e.g. \"air,B\"");
        }
    }
    sub->add_option("--hit", o.hit, "hit probabilities, one per player");
    sub->add_option("--miss-prob", o.miss, "miss probabilities, one per player");
    sub->add_option("--theta", o.theta, "rotation angles in [0, pi], one per player");
    sub->add_option("--alpha", o.alpha, "alpha phases, one per player");
    sub->add_option("--beta", o.beta, "beta phases, one per player");
    sub->add_option("--rounds", o.rounds, "number of rounds")->check(CLI::PositiveNumber)->each([&o](const std::string &) {
        o.rounds_set = true;
    });
}

[[nodiscard]] inline std::string join(const std::vector<std::string> &v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
}

/// Builds a game from --config or the marksmanship flags (exactly one form).
[[nodiscard]] inline GameFile build_game(const GameOpts &o, std::optional<std::size_t> expect_players) {
    const bool letters = std::any_of(o.miss_letters.begin(), o.miss_letters.end(), [](auto &s) { return !s.empty(); });
    GameFile g;
    if (!o.config.empty()) {
        if (letters || !o.hit.empty() || !o.miss.empty() || !o.theta.empty()) {
            throw Error(Errc::config, "--config excludes marksmanship flags");
        }
        g = load_game(o.config);
        if (o.rounds_set) throw Error(Errc::config, "--rounds conflicts with --config");
    } else {
        const int forms = (letters ? 1 : 0) + (!o.hit.empty()) + (!o.miss.empty()) + (!o.theta.empty());
        if (forms != 1) throw Error(Errc::config, "give exactly one of --a/--b/--c, --hit, --miss-prob, --theta");
        std::string text;
        std::size_t n = 0;
        if (letters) {
            for (const auto &s : o.miss_letters) {
                if (s.empty()) throw Error(Errc::config, "give a miss probability for every player");
            }
            n = o.miss_letters.size();
            text += "miss_prob = " + join(o.miss_letters) + "\n";
        } else {
            const char *key = !o.hit.empty() ? "hit_prob" : !o.miss.empty() ? "miss_prob" : "theta";
            const std::string &val = !o.hit.empty() ? o.hit : !o.miss.empty() ? o.miss : o.theta;
            n = parse_numbers(val).size();
            text += std::string(key) + " = " + val + "\n";
        }
        text += "players = " + std::to_string(n) + "\nrounds = " + std::to_string(o.rounds) + "\n";
        if (!o.alpha.empty()) text += "alpha = " + o.alpha + "\n";
        if (!o.beta.empty()) text += "beta = " + o.beta + "\n";
        g = parse_game(text, "<flags>");
    }
    if (!o.config.empty() && (!o.alpha.empty() || !o.beta.empty())) {
        throw Error(Errc::config, "--alpha/--beta conflict with --config");
    }
    if (expect_players && g.cfg.n_players != *expect_players) {
        throw Error(Errc::config, "expected " + std::to_string(*expect_players) + " players, got " +
                                      std::to_string(g.cfg.n_players));
    }
    if (!o.profile.empty()) load_profile(g, o.profile);
    for (std::size_t p = 0; p < o.plans.size() && p < g.cfg.n_players; ++p) {
        if (o.plans[p].empty()) continue;
        Plan plan = parse_plan(o.plans[p], g.cfg.n_players);
        if (plan.size() != g.cfg.rounds) throw Error(Errc::profile, "plan length differs from round count");
        for (const auto &a : plan) check_action(g.cfg, p, a);
        g.strategies[p] = std::move(plan);
    }
    return g;
}

struct OutOpts {
    std::string out;
    std::string format = "csv";
};

inline void add_out_opts(CLI::App *sub, OutOpts &o) {
    sub->add_option("--out", o.out, "write the grid to this file");
    sub->add_option("--format", o.format, "grid file format")->check(CLI::IsMember({"csv", "json"}));
}

inline void write_grid(const SweepGrid &g, const OutOpts &o, std::ostream &out) {
    if (o.out.empty()) return;
    emit_grid(g, o.format == "json" ? GridFormat::json : GridFormat::csv, o.out);
    out << "wrote " << g.cells() << " cells to " << o.out << '\n';
}

[[nodiscard]] inline double number(const std::string &s) { return parse_number(s).value; }

[[nodiscard]] inline bool all_exact(const std::vector<std::string> &xs) {
    for (const auto &x : xs) {
        if (!x.empty() && !parse_number(x).exact) return false;
    }
    return true;
}

inline void print_phase_summary(std::ostream &out, const SweepGrid &g, const MaximinResult &mm) {
    for (std::size_t col = 0; col < 2; ++col) {
        double best = -1.0;
        for (std::size_t c = 0; c < g.cells(); ++c) best = std::max(best, g.value(c, col));
        out << (col == 0 ? "alice" : "bob") << " maximum " << dec9(best) << " at (alpha1/pi, alpha2/pi):";
        for (std::size_t c = 0; c < g.cells(); ++c) {
            if (g.value(c, col) >= best - kTieEps) {
                const auto idx = g.coords(c);
                out << " (" << dec9(g.axis(0).values[idx[0]] / std::numbers::pi) << ", "
                    << dec9(g.axis(1).values[idx[1]] / std::numbers::pi) << ")";
            }
        }
        out << '\n';
    }
    auto list = [](const std::vector<double> &v) {
        std::string s;
        for (double x : v) s += " " + dec9(x / std::numbers::pi);
        return s;
    };
    out << "maximin alice guarantee " << dec9(mm.alice_guarantee) << " at alpha1/pi in {" << list(mm.alice_alphas)
        << " }\n";
    out << "maximin bob guarantee " << dec9(mm.bob_guarantee) << " at alpha2/pi in {" << list(mm.bob_alphas) << " }\n";
    out << "maximin point (" << dec9(mm.alpha1 / std::numbers::pi) << ", " << dec9(mm.alpha2 / std::numbers::pi)
        << ")pi payoffs " << dec9(mm.payoffs[0]) << " " << dec9(mm.payoffs[1])
        << (mm.balanced ? " balanced\n" : " not balanced\n");
}

[[nodiscard]] inline Regime parse_regime(const std::string &name, double p) {
    if (name == "quantum") return Regime::quantum();
    if (name == "classical") return Regime::classical();
    if (name == "classical-hidden") return Regime::classical_hidden();
    if (name == "decoherent") return Regime::decoherent(p);
    throw Error(Errc::config, "unknown regime '" + name + "'");
}

[[nodiscard]] inline bool is_argument_error(Errc e) {
    return e != Errc::size && e != Errc::io;
}

} // namespace detail

/// Runs one command line. Returns 0 on success, 2 for argument and
/// configuration errors, 1 when a computation fails.
inline int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    using namespace detail;
    CLI::App app{"Quantum duels, truels and n-uels", "qnuel"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (default: QNUEL_THREADS or all cores)");
    std::function<void()> action;

    // duel
    GameOpts duel_g;
    OutOpts duel_o;
    bool duel_sweep = false, duel_second = false;
    std::size_t duel_points = 73, duel_curve = 0, duel_res = 101;
    auto *duel = app.add_subcommand("duel", "two-player game: payoffs, phase landscape, repeated-duel curve");
    add_game_opts(duel, duel_g, 2);
    add_out_opts(duel, duel_o);
    duel->add_flag("--phase-sweep", duel_sweep, "sweep (alpha1, alpha2) and report maxima and maximin");
    duel->add_option("--points", duel_points, "points per phase axis")->check(CLI::Range(2, 100000));
    duel->add_option("--curve", duel_curve, "payoff after 1..N rounds of mutual fire with its phase envelope");
    duel->add_flag("--second-shot", duel_second, "abstain-vs-fire advantage of Alice's second shot over (a, b)");
    duel->add_option("--res", duel_res, "grid points per axis for --second-shot")->check(CLI::Range(2, 100000));

    // phase-sweep
    GameOpts ps_g;
    OutOpts ps_o;
    std::size_t ps_points = 73;
    auto *ps = app.add_subcommand("phase-sweep", "duel phase landscape over (alpha1, alpha2)");
    add_game_opts(ps, ps_g, 2);
    add_out_opts(ps, ps_o);
    ps->add_option("--points", ps_points, "points per phase axis")->check(CLI::Range(2, 100000));

    // truel / nuel
    GameOpts tr_g, nu_g;
    double tr_p = -1.0, nu_p = -1.0;
    auto *truel = app.add_subcommand("truel", "three-player game: final state and payoffs");
    add_game_opts(truel, tr_g, 3);
    truel->add_option("--p", tr_p, "decoherence probability applied after every move")->check(CLI::Range(0.0, 1.0));
    auto *nuel = app.add_subcommand("nuel", "n-player game from a config file");
    add_game_opts(nuel, nu_g, 0);
    nuel->add_option("--p", nu_p, "decoherence probability applied after every move")->check(CLI::Range(0.0, 1.0));

    // equilibria
    GameOpts eq_g;
    double eq_eps = kTieEps;
    std::size_t eq_max = kMaxProfiles;
    auto *eq = app.add_subcommand("equilibria", "enumerate pure-strategy Nash equilibria");
    add_game_opts(eq, eq_g, 3, false);
    eq->add_option("--eps", eq_eps, "deviation tolerance");
    eq->add_option("--max-profiles", eq_max, "refuse spaces larger than this");

    // region-map
    std::string rm_scenario = "one-shot", rm_regime = "quantum";
    double rm_p = 0.0, rm_scale = 1.0;
    std::size_t rm_res = 201;
    std::string rm_boundary;
    OutOpts rm_o;
    auto *rm = app.add_subcommand("region-map", "label each (a, b) cell with the chosen truel strategy (c = 0)");
    rm->add_option("--scenario", rm_scenario, "one-shot, two-shot-a>b or two-shot-b>a");
    rm->add_option("--regime", rm_regime, "quantum, classical, classical-hidden or decoherent");
    rm->add_option("--p", rm_p, "decoherence probability for the decoherent regime")->check(CLI::Range(0.0, 1.0));
    rm->add_option("--res", rm_res, "grid points per axis over [0, 1)")->check(CLI::Range(2, 100000));
    rm->add_option("--scale", rm_scale, "multiply every utility by this factor")->check(CLI::PositiveNumber);
    rm->add_option("--boundary-out", rm_boundary, "write label-change points as CSV");
    add_out_opts(rm, rm_o);

    // decoherence-sweep
    std::string ds_scenario = "one-shot", ds_plist = "0,0.25,0.5,0.75,1";
    std::size_t ds_res = 201, ds_trials = 0, ds_mc_res = 41;
    std::uint64_t ds_seed = 1;
    OutOpts ds_o;
    auto *ds = app.add_subcommand("decoherence-sweep", "region boundaries for a list of decoherence probabilities");
    ds->add_option("--scenario", ds_scenario, "one-shot, two-shot-a>b or two-shot-b>a");
    ds->add_option("--p-list", ds_plist, "comma-separated decoherence probabilities");
    ds->add_option("--res", ds_res, "grid points per axis for the exact maps")->check(CLI::Range(2, 100000));
    ds->add_option("--trials", ds_trials, "also sample each cell with this many trajectories");
    ds->add_option("--mc-res", ds_mc_res, "grid points per axis for sampling")->check(CLI::Range(2, 100000));
    ds->add_option("--seed", ds_seed, "master seed for sampling");
    add_out_opts(ds, ds_o);

    // classical
    bool cl_truel = false, cl_duel = false;
    std::string cl_a, cl_b, cl_c, cl_strategy;
    std::size_t cl_bullets = 0;
    auto *cl = app.add_subcommand("classical", "classical duel and truel closed forms");
    cl->add_flag("--truel", cl_truel, "unlimited sequential truel (a > b > c)");
    cl->add_flag("--duel", cl_duel, "sequential duel");
    cl->add_option("--a", cl_a, "Alice's miss probability")->required();
    cl->add_option("--b", cl_b, "Bob's miss probability")->required();
    cl->add_option("--c", cl_c, "Charles's miss probability");
    cl->add_option("--strategy", cl_strategy, "Alice's opening: air, B or C")->check(CLI::IsMember({"air", "B", "C"}));
    cl->add_option("--bullets", cl_bullets, "bullets per duellist (default unlimited)");

    duel->callback([&] {
        action = [&] {
            GameFile g = build_game(duel_g, 2);
            if (duel_second) {
                const SweepGrid grid =
                    second_shot_advantage_surface(Axis::linspace("a", 0, 1, duel_res), Axis::linspace("b", 0, 1, duel_res), threads);
                std::size_t positive = 0;
                for (std::size_t c = 0; c < grid.cells(); ++c) positive += grid.value(c, 2) > 0.0 ? 1 : 0;
                out << "second-shot advantage over " << grid.cells() << " cells; abstaining wins in " << positive << '\n';
                write_grid(grid, duel_o, out);
                return;
            }
            if (duel_curve > 0) {
                const double a = g.cfg.marksmanship[0].miss(), b = g.cfg.marksmanship[1].miss();
                const auto curve = repeated_duel_curve(a, b, g.cfg.phases[0], g.cfg.phases[1], duel_curve,
                                                       phase_axis("alpha", duel_points), threads);
                out << "rounds  alice        min          max\n";
                for (const auto &pt : curve) {
                    out << std::setw(6) << pt.rounds << "  " << std::setw(11) << dec9(pt.payoff) << "  " << std::setw(11)
                        << dec9(pt.min) << "  " << std::setw(11) << dec9(pt.max) << '\n';
                }
                return;
            }
            for (std::size_t p = 0; p < 2; ++p) {
                if (!g.strategies[p]) g.strategies[p] = Plan(g.cfg.rounds, Action::fire_at(1 - p));
            }
            const StrategyProfile prof = g.profile();
            if (duel_sweep) {
                const SweepGrid grid = phase_landscape(g.cfg, prof, phase_axis("alpha1", duel_points),
                                                       phase_axis("alpha2", duel_points), threads);
                print_phase_summary(out, grid, maximin_phases(g.cfg, prof, phase_axis("alpha", duel_points), kTieEps, threads));
                write_grid(grid, duel_o, out);
                return;
            }
            const StateVector s = play(g.cfg, prof);
            print_outcomes(out, measure_probabilities(s), false);
            print_payoffs(out, expected_payoffs(s, g.cfg), g.exact_inputs);
        };
    });
    ps->callback([&] {
        action = [&] {
            GameFile g = build_game(ps_g, 2);
            for (std::size_t p = 0; p < 2; ++p) {
                if (!g.strategies[p]) g.strategies[p] = Plan(g.cfg.rounds, Action::fire_at(1 - p));
            }
            const StrategyProfile prof = g.profile();
            const SweepGrid grid =
                phase_landscape(g.cfg, prof, phase_axis("alpha1", ps_points), phase_axis("alpha2", ps_points), threads);
            print_phase_summary(out, grid, maximin_phases(g.cfg, prof, phase_axis("alpha", ps_points), kTieEps, threads));
            write_grid(grid, ps_o, out);
        };
    });
    auto play_game = [&](const GameOpts &o, std::optional<std::size_t> n, double p) {
        GameFile g = build_game(o, n);
        const StrategyProfile prof = g.profile();
        if (p >= 0.0) {
            const DensityMatrix r = play_decoherent(g.cfg, prof, p);
            print_outcomes(out, r.diagonal_outcomes(), false);
            print_payoffs(out, expected_payoffs(r, g.cfg), false);
            return;
        }
        const StateVector s = play(g.cfg, prof);
        print_outcomes(out, measure_probabilities(s), g.exact_inputs);
        print_payoffs(out, expected_payoffs(s, g.cfg), g.exact_inputs);
    };
    truel->callback([&] { action = [&] { play_game(tr_g, 3, tr_p); }; });
    nuel->callback([&] { action = [&] { play_game(nu_g, std::nullopt, nu_p); }; });
    eq->callback([&] {
        action = [&] {
            GameFile g = build_game(eq_g, std::nullopt);
            const StrategySpace space = g.space();
            const EquilibriumReport rep = find_equilibria(g.cfg, space, eq_eps, eq_max, threads);
            out << rep.equilibria.size() << " pure equilibria among " << rep.profiles_checked << " profiles (eps "
                << eq_eps << ")\n";
            for (const auto &e : rep.equilibria) {
                const DeviationCheck chk = verify_equilibrium(g.cfg, space, e.profile, eq_eps);
                for (std::size_t p = 0; p < g.cfg.n_players; ++p) {
                    out << (p ? "  " : "") << Action::fire_at(p).label() << ": " << plan_label(e.profile.plans[p]);
                }
                out << "  payoffs";
                for (double v : e.payoffs.values) out << ' ' << dec9(v);
                out << (chk.stable ? "  verified\n" : "  NOT verified\n");
            }
        };
    });
    rm->callback([&] {
        action = [&] {
            const Scenario sc = parse_scenario(rm_scenario);
            const Regime reg = parse_regime(rm_regime, rm_p);
            RegionOptions ro;
            ro.utility_scale = rm_scale;
            ro.threads = threads;
            const SweepGrid g = strategy_region_map(sc, reg, miss_axis("a", rm_res), miss_axis("b", rm_res), ro);
            std::map<std::string, std::size_t> counts;
            for (std::size_t c = 0; c < g.cells(); ++c) ++counts[g.label(c)];
            out << scenario_name(sc) << " " << reg.name();
            if (reg.kind == Regime::Kind::decoherent) out << " p=" << dec9(reg.p);
            out << ", " << g.cells() << " cells\n";
            for (const auto &[label, k] : counts) out << "  " << std::left << std::setw(10) << label << std::right << k << '\n';
            const auto bps = extract_boundary(g);
            out << bps.size() << " boundary points\n";
            if (!rm_boundary.empty()) {
                std::ofstream os(rm_boundary, std::ios::binary);
                if (!os) throw Error(Errc::io, "cannot open '" + rm_boundary + "' for writing");
                os << "a,b,from,to\n";
                for (const auto &bp : bps) {
                    os << ::qnuel::detail::format_g17(bp.row) << ',' << ::qnuel::detail::format_g17(bp.at) << ','
                       << bp.from << ',' << bp.to << '\n';
                }
            }
            write_grid(g, rm_o, out);
        };
    });
    ds->callback([&] {
        action = [&] {
            const Scenario sc = parse_scenario(ds_scenario);
            std::vector<double> ps;
            for (const auto &x : parse_numbers(ds_plist)) {
                check_probability(x.value);
                ps.push_back(x.value);
            }
            if (ps.size() < 2) throw Error(Errc::config, "--p-list needs at least two values");
            RegionOptions ro;
            ro.threads = threads;
            const Axis a_axis = miss_axis("a", ds_res), b_axis = miss_axis("b", ds_res);
            SweepGrid out_grid({Axis{"p", ps}, a_axis}, {"boundary_b"});
            for (std::size_t k = 0; k < ps.size(); ++k) {
                const SweepGrid g = strategy_region_map(sc, Regime::decoherent(ps[k]), a_axis, b_axis, ro);
                for (const auto &bp : extract_boundary(g)) {
                    const auto i = static_cast<std::size_t>(
                        std::find(a_axis.values.begin(), a_axis.values.end(), bp.row) - a_axis.values.begin());
                    double &slot = out_grid.value(out_grid.cell({k, i}), 0);
                    if (std::isnan(slot)) slot = bp.at;
                }
                out << "p=" << std::setw(6) << dec9(ps[k]) << "  first boundary b at a = 0, 0.25, 0.5, 0.75:";
                for (double a : {0.0, 0.25, 0.5, 0.75}) {
                    const auto i = static_cast<std::size_t>(std::lround(a * static_cast<double>(ds_res)));
                    out << ' ' << dec9(out_grid.value(out_grid.cell({k, std::min(i, ds_res - 1)}), 0));
                }
                out << '\n';
                if (ds_trials > 0) {
                    const SweepGrid mc = mc_region_map(sc, ps[k], miss_axis("a", ds_mc_res), miss_axis("b", ds_mc_res),
                                                       ds_trials, ds_seed, ro);
                    const SweepGrid ex = strategy_region_map(sc, Regime::decoherent(ps[k]), miss_axis("a", ds_mc_res),
                                                             miss_axis("b", ds_mc_res), ro);
                    std::size_t agree = 0;
                    for (std::size_t c = 0; c < mc.cells(); ++c) agree += mc.label(c) == ex.label(c) ? 1 : 0;
                    out << "        sampled labels agree on " << agree << " of " << mc.cells() << " cells\n";
                }
            }
            write_grid(out_grid, ds_o, out);
        };
    });
    cl->callback([&] {
        action = [&] {
            if (cl_truel == cl_duel) throw Error(Errc::config, "choose exactly one of --truel, --duel");
            const bool exact = all_exact({cl_a, cl_b, cl_c});
            if (cl_duel) {
                classical::DuelParams d{number(cl_a), number(cl_b), {}, 0.5};
                if (cl_bullets > 0) d.bullets = cl_bullets;
                const double v = classical::duel_payoff(d);
                out << "duel payoffs\n";
                print_values(out, {"A", "B"}, {v, 1.0 - v}, exact);
                return;
            }
            if (cl_c.empty()) throw Error(Errc::config, "--truel needs --c");
            const std::map<std::string, classical::TruelStrategy> strat{
                {"air", classical::TruelStrategy::air}, {"B", classical::TruelStrategy::target_b},
                {"C", classical::TruelStrategy::target_c}};
            for (const auto &[name, s] : strat) {
                if (!cl_strategy.empty() && name != cl_strategy) continue;
                const auto sv = classical::truel_survival(number(cl_a), number(cl_b), number(cl_c), s);
                out << "sole-survival probabilities, Alice opens with " << name << '\n';
                print_values(out, {"A", "B", "C"}, {sv.alice, sv.bob, sv.charles}, exact);
            }
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return 2;
    }
    try {
        action();
        return 0;
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return is_argument_error(e.code()) ? 2 : 1;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace qnuel::cli
