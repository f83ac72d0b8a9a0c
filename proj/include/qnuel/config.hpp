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

// Plain-text game definitions. One `key = value` per line, '#' starts a
// comment. See README.md for the full key list.

#include "qnuel/analysis.hpp"
#include "qnuel/engine.hpp"
#include "qnuel/error.hpp"
#include "qnuel/rational.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace qnuel {

struct GameFile {
    GameConfig cfg;
    std::vector<std::optional<Plan>> strategies; ///< per player, if given
    std::vector<std::optional<std::vector<std::vector<Action>>>> spaces; ///< per player, if given
    bool exact_inputs = true; ///< every numeric input was rational

    [[nodiscard]] bool has_profile() const {
        for (const auto &s : strategies) {
            if (!s) return false;
        }
        return !strategies.empty();
    }

    [[nodiscard]] StrategyProfile profile() const {
        StrategyProfile prof;
        for (std::size_t p = 0; p < strategies.size(); ++p) {
            if (!strategies[p]) throw Error(Errc::profile, "no strategy for player " + Action::fire_at(p).label());
            prof.plans.push_back(*strategies[p]);
        }
        check_profile(cfg, prof);
        return prof;
    }

    /// The declared space; players without a `space.` line get every action.
    [[nodiscard]] StrategySpace space() const {
        StrategySpace s = StrategySpace::full(cfg);
        for (std::size_t p = 0; p < spaces.size(); ++p) {
            if (spaces[p]) s.allowed[p] = *spaces[p];
        }
        s.normalize(cfg);
        return s;
    }
};

namespace detail {

[[nodiscard]] inline std::vector<std::string> split_list(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.emplace_back(trim(cur));
    if (out.size() == 1 && out.front().empty()) out.clear();
    return out;
}

[[nodiscard]] inline std::string lower(std::string s) {
    for (char &c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

} // namespace detail

/// "A".."Z" (case-insensitive) or a 1-based index.
[[nodiscard]] inline std::size_t parse_player(std::string_view token, std::size_t n_players) {
    const std::string t(detail::trim(token));
    std::size_t idx = n_players;
    if (t.size() == 1 && std::isalpha(static_cast<unsigned char>(t[0]))) {
        idx = static_cast<std::size_t>(std::toupper(static_cast<unsigned char>(t[0])) - 'A');
    } else if (auto v = detail::parse_int(t); v && *v >= 1) {
        idx = static_cast<std::size_t>(*v - 1);
    }
    if (idx >= n_players) throw Error(Errc::invalid_player, "unknown player '" + t + "'");
    return idx;
}

/// "air" or a player.
[[nodiscard]] inline Action parse_action(std::string_view token, std::size_t n_players) {
    if (detail::lower(std::string(detail::trim(token))) == "air") return Action::air();
    return Action::fire_at(parse_player(token, n_players));
}

/// Comma-separated actions, one per round, e.g. "air, B".
[[nodiscard]] inline Plan parse_plan(std::string_view text, std::size_t n_players) {
    Plan plan;
    for (const auto &tok : detail::split_list(text, ',')) plan.push_back(parse_action(tok, n_players));
    if (plan.empty()) throw Error(Errc::profile, "empty plan");
    return plan;
}

/// Rounds separated by ',', alternatives within a round by '|': "C, air|B".
[[nodiscard]] inline std::vector<std::vector<Action>> parse_space(std::string_view text, std::size_t n_players) {
    std::vector<std::vector<Action>> out;
    for (const auto &slot : detail::split_list(text, ',')) {
        std::vector<Action> acts;
        for (const auto &tok : detail::split_list(slot, '|')) acts.push_back(parse_action(tok, n_players));
        if (acts.empty()) throw Error(Errc::config, "empty strategy slot");
        out.push_back(std::move(acts));
    }
    return out;
}

[[nodiscard]] inline std::vector<Number> parse_numbers(std::string_view text) {
    std::vector<Number> out;
    for (const auto &tok : detail::split_list(text, ',')) out.push_back(parse_number(tok));
    return out;
}

namespace detail {

[[nodiscard]] inline std::vector<std::pair<std::string, std::string>> key_values(const std::string &text,
                                                                                  const std::string &source) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const std::string_view t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) {
            throw Error(Errc::config, source + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        out.emplace_back(lower(std::string(trim(t.substr(0, eq)))), std::string(trim(t.substr(eq + 1))));
    }
    return out;
}

inline void apply_strategy_lines(GameFile &g, const std::vector<std::pair<std::string, std::string>> &kv,
                                 const std::string &source, bool strategies_only) {
    const std::size_t n = g.cfg.n_players;
    g.strategies.resize(n);
    g.spaces.resize(n);
    for (const auto &[key, value] : kv) {
        if (key.rfind("strategy.", 0) == 0) {
            const std::size_t p = parse_player(key.substr(9), n);
            Plan plan = parse_plan(value, n);
            if (plan.size() != g.cfg.rounds) {
                throw Error(Errc::profile, source + ": strategy for " + Action::fire_at(p).label() + " has " +
                                               std::to_string(plan.size()) + " actions, game has " +
                                               std::to_string(g.cfg.rounds) + " rounds");
            }
            for (const auto &a : plan) check_action(g.cfg, p, a);
            g.strategies[p] = std::move(plan);
        } else if (key.rfind("space.", 0) == 0) {
            const std::size_t p = parse_player(key.substr(6), n);
            auto sp = parse_space(value, n);
            if (sp.size() != g.cfg.rounds) throw Error(Errc::config, source + ": space needs one slot per round");
            for (const auto &slot : sp) {
                for (const auto &a : slot) check_action(g.cfg, p, a);
            }
            g.spaces[p] = std::move(sp);
        } else if (strategies_only) {
            throw Error(Errc::config, source + ": unexpected key '" + key + "' in a profile");
        }
    }
}

[[nodiscard]] inline std::string read_file(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(Errc::io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace detail

/// Parses a game definition; strategy and space lines are optional.
[[nodiscard]] inline GameFile parse_game(const std::string &text, const std::string &source = "<config>") {
    const auto kv = detail::key_values(text, source);
    std::map<std::string, std::string> keys;
    for (const auto &[k, v] : kv) {
        if (k.rfind("strategy.", 0) == 0 || k.rfind("space.", 0) == 0) continue;
        static const char *known[] = {"players", "rounds", "hit_prob", "miss_prob", "theta",
                                      "alpha", "beta", "utilities", "firing_order"};
        if (std::find_if(std::begin(known), std::end(known), [&](const char *s) { return k == s; }) == std::end(known)) {
            throw Error(Errc::config, source + ": unknown key '" + k + "'");
        }
        if (!keys.emplace(k, v).second) throw Error(Errc::config, source + ": duplicate key '" + k + "'");
    }
    auto need = [&](const std::string &k) -> const std::string & {
        const auto it = keys.find(k);
        if (it == keys.end()) throw Error(Errc::config, source + ": missing key '" + k + "'");
        return it->second;
    };
    GameFile g;
    const Number players = parse_number(need("players"));
    const Number rounds = parse_number(need("rounds"));
    if (!players.exact || players.exact->den != 1 || !rounds.exact || rounds.exact->den != 1 || rounds.exact->num < 1) {
        throw Error(Errc::config, source + ": players and rounds must be positive integers");
    }
    if (players.exact->num < 2 || players.exact->num > static_cast<std::int64_t>(kMaxPlayers)) {
        throw Error(Errc::invalid_player_count, source + ": players must be in [2, " + std::to_string(kMaxPlayers) + "]");
    }
    const auto n = static_cast<std::size_t>(players.exact->num);
    auto per_player = [&](const std::string &k) {
        auto v = parse_numbers(keys.at(k));
        if (v.size() != n) throw Error(Errc::config, source + ": '" + k + "' needs " + std::to_string(n) + " values");
        return v;
    };

    int forms = 0;
    for (const char *k : {"hit_prob", "miss_prob", "theta"}) forms += keys.count(k) ? 1 : 0;
    if (forms != 1) throw Error(Errc::config, source + ": give exactly one of hit_prob, miss_prob, theta");
    std::vector<Marksmanship> m;
    if (keys.count("theta")) {
        for (const auto &x : per_player("theta")) m.push_back(Marksmanship::from_theta(x.value));
        g.exact_inputs = false;
    } else {
        const bool hit = keys.count("hit_prob") > 0;
        for (const auto &x : per_player(hit ? "hit_prob" : "miss_prob")) {
            m.push_back(hit ? Marksmanship::from_hit_probability(x.value) : Marksmanship::from_miss_probability(x.value));
            g.exact_inputs = g.exact_inputs && x.exact.has_value();
        }
    }
    g.cfg = GameConfig::make(std::move(m), static_cast<std::size_t>(rounds.exact->num));
    std::vector<Number> alpha(n), beta(n);
    if (keys.count("alpha")) alpha = per_player("alpha");
    if (keys.count("beta")) beta = per_player("beta");
    for (std::size_t p = 0; p < n; ++p) {
        g.cfg.phases[p] = PhaseParams(alpha[p].value, beta[p].value);
        if (alpha[p].value != 0.0 || beta[p].value != 0.0) g.exact_inputs = false;
    }
    if (keys.count("utilities")) {
        g.cfg.utilities.u.clear();
        for (const auto &x : per_player("utilities")) g.cfg.utilities.u.push_back(x.value);
    }
    if (keys.count("firing_order")) {
        g.cfg.firing_order.clear();
        for (const auto &tok : detail::split_list(keys.at("firing_order"), ',')) {
            g.cfg.firing_order.push_back(parse_player(tok, n));
        }
    }
    g.cfg.validate();
    detail::apply_strategy_lines(g, kv, source, false);
    return g;
}

[[nodiscard]] inline GameFile load_game(const std::string &path) { return parse_game(detail::read_file(path), path); }

/// Adds the `strategy.` and `space.` lines of a profile file to a game.
inline void load_profile(GameFile &g, const std::string &path) {
    detail::apply_strategy_lines(g, detail::key_values(detail::read_file(path), path), path, true);
}

} // namespace qnuel
