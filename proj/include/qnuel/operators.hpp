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
#include "qnuel/qstate.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>

namespace qnuel {

/// A player's shooting accuracy. theta in [0, pi] is canonical; the miss
/// probability a = cos^2(theta/2) is kept exactly when it was the input.
class Marksmanship {
  public:
    Marksmanship() : Marksmanship(from_theta(std::numbers::pi)) {}

    static Marksmanship from_theta(double theta) {
        if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
            throw Error(Errc::invalid_angle, "theta " + std::to_string(theta) + " outside [0, pi]");
        }
        const double c = std::cos(theta / 2), s = std::sin(theta / 2);
        return Marksmanship(theta, c, s, c * c);
    }

    /// Branch theta = 2 arccos(sqrt(a)).
    static Marksmanship from_miss_probability(double a) {
        check_probability(a);
        const double c = std::sqrt(a), s = std::sqrt(1.0 - a);
        return Marksmanship(2.0 * std::atan2(s, c), c, s, a);
    }

    static Marksmanship from_hit_probability(double h) {
        check_probability(h);
        return from_miss_probability(1.0 - h);
    }

    [[nodiscard]] double theta() const { return theta_; }
    [[nodiscard]] double miss() const { return miss_; }
    [[nodiscard]] double hit() const { return 1.0 - miss_; }
    [[nodiscard]] double cos_half() const { return cos_half_; }
    [[nodiscard]] double sin_half() const { return sin_half_; }

  private:
    Marksmanship(double theta, double c, double s, double a)
        : theta_(theta), cos_half_(c), sin_half_(s), miss_(a) {}

    double theta_;
    double cos_half_;
    double sin_half_;
    double miss_;
};

[[nodiscard]] inline double wrap_angle(double x) {
    if (!std::isfinite(x)) throw Error(Errc::invalid_angle, "non-finite phase");
    return std::remainder(x, 2.0 * std::numbers::pi);
}

struct PhaseParams {
    double alpha = 0.0;
    double beta = 0.0;

    PhaseParams() = default;
    PhaseParams(double a, double b) : alpha(wrap_angle(a)), beta(wrap_angle(b)) {}
};

/// Controlled flip of the target's liveness qubit, conditioned on the shooter
/// being alive. Stored structurally; apply() runs in O(2^n).
///
/// On the shooter-alive subspace, with (shooter, target) bits written first:
///   |11> -> e^{-i alpha} cos(theta/2) |11> + i e^{i beta} sin(theta/2) |10>
///   |10> -> e^{i alpha} cos(theta/2) |10> + i e^{-i beta} sin(theta/2) |11>
class FiringOp {
  public:
    [[nodiscard]] std::size_t n_players() const { return n_; }
    [[nodiscard]] bool is_identity() const { return identity_; }
    [[nodiscard]] std::size_t shooter() const { return shooter_; }
    [[nodiscard]] std::size_t target() const { return target_; }
    [[nodiscard]] const Marksmanship &marksmanship() const { return m_; }
    [[nodiscard]] const PhaseParams &phases() const { return ph_; }

    // 2x2 block in the (target alive, target dead) basis of the shooter-alive subspace.
    [[nodiscard]] Complex stay_alive() const { return stay_alive_; }
    [[nodiscard]] Complex kill() const { return kill_; }
    [[nodiscard]] Complex revive() const { return revive_; }
    [[nodiscard]] Complex stay_dead() const { return stay_dead_; }

    /// In-place application on a raw 2^n buffer.
    void apply_inplace(std::span<Complex> amps) const {
        if (identity_) return;
        const std::uint32_t smask = player_mask(n_, shooter_);
        const std::uint32_t tmask = player_mask(n_, target_);
        const auto dim = static_cast<std::uint32_t>(amps.size());
        for (std::uint32_t i = 0; i < dim; ++i) {
            if ((i & smask) == 0 || (i & tmask) == 0) continue;
            const std::uint32_t j = i ^ tmask;
            const Complex alive = amps[i];
            const Complex dead = amps[j];
            amps[i] = stay_alive_ * alive + revive_ * dead;
            amps[j] = kill_ * alive + stay_dead_ * dead;
        }
    }

    /// Dense 2^n x 2^n matrix, for validation.
    [[nodiscard]] Eigen::MatrixXcd dense() const {
        const auto d = static_cast<Eigen::Index>(dimension(n_));
        Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(d, d);
        if (identity_) return u;
        const std::uint32_t smask = player_mask(n_, shooter_);
        const std::uint32_t tmask = player_mask(n_, target_);
        for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(d); ++i) {
            if ((i & smask) == 0 || (i & tmask) == 0) continue;
            const std::uint32_t j = i ^ tmask;
            u(i, i) = stay_alive_;
            u(j, i) = kill_;
            u(i, j) = revive_;
            u(j, j) = stay_dead_;
        }
        return u;
    }

  private:
    friend FiringOp build_firing_op(std::size_t, std::size_t, std::size_t, const Marksmanship &,
                                    const PhaseParams &);
    friend FiringOp fire_in_air(std::size_t);

    FiringOp() = default;

    std::size_t n_ = 0;
    bool identity_ = true;
    std::size_t shooter_ = 0;
    std::size_t target_ = 0;
    Marksmanship m_;
    PhaseParams ph_;
    Complex stay_alive_{1.0}, kill_{}, revive_{}, stay_dead_{1.0};
};

/// Players are 0-based.
[[nodiscard]] inline FiringOp build_firing_op(std::size_t n_players, std::size_t shooter, std::size_t target,
                                              const Marksmanship &m, const PhaseParams &ph) {
    check_player_count(n_players);
    if (shooter >= n_players || target >= n_players) {
        throw Error(Errc::invalid_player, "player index out of range");
    }
    if (shooter == target) throw Error(Errc::self_target, "player " + std::to_string(shooter) + " targets itself");
    using namespace std::complex_literals;
    FiringOp op;
    op.n_ = n_players;
    op.identity_ = false;
    op.shooter_ = shooter;
    op.target_ = target;
    op.m_ = m;
    op.ph_ = ph;
    const double c = m.cos_half(), s = m.sin_half();
    op.stay_alive_ = std::polar(c, -ph.alpha);
    op.stay_dead_ = std::polar(c, ph.alpha);
    op.kill_ = 1i * std::polar(s, ph.beta);
    op.revive_ = 1i * std::polar(s, -ph.beta);
    return op;
}

[[nodiscard]] inline FiringOp fire_in_air(std::size_t n_players) {
    check_player_count(n_players);
    FiringOp op;
    op.n_ = n_players;
    return op;
}

[[nodiscard]] inline StateVector apply(const FiringOp &op, const StateVector &s) {
    if (op.n_players() != s.n_players()) throw Error(Errc::shape, "operator and state differ in player count");
    StateBuilder b(s);
    op.apply_inplace(b.data());
    return std::move(b).build();
}

/// U rho U^dagger, using the structured operator on columns then rows.
[[nodiscard]] inline DensityMatrix apply_to_density(const FiringOp &op, const DensityMatrix &r) {
    if (op.n_players() != r.n_players()) throw Error(Errc::shape, "operator and density differ in player count");
    if (op.is_identity()) return r;
    Eigen::MatrixXcd m = r.entries();
    const std::size_t n = op.n_players();
    const std::uint32_t smask = player_mask(n, op.shooter());
    const std::uint32_t tmask = player_mask(n, op.target());
    const auto d = static_cast<std::uint32_t>(m.rows());
    const Complex sa = op.stay_alive(), k = op.kill(), rv = op.revive(), sd = op.stay_dead();
    for (std::uint32_t i = 0; i < d; ++i) {
        if ((i & smask) == 0 || (i & tmask) == 0) continue;
        const std::uint32_t j = i ^ tmask;
        // rows: U * m
        for (std::uint32_t c = 0; c < d; ++c) {
            const Complex a = m(i, c), b = m(j, c);
            m(i, c) = sa * a + rv * b;
            m(j, c) = k * a + sd * b;
        }
    }
    for (std::uint32_t i = 0; i < d; ++i) {
        if ((i & smask) == 0 || (i & tmask) == 0) continue;
        const std::uint32_t j = i ^ tmask;
        // columns: (U m) * U^dagger
        for (std::uint32_t row = 0; row < d; ++row) {
            const Complex a = m(row, i), b = m(row, j);
            m(row, i) = a * std::conj(sa) + b * std::conj(rv);
            m(row, j) = a * std::conj(k) + b * std::conj(sd);
        }
    }
    return DensityMatrix(n, std::move(m));
}

} // namespace qnuel
