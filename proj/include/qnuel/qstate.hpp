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

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#ifndef QNUEL_MAX_PLAYERS
#define QNUEL_MAX_PLAYERS 16
#endif

namespace qnuel {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxPlayers = QNUEL_MAX_PLAYERS;
inline constexpr double kIdentityTol = 1e-12;
inline constexpr double kEvolutionTol = 1e-9;
inline constexpr double kPsdTol = 1e-10;

inline void check_player_count(std::size_t n) {
    if (n < 2 || n > kMaxPlayers) {
        throw Error(Errc::invalid_player_count,
                    "player count " + std::to_string(n) + " outside [2, " +
                        std::to_string(kMaxPlayers) + "]");
    }
}

/// Basis index bit for a 0-based player. Player 0 is the most significant bit,
/// so index 0b110 of a truel reads |110> (Alice and Bob alive, Charles dead).
[[nodiscard]] constexpr std::uint32_t player_mask(std::size_t n_players, std::size_t player) {
    return std::uint32_t{1} << (n_players - 1 - player);
}

[[nodiscard]] constexpr std::size_t dimension(std::size_t n_players) {
    return std::size_t{1} << n_players;
}

/// One computational basis state and its Born probability.
struct BasisOutcome {
    std::size_t n_players = 0;
    std::uint32_t bits = 0;
    double probability = 0.0;

    [[nodiscard]] bool alive(std::size_t player) const {
        return (bits & player_mask(n_players, player)) != 0;
    }
    [[nodiscard]] std::size_t alive_count() const {
        return static_cast<std::size_t>(std::popcount(bits));
    }
    /// Ket label, player 0 first: "101".
    [[nodiscard]] std::string label() const {
        std::string s(n_players, '0');
        for (std::size_t k = 0; k < n_players; ++k) {
            if (alive(k)) s[k] = '1';
        }
        return s;
    }
};

[[nodiscard]] inline std::uint32_t parse_ket(std::string_view ket) {
    std::uint32_t bits = 0;
    for (char ch : ket) {
        if (ch != '0' && ch != '1') throw Error(Errc::config, "bad ket label '" + std::string(ket) + "'");
        bits = (bits << 1) | static_cast<std::uint32_t>(ch == '1');
    }
    return bits;
}

/// Normalized amplitudes over the 2^n liveness basis states.
class StateVector {
  public:
    StateVector(std::size_t n_players, std::vector<Complex> amplitudes)
        : n_(n_players), amps_(std::move(amplitudes)) {
        check_player_count(n_);
        if (amps_.size() != dimension(n_)) {
            throw Error(Errc::shape, "expected " + std::to_string(dimension(n_)) +
                                         " amplitudes, got " + std::to_string(amps_.size()));
        }
        if (std::abs(norm_squared() - 1.0) > kIdentityTol) {
            throw Error(Errc::shape, "state is not normalized");
        }
    }

    /// Scales arbitrary nonzero amplitudes to unit norm.
    static StateVector normalized(std::size_t n_players, std::vector<Complex> amplitudes) {
        double s = 0.0;
        for (const auto &a : amplitudes) s += std::norm(a);
        if (!(s > 0.0)) throw Error(Errc::shape, "zero vector cannot be normalized");
        const double k = 1.0 / std::sqrt(s);
        for (auto &a : amplitudes) a *= k;
        return StateVector(n_players, std::move(amplitudes));
    }

    static StateVector basis(std::size_t n_players, std::uint32_t bits) {
        check_player_count(n_players);
        std::vector<Complex> amps(dimension(n_players));
        if (bits >= amps.size()) throw Error(Errc::shape, "basis index out of range");
        amps[bits] = 1.0;
        return StateVector(n_players, std::move(amps));
    }

    [[nodiscard]] std::size_t n_players() const { return n_; }
    [[nodiscard]] std::size_t dim() const { return amps_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const { return amps_; }
    [[nodiscard]] Complex operator[](std::size_t i) const { return amps_[i]; }
    [[nodiscard]] Complex amplitude(std::string_view ket) const { return amps_.at(parse_ket(ket)); }
    [[nodiscard]] double probability(std::string_view ket) const { return std::norm(amplitude(ket)); }

    [[nodiscard]] double norm_squared() const {
        double s = 0.0;
        for (const auto &a : amps_) s += std::norm(a);
        return s;
    }

  private:
    friend class StateBuilder;
    std::size_t n_;
    std::vector<Complex> amps_;
};

/// Unchecked mutable amplitude buffer for hot loops; turns back into a
/// StateVector through the normalization check.
class StateBuilder {
  public:
    explicit StateBuilder(const StateVector &s) : n_(s.n_), amps_(s.amps_) {}
    StateBuilder(std::size_t n_players, std::uint32_t basis_bits)
        : n_(n_players), amps_(dimension(n_players)) {
        amps_[basis_bits] = 1.0;
    }

    [[nodiscard]] std::size_t n_players() const { return n_; }
    [[nodiscard]] std::span<Complex> data() { return amps_; }
    [[nodiscard]] std::span<const Complex> data() const { return amps_; }

    void collapse_to(std::uint32_t bits) {
        std::fill(amps_.begin(), amps_.end(), Complex{});
        amps_[bits] = 1.0;
    }

    [[nodiscard]] StateVector build() const& { return StateVector(n_, amps_); }
    [[nodiscard]] StateVector build() && { return StateVector(n_, std::move(amps_)); }

  private:
    std::size_t n_;
    std::vector<Complex> amps_;
};

[[nodiscard]] inline StateVector all_alive(std::size_t n_players) {
    check_player_count(n_players);
    return StateVector::basis(n_players, static_cast<std::uint32_t>(dimension(n_players) - 1));
}

[[nodiscard]] inline std::vector<BasisOutcome> measure_probabilities(const StateVector &s) {
    std::vector<BasisOutcome> out;
    out.reserve(s.dim());
    for (std::size_t i = 0; i < s.dim(); ++i) {
        out.push_back({s.n_players(), static_cast<std::uint32_t>(i), std::norm(s[i])});
    }
    return out;
}

/// Hermitian, unit-trace operator on the liveness space.
class DensityMatrix {
  public:
    DensityMatrix(std::size_t n_players, Eigen::MatrixXcd entries)
        : n_(n_players), m_(std::move(entries)) {
        check_player_count(n_);
        const auto d = static_cast<Eigen::Index>(dimension(n_));
        if (m_.rows() != d || m_.cols() != d) throw Error(Errc::shape, "density matrix has wrong dimension");
        if (std::abs(m_.trace() - Complex{1.0}) > kEvolutionTol) {
            throw Error(Errc::shape, "density matrix trace is not 1");
        }
        if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kEvolutionTol) {
            throw Error(Errc::shape, "density matrix is not Hermitian");
        }
    }

    [[nodiscard]] std::size_t n_players() const { return n_; }
    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    [[nodiscard]] const Eigen::MatrixXcd &entries() const { return m_; }
    [[nodiscard]] Complex operator()(std::size_t r, std::size_t c) const {
        return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
    [[nodiscard]] double population(std::size_t i) const { return (*this)(i, i).real(); }

    [[nodiscard]] std::vector<BasisOutcome> diagonal_outcomes() const {
        std::vector<BasisOutcome> out;
        out.reserve(dim());
        for (std::size_t i = 0; i < dim(); ++i) {
            out.push_back({n_, static_cast<std::uint32_t>(i), population(i)});
        }
        return out;
    }

    [[nodiscard]] double hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }
    [[nodiscard]] double trace_error() const { return std::abs(m_.trace() - Complex{1.0}); }

    /// Full eigendecomposition; validation paths only.
    [[nodiscard]] double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m_, Eigen::EigenvaluesOnly);
        return solver.eigenvalues().minCoeff();
    }

    [[nodiscard]] bool is_valid(double tol = kIdentityTol, double psd_tol = kPsdTol) const {
        return hermiticity_error() <= tol && trace_error() <= tol && min_eigenvalue() >= -psd_tol;
    }

  private:
    std::size_t n_;
    Eigen::MatrixXcd m_;
};

[[nodiscard]] inline DensityMatrix to_density(const StateVector &s) {
    const auto d = static_cast<Eigen::Index>(s.dim());
    Eigen::Map<const Eigen::VectorXcd> v(s.amplitudes().data(), d);
    return DensityMatrix(s.n_players(), v * v.adjoint());
}

inline void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::invalid_probability, "probability " + std::to_string(p) + " outside [0, 1]");
}

/// rho -> (1 - p) rho + p diag(rho). Off-diagonal entries are scaled directly,
/// so p = 0 and p = 1 are exact.
[[nodiscard]] inline DensityMatrix decohere(const DensityMatrix &r, double p) {
    check_probability(p);
    Eigen::MatrixXcd m = r.entries();
    const double keep = 1.0 - p;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (i != c) m(i, c) *= keep;
        }
    }
    return DensityMatrix(r.n_players(), std::move(m));
}

/// sum_i w_i rho_i. Weights are validated by the caller.
[[nodiscard]] inline DensityMatrix mix(std::span<const std::pair<double, DensityMatrix>> parts) {
    if (parts.empty()) throw Error(Errc::weight, "empty mixture");
    const std::size_t n = parts.front().second.n_players();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dimension(n)),
                                                static_cast<Eigen::Index>(dimension(n)));
    for (const auto &[w, r] : parts) {
        if (r.n_players() != n) throw Error(Errc::shape, "mixture components differ in player count");
        m += w * r.entries();
    }
    return DensityMatrix(n, std::move(m));
}

} // namespace qnuel
