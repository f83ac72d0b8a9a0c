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

#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>

namespace qnuel {

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    [[nodiscard]] double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    [[nodiscard]] std::string str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }
};

/// A parsed numeric input. `exact` is set for integers, fractions and
/// terminating decimals.
struct Number {
    double value = 0.0;
    std::optional<Rational> exact;
};

namespace detail {

[[nodiscard]] inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

[[nodiscard]] inline std::optional<std::int64_t> parse_int(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

[[nodiscard]] inline Rational reduce(std::int64_t n, std::int64_t d) {
    if (d < 0) n = -n, d = -d;
    const std::int64_t g = std::gcd(n, d);
    return g > 1 ? Rational{n / g, d / g} : Rational{n, d};
}

// Terminating decimal "-12.375" as an exact fraction.
[[nodiscard]] inline std::optional<Rational> parse_decimal(std::string_view s) {
    const auto dot = s.find('.');
    if (dot == std::string_view::npos) {
        if (auto v = parse_int(s)) return Rational{*v, 1};
        return std::nullopt;
    }
    std::string_view frac = s.substr(dot + 1);
    if (frac.size() > 15 || frac.find_first_not_of("0123456789") != std::string_view::npos) return std::nullopt;
    std::string digits(s.substr(0, dot));
    const bool neg = !digits.empty() && digits.front() == '-';
    if (digits.empty() || digits == "-" || digits == "+") digits += '0';
    auto whole = parse_int(digits);
    if (!whole) return std::nullopt;
    std::int64_t den = 1, part = 0;
    for (char ch : frac) {
        den *= 10;
        part = part * 10 + (ch - '0');
    }
    const std::int64_t mag = std::llabs(*whole);
    if (mag > (INT64_MAX - part) / den) return std::nullopt;
    const std::int64_t n = mag * den + part;
    return reduce(neg ? -n : n, den);
}

[[nodiscard]] inline double parse_double(std::string_view s, std::string_view what) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) {
        throw Error(Errc::config, "cannot parse " + std::string(what) + " '" + std::string(s) + "'");
    }
    return v;
}

} // namespace detail

/// Parses "2/3", "0.25", "1e-3", and multiples of pi such as "pi/3",
/// "-2pi/3" or "0.5*pi". Only the rational forms are exact.
[[nodiscard]] inline Number parse_number(std::string_view text) {
    const std::string_view s = detail::trim(text);
    if (const auto pi = s.find("pi"); pi != std::string_view::npos) {
        std::string left(s.substr(0, pi));
        if (!left.empty() && left.back() == '*') left.pop_back();
        std::string_view right = s.substr(pi + 2);
        double k = 1.0;
        if (left == "-") k = -1.0;
        else if (!left.empty() && left != "+") k = parse_number(left).value;
        double d = 1.0;
        if (!right.empty()) {
            if (right.front() != '/') throw Error(Errc::config, "cannot parse '" + std::string(s) + "'");
            d = parse_number(right.substr(1)).value;
        }
        return {k * std::numbers::pi / d, std::nullopt};
    }
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        const auto n = detail::parse_int(detail::trim(s.substr(0, slash)));
        const auto d = detail::parse_int(detail::trim(s.substr(slash + 1)));
        if (!n || !d) {
            const double x = detail::parse_double(detail::trim(s.substr(0, slash)), "number");
            const double y = detail::parse_double(detail::trim(s.substr(slash + 1)), "number");
            if (y == 0.0) throw Error(Errc::config, "division by zero in '" + std::string(s) + "'");
            return {x / y, std::nullopt};
        }
        if (*d == 0) throw Error(Errc::config, "division by zero in '" + std::string(s) + "'");
        const Rational r = detail::reduce(*n, *d);
        return {r.value(), r};
    }
    if (auto r = detail::parse_decimal(s)) return {r->value(), r};
    return {detail::parse_double(s, "number"), std::nullopt};
}

/// Best rational approximation p/q with q <= max_den, if it lies within tol of x.
[[nodiscard]] inline std::optional<Rational> to_fraction(double x, std::int64_t max_den = 1000000, double tol = 1e-12) {
    if (!std::isfinite(x)) return std::nullopt;
    const bool neg = x < 0;
    double r = std::abs(x);
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int it = 0; it < 64; ++it) {
        const double fl = std::floor(r);
        if (fl > 9e15) break;
        const auto a = static_cast<std::int64_t>(fl);
        const std::int64_t p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1, q0 = q1, p1 = p2, q1 = q2;
        if (std::abs(static_cast<double>(p1) / static_cast<double>(q1) - std::abs(x)) <= tol) {
            return Rational{neg ? -p1 : p1, q1};
        }
        const double f = r - fl;
        if (f <= 0.0) break;
        r = 1.0 / f;
    }
    return std::nullopt;
}

} // namespace qnuel
