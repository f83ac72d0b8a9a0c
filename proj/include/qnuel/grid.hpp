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

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace qnuel {

struct Axis {
    std::string name;
    std::vector<double> values;

    /// n points lo, lo + h, ..., hi.
    static Axis linspace(std::string name, double lo, double hi, std::size_t n) {
        if (n < 2) throw Error(Errc::config, "axis '" + name + "' needs at least 2 points");
        Axis ax{std::move(name), {}};
        for (std::size_t i = 0; i < n; ++i) {
            ax.values.push_back(i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
        }
        return ax;
    }

    /// n points lo + i (hi - lo) / n, i < n: covers [lo, hi).
    static Axis half_open(std::string name, double lo, double hi, std::size_t n) {
        if (n < 2) throw Error(Errc::config, "axis '" + name + "' needs at least 2 points");
        Axis ax{std::move(name), {}};
        for (std::size_t i = 0; i < n; ++i) ax.values.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n));
        return ax;
    }

    [[nodiscard]] std::size_t size() const { return values.size(); }
    [[nodiscard]] double step() const { return values.size() < 2 ? 0.0 : values[1] - values[0]; }
};

/// Row-major raster over the axes (first axis slowest) with named real
/// columns per cell and an optional label per cell.
class SweepGrid {
  public:
    SweepGrid() = default;
    SweepGrid(std::vector<Axis> axes, std::vector<std::string> columns, bool labelled = false)
        : axes_(std::move(axes)), columns_(std::move(columns)), labelled_(labelled) {
        std::size_t cells = 1;
        for (const auto &ax : axes_) {
            if (ax.size() < 2) throw Error(Errc::config, "axis '" + ax.name + "' needs at least 2 points");
            cells *= ax.size();
        }
        values_.assign(cells * columns_.size(), std::numeric_limits<double>::quiet_NaN());
        if (labelled_) labels_.assign(cells, "");
    }

    [[nodiscard]] const std::vector<Axis> &axes() const { return axes_; }
    [[nodiscard]] const Axis &axis(std::size_t k) const { return axes_.at(k); }
    [[nodiscard]] const std::vector<std::string> &columns() const { return columns_; }
    [[nodiscard]] bool labelled() const { return labelled_; }
    [[nodiscard]] std::size_t cells() const { return columns_.empty() ? labels_.size() : values_.size() / columns_.size(); }

    [[nodiscard]] std::size_t column(const std::string &name) const {
        const auto it = std::find(columns_.begin(), columns_.end(), name);
        if (it == columns_.end()) throw Error(Errc::config, "no column '" + name + "'");
        return static_cast<std::size_t>(it - columns_.begin());
    }
    [[nodiscard]] bool has_column(const std::string &name) const {
        return std::find(columns_.begin(), columns_.end(), name) != columns_.end();
    }

    [[nodiscard]] std::size_t cell(std::initializer_list<std::size_t> idx) const {
        std::size_t c = 0, k = 0;
        for (std::size_t i : idx) c = c * axes_[k++].size() + i;
        return c;
    }
    [[nodiscard]] std::vector<std::size_t> coords(std::size_t cell) const {
        std::vector<std::size_t> idx(axes_.size());
        for (std::size_t k = axes_.size(); k-- > 0;) {
            idx[k] = cell % axes_[k].size();
            cell /= axes_[k].size();
        }
        return idx;
    }

    [[nodiscard]] double &value(std::size_t cell, std::size_t col) { return values_[cell * columns_.size() + col]; }
    [[nodiscard]] double value(std::size_t cell, std::size_t col) const { return values_[cell * columns_.size() + col]; }
    [[nodiscard]] double value(std::size_t cell, const std::string &col) const { return value(cell, column(col)); }
    [[nodiscard]] std::string &label(std::size_t cell) { return labels_.at(cell); }
    [[nodiscard]] const std::string &label(std::size_t cell) const { return labels_.at(cell); }

    [[nodiscard]] bool populated() const {
        for (double v : values_) {
            if (std::isnan(v)) return false;
        }
        for (const auto &l : labels_) {
            if (l.empty()) return false;
        }
        return true;
    }

  private:
    std::vector<Axis> axes_;
    std::vector<std::string> columns_;
    bool labelled_ = false;
    std::vector<double> values_;
    std::vector<std::string> labels_;
};

enum class GridFormat { csv, json };

namespace detail {

[[nodiscard]] inline std::string format_g17(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

} // namespace detail

inline constexpr const char *kGridSchema = "qnuel.sweep_grid/1";

[[nodiscard]] inline std::string grid_to_csv(const SweepGrid &g) {
    std::string out;
    for (const auto &ax : g.axes()) out += ax.name + ",";
    for (const auto &c : g.columns()) out += c + ",";
    if (g.labelled()) out += "label,";
    out.back() = '\n';
    for (std::size_t cell = 0; cell < g.cells(); ++cell) {
        const auto idx = g.coords(cell);
        std::string row;
        for (std::size_t k = 0; k < idx.size(); ++k) row += detail::format_g17(g.axis(k).values[idx[k]]) + ",";
        for (std::size_t c = 0; c < g.columns().size(); ++c) row += detail::format_g17(g.value(cell, c)) + ",";
        if (g.labelled()) row += g.label(cell) + ",";
        row.back() = '\n';
        out += row;
    }
    return out;
}

[[nodiscard]] inline nlohmann::json grid_to_json(const SweepGrid &g) {
    nlohmann::json j;
    j["schema"] = kGridSchema;
    j["axes"] = nlohmann::json::array();
    for (const auto &ax : g.axes()) j["axes"].push_back({{"name", ax.name}, {"values", ax.values}});
    j["columns"] = g.columns();
    j["labelled"] = g.labelled();
    auto &rows = j["rows"] = nlohmann::json::array();
    for (std::size_t cell = 0; cell < g.cells(); ++cell) {
        nlohmann::json row;
        row["index"] = g.coords(cell);
        std::vector<double> vals;
        for (std::size_t c = 0; c < g.columns().size(); ++c) vals.push_back(g.value(cell, c));
        row["values"] = vals;
        if (g.labelled()) row["label"] = g.label(cell);
        rows.push_back(std::move(row));
    }
    return j;
}

/// Writes the grid: a header row (axis names, value columns, label) and one
/// row per cell, first axis slowest. Floats carry 17 significant digits.
inline void emit_grid(const SweepGrid &g, GridFormat format, const std::string &path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(Errc::io, "cannot open '" + path + "' for writing");
    if (format == GridFormat::csv) {
        os << grid_to_csv(g);
    } else {
        os << grid_to_json(g).dump(1) << '\n';
    }
    if (!os) throw Error(Errc::io, "write to '" + path + "' failed");
}

/// Parsed CSV grid: the header and raw rows (axis coordinates first).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] double number(std::size_t row, std::size_t col) const {
        const std::string &s = rows.at(row).at(col);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) throw Error(Errc::io, "bad number '" + s + "'");
        return v;
    }
};

[[nodiscard]] inline CsvTable read_csv(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(Errc::io, "cannot open '" + path + "'");
    CsvTable t;
    std::string line;
    auto split = [](const std::string &l) {
        std::vector<std::string> cells;
        std::stringstream ss(l);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        return cells;
    };
    if (!std::getline(is, line)) throw Error(Errc::io, "empty csv '" + path + "'");
    t.header = split(line);
    while (std::getline(is, line)) {
        if (!line.empty()) t.rows.push_back(split(line));
    }
    return t;
}

} // namespace qnuel
