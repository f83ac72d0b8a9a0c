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

#include <stdexcept>
#include <string>
#include <string_view>

namespace qnuel {

enum class Errc {
    invalid_player_count,
    invalid_player,
    self_target,
    invalid_probability,
    invalid_angle,
    shape,
    profile,
    weight,
    ordering,
    size,
    unsupported_config,
    config,
    io,
};

inline std::string_view errc_name(Errc code) {
    switch (code) {
    case Errc::invalid_player_count: return "invalid-player-count";
    case Errc::invalid_player: return "invalid-player";
    case Errc::self_target: return "self-target-error";
    case Errc::invalid_probability: return "invalid-probability";
    case Errc::invalid_angle: return "invalid-angle";
    case Errc::shape: return "shape-error";
    case Errc::profile: return "profile-error";
    case Errc::weight: return "weight-error";
    case Errc::ordering: return "ordering-error";
    case Errc::size: return "size-error";
    case Errc::unsupported_config: return "unsupported-config";
    case Errc::config: return "config-error";
    case Errc::io: return "io-error";
    }
    return "unknown-error";
}

/// Every failure raised by the library carries one of the Errc kinds.
class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string &what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

} // namespace qnuel
