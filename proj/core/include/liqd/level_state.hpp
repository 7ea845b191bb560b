#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace liqd {

/// Liquid-level state of one frame pair. The enumeration order is part of the
/// contract: it fixes model output indices and argmax tie-breaking.
enum class LevelState : std::uint8_t {
    LowStatic = 0,
    Rising = 1,
    HighStatic = 2,
    Falling = 3,
    ContainerMoved = 4,
};

inline constexpr std::size_t kLevelStateCount = 5;

inline constexpr std::array<LevelState, kLevelStateCount> kAllLevelStates = {
    LevelState::LowStatic, LevelState::Rising, LevelState::HighStatic, LevelState::Falling,
    LevelState::ContainerMoved};

constexpr std::size_t index_of(LevelState s) noexcept { return static_cast<std::size_t>(s); }

/// Stable serialized name ("LowStatic", "Rising", ...).
std::string_view to_string(LevelState s) noexcept;

/// Inverse of to_string; throws std::invalid_argument on unknown names.
LevelState parse_level_state(std::string_view name);

/// Static label implied by a fill fraction: below one half is LowStatic.
constexpr LevelState static_state_for_fill(double fill_fraction) noexcept {
    return fill_fraction < 0.5 ? LevelState::LowStatic : LevelState::HighStatic;
}

}  // namespace liqd
