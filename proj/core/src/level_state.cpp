#include "liqd/level_state.hpp"

#include <stdexcept>
#include <string>

namespace liqd {

std::string_view to_string(LevelState s) noexcept {
    switch (s) {
        case LevelState::LowStatic: return "LowStatic";
        case LevelState::Rising: return "Rising";
        case LevelState::HighStatic: return "HighStatic";
        case LevelState::Falling: return "Falling";
        case LevelState::ContainerMoved: return "ContainerMoved";
    }
    return "Unknown";
}

LevelState parse_level_state(std::string_view name) {
    for (LevelState s : kAllLevelStates) {
        if (to_string(s) == name) return s;
    }
    throw std::invalid_argument("unknown level state '" + std::string(name) + "'");
}

}  // namespace liqd
