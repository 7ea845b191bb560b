#include "liqd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "liqd/random.hpp"

namespace liqd {
namespace {

void check_gray(int v, const char* name) {
    if (v < 0 || v > 255) throw std::invalid_argument(std::string(name) + " must be in [0, 255]");
}

ContainerRect shifted(const ContainerRect& r, int dx) {
    return ContainerRect{r.top, r.left + dx, r.bottom, r.right + dx};
}

void check_inside(const SceneSpec& spec, const ContainerRect& r) {
    constexpr int kMargin = 2;
    if (r.top < kMargin || r.left < kMargin || r.bottom > spec.height - 1 - kMargin ||
        r.right > spec.width - 1 - kMargin) {
        throw std::invalid_argument("container (" + std::to_string(r.top) + ", " + std::to_string(r.left) + ", " +
                                    std::to_string(r.bottom) + ", " + std::to_string(r.right) +
                                    ") must keep a 2 px margin inside the frame");
    }
}

}  // namespace

void SceneSpec::validate() const {
    if (width < 8 || height < 8) throw std::invalid_argument("scene must be at least 8x8");
    check_inside(*this, container);
    if (wall_thickness < 1) throw std::invalid_argument("wall thickness must be >= 1");
    if (container.right - container.left + 1 <= 2 * wall_thickness) {
        throw std::invalid_argument("container too narrow for its walls");
    }
    if (interior_height() < 2) throw std::invalid_argument("container too short for its walls");
    check_gray(gray_background, "gray_background");
    check_gray(gray_wall, "gray_wall");
    check_gray(gray_air, "gray_air");
    check_gray(gray_liquid, "gray_liquid");
    if (gray_liquid >= gray_air) throw std::invalid_argument("liquid must be darker than air");
    if (gray_air - gray_liquid < 80) throw std::invalid_argument("air/liquid contrast must be >= 80");
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
}

int SceneSpec::level_row(double fill_fraction) const noexcept {
    return interior_bottom() + 1 - static_cast<int>(std::lround(fill_fraction * interior_height()));
}

void Scenario::validate() const {
    if (frames < 2) throw std::invalid_argument("scenario needs at least 2 frames");
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in01(level_start) || !in01(level_end)) throw std::invalid_argument("fill fractions must be in [0, 1]");
    if (!(jitter >= 0.0)) throw std::invalid_argument("jitter must be >= 0");
    switch (kind) {
        case LevelState::Rising:
            if (!(level_end > level_start)) throw std::invalid_argument("Rising needs level_end > level_start");
            break;
        case LevelState::Falling:
            if (!(level_end < level_start)) throw std::invalid_argument("Falling needs level_end < level_start");
            break;
        default:
            if (level_end != level_start) throw std::invalid_argument("static scenarios need level_end == level_start");
            break;
    }
    if (kind == LevelState::ContainerMoved) {
        if (shift_px == 0) throw std::invalid_argument("ContainerMoved needs a non-zero shift");
    } else if (shift_px != 0) {
        throw std::invalid_argument("only ContainerMoved scenarios may shift the container");
    }
}

LevelState scenario_label(const Scenario& scenario) noexcept {
    if (scenario.kind == LevelState::LowStatic || scenario.kind == LevelState::HighStatic) {
        return static_state_for_fill(scenario.level_start);
    }
    return scenario.kind;
}

Sequence render_sequence(const SceneSpec& spec, const Scenario& scenario) {
    spec.validate();
    scenario.validate();
    for (int k = 0; k < scenario.frames; ++k) check_inside(spec, shifted(spec.container, k * scenario.shift_px));

    SplitMix64 jitter_rng(mix_seed(spec.seed, 0x6a177e2));
    Sequence seq;
    const LevelState label = scenario_label(scenario);
    const int t = spec.wall_thickness;
    for (int k = 0; k < scenario.frames; ++k) {
        const double progress = static_cast<double>(k) / (scenario.frames - 1);
        const double fill = scenario.level_start + (scenario.level_end - scenario.level_start) * progress;
        int level = spec.level_row(fill);
        if (scenario.jitter > 0.0) {
            level += static_cast<int>(std::lround(jitter_rng.uniform(-scenario.jitter, scenario.jitter)));
            level = std::clamp(level, spec.interior_top(), spec.interior_bottom() + 1);
        }

        const ContainerRect c = shifted(spec.container, k * scenario.shift_px);
        RasterImage frame(spec.width, spec.height, 3);
        BinaryMask mask(spec.width, spec.height);
        GaussianSampler noise(mix_seed(spec.seed, static_cast<std::uint64_t>(k) + 1));
        for (int y = 0; y < spec.height; ++y) {
            for (int x = 0; x < spec.width; ++x) {
                int gray = spec.gray_background;
                if (y >= c.top && y <= c.bottom && x >= c.left && x <= c.right) {
                    mask.set(x, y);
                    const bool wall = x < c.left + t || x > c.right - t || y > c.bottom - t;
                    if (wall) gray = spec.gray_wall;
                    else gray = y >= level ? spec.gray_liquid : spec.gray_air;
                }
                for (int ch = 0; ch < 3; ++ch) {
                    const double v = spec.noise_sigma > 0.0 ? gray + spec.noise_sigma * noise.next() : gray;
                    frame.at(x, y, ch) = round_to_u8(v);
                }
            }
        }
        seq.frames.push_back(std::move(frame));
        seq.masks.push_back(std::move(mask));
        seq.levels.push_back(static_cast<double>(level));
        if (k > 0) seq.labels.push_back(label);
    }
    return seq;
}

BinaryMask corrupt_mask(const BinaryMask& mask, int holes, int hole_radius, int breaks, std::uint64_t seed) {
    if (holes < 0 || hole_radius < 0 || breaks < 0) throw std::invalid_argument("corruption counts must be >= 0");
    BinaryMask out = mask;
    const BoundingBox box = bounding_box(mask);
    if (box.empty()) return out;
    SplitMix64 rng(seed);

    std::vector<int> rows_cut;
    std::vector<int> cols_cut;
    auto far_from = [](const std::vector<int>& used, int v) {
        return std::all_of(used.begin(), used.end(), [v](int u) { return std::abs(u - v) >= 4; });
    };
    for (int b = 0; b < breaks; ++b) {
        const bool horizontal = rng.below(2) == 0;
        const int lo = horizontal ? box.top : box.left;
        const int hi = horizontal ? box.bottom : box.right;
        // Cuts stay 3 px inside the box ends and 4 px apart from each other.
        int pos = (lo + hi) / 2;
        for (int attempt = 0; attempt < 16; ++attempt) {
            const int candidate = rng.range(std::min(lo + 3, hi), std::max(hi - 3, lo));
            if (far_from(horizontal ? rows_cut : cols_cut, candidate)) {
                pos = candidate;
                break;
            }
        }
        (horizontal ? rows_cut : cols_cut).push_back(pos);
        if (horizontal) {
            for (int x = box.left; x <= box.right; ++x) out.set(x, pos, false);
        } else {
            for (int y = box.top; y <= box.bottom; ++y) out.set(pos, y, false);
        }
    }

    const int r = hole_radius;
    for (int h = 0; h < holes; ++h) {
        const BinaryMask eligible = erode(out, StructuringElement::square(std::min(r + 2, StructuringElement::kMaxReach)));
        std::vector<std::size_t> centers;
        auto bits = eligible.bits();
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i]) centers.push_back(i);
        }
        if (centers.empty()) break;
        const std::size_t pick = centers[rng.below(centers.size())];
        const int cx = static_cast<int>(pick % static_cast<std::size_t>(out.width()));
        const int cy = static_cast<int>(pick / static_cast<std::size_t>(out.width()));
        for (int dy = -r; dy <= r; ++dy) {
            for (int dx = -r; dx <= r; ++dx) {
                if (dx * dx + dy * dy <= r * r) out.set(cx + dx, cy + dy, false);
            }
        }
    }
    return out;
}

LevelState standard_kind(std::size_t index) noexcept { return kAllLevelStates[index % kLevelStateCount]; }

Scenario standard_scenario(LevelState kind, std::uint64_t seed) {
    SplitMix64 rng(mix_seed(seed, 0x5ce7a210));
    Scenario s;
    s.kind = kind;
    s.frames = rng.range(4, 7);
    switch (kind) {
        case LevelState::LowStatic:
            s.level_start = s.level_end = rng.uniform(0.1, 0.4);
            break;
        case LevelState::HighStatic:
            s.level_start = s.level_end = rng.uniform(0.6, 0.9);
            break;
        case LevelState::Rising:
            s.level_start = rng.uniform(0.1, 0.4);
            s.level_end = rng.uniform(0.6, 0.9);
            break;
        case LevelState::Falling:
            s.level_start = rng.uniform(0.6, 0.9);
            s.level_end = rng.uniform(0.1, 0.4);
            break;
        case LevelState::ContainerMoved: {
            // Low fills keep the air column (which always changes) tall.
            s.level_start = s.level_end = rng.uniform(0.1, 0.3);
            const int magnitude = rng.range(3, 6);
            s.shift_px = rng.below(2) == 0 ? magnitude : -magnitude;
            break;
        }
    }
    return s;
}

}  // namespace liqd
