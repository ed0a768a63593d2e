#pragma once

// Colour-wheel rendering of displacement fields. Hue encodes direction with
// hue 0 (red) for upward motion (dx > 0) and hue 90 for motion toward larger
// columns (dy > 0); saturation encodes magnitude relative to max_mag; zero
// displacement is white.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "padreg/field.hpp"

namespace padreg {

struct RgbImage {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> pixels;  // interleaved r, g, b; row-major

    std::array<std::uint8_t, 3> at(int row, int col) const {
        const auto i = 3 * (static_cast<std::size_t>(row) * width + col);
        return {pixels[i], pixels[i + 1], pixels[i + 2]};
    }
    bool operator==(const RgbImage&) const = default;
};

struct FlowHsv {
    double hue_deg = 0.0;  // [0, 360)
    double saturation = 0.0;
};

FlowHsv flow_hsv(double dx, double dy, double max_mag);

std::array<std::uint8_t, 3> hsv_to_rgb(double hue_deg, double saturation, double value = 1.0);

/// max_mag defaults to the largest displacement magnitude in the field, or
/// 1 when the field is identically zero.
RgbImage flow_to_color(const VectorField& d, std::optional<double> max_mag = std::nullopt);

}  // namespace padreg
