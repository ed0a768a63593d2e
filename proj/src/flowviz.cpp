#include "padreg/flowviz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace padreg {

FlowHsv flow_hsv(double dx, double dy, double max_mag) {
    const double mag = std::hypot(dx, dy);
    FlowHsv out;
    if (mag == 0.0) return out;
    double hue = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
    if (hue < 0.0) hue += 360.0;
    if (hue >= 360.0) hue -= 360.0;
    out.hue_deg = hue;
    out.saturation = std::min(mag / max_mag, 1.0);
    return out;
}

std::array<std::uint8_t, 3> hsv_to_rgb(double hue_deg, double saturation, double value) {
    const double c = value * saturation;
    const double hp = hue_deg / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(std::floor(hp)) % 6) {
        case 0: r = c; g = x; break;
        case 1: r = x; g = c; break;
        case 2: g = c; b = x; break;
        case 3: g = x; b = c; break;
        case 4: r = x; b = c; break;
        default: r = c; b = x; break;
    }
    const double m = value - c;
    auto byte = [](double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
    return {byte(r + m), byte(g + m), byte(b + m)};
}

RgbImage flow_to_color(const VectorField& d, std::optional<double> max_mag) {
    double scale;
    if (max_mag) {
        if (!(*max_mag > 0.0)) throw ConfigError("flow_to_color: max_mag must be positive");
        scale = *max_mag;
    } else {
        scale = (d.dx.square() + d.dy.square()).sqrt().maxCoeff();
        if (!(scale > 0.0)) scale = 1.0;
    }
    RgbImage img{static_cast<int>(d.rows()), static_cast<int>(d.cols()), {}};
    img.pixels.resize(3 * static_cast<std::size_t>(d.dx.size()));
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < d.rows(); ++r)
        for (Eigen::Index c = 0; c < d.cols(); ++c) {
            const auto hsv = flow_hsv(d.dx(r, c), d.dy(r, c), scale);
            const auto rgb = hsv_to_rgb(hsv.hue_deg, hsv.saturation);
            img.pixels[i++] = rgb[0];
            img.pixels[i++] = rgb[1];
            img.pixels[i++] = rgb[2];
        }
    return img;
}

}  // namespace padreg
