#pragma once

// File formats: binary PGM (P5) for images and label masks, Middlebury
// .flo for vector fields, binary PPM (P6) for colour renderings.
//
// .flo layout: "PIEH", int32 width, int32 height (little-endian), then
// height*width (horizontal, vertical) float32 pairs. Fields are stored with
// horizontal = dy and vertical = dx, with no sign change: the vertical
// component is positive toward the probe (smaller row index).

#include <cstdint>
#include <filesystem>

#include "padreg/field.hpp"
#include "padreg/flowviz.hpp"
#include "padreg/physics.hpp"

namespace padreg {

struct PgmData {
    Field<std::uint16_t> values;
    int maxval = 255;
};

PgmData read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Field<std::uint16_t>& values, int maxval);

/// Intensities scaled to [0, 1] by maxval.
ScalarField read_pgm_image(const std::filesystem::path& path);
/// Quantizes [0, 1] intensities to `maxval` levels (255 or 65535).
void write_pgm_image(const std::filesystem::path& path, const ScalarField& image, int maxval = 65535);

/// Raw label values; anything outside {0, 1, 2} is rejected.
LabelMask read_pgm_mask(const std::filesystem::path& path);
void write_pgm_mask(const std::filesystem::path& path, const LabelMask& mask);

VectorField read_flo(const std::filesystem::path& path);
void write_flo(const std::filesystem::path& path, const VectorField& field);

/// Stiffness maps use the .flo layout with horizontal = ky, vertical = kx.
StiffnessMap read_stiffness_flo(const std::filesystem::path& path);
void write_stiffness_flo(const std::filesystem::path& path, const StiffnessMap& k);

RgbImage read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const RgbImage& image);

}  // namespace padreg
