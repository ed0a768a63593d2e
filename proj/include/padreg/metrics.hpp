#pragma once

// Evaluation metrics: overlap (Dice), boundary distance (HD95), intensity
// similarity (SSIM, MI, MSE), physical plausibility (discrepancy rate) and
// endpoint error against a known field.

#include <optional>
#include <string>

#include <json.hpp>

#include "padreg/field.hpp"

namespace padreg {

inline constexpr int kArteryLabel = 1;
inline constexpr int kVeinLabel = 2;

/// 2|A and B| / (|A| + |B|) for one label; 1 when the label is absent from both.
double dice(const LabelMask& a, const LabelMask& b, int label);

/// Pixels carrying `label` that touch a differently-labelled 4-neighbour or
/// the image edge.
Field<bool> boundary_pixels(const LabelMask& mask, int label);

/// 95th percentile (linear interpolation) of the union of both directed
/// boundary-to-boundary nearest distances. 0 when the label is absent from
/// both masks, +infinity when it is absent from exactly one.
double hd95(const LabelMask& a, const LabelMask& b, int label);

/// Exact squared Euclidean distance from every pixel to the nearest `true`
/// pixel of `sites` (+infinity when there are none).
ScalarField squared_distance_transform(const Field<bool>& sites);

/// Mean local SSIM over all fully-contained 11x11 Gaussian windows (sigma
/// 1.5), dynamic range 1.
double ssim(const ScalarField& a, const ScalarField& b);

/// Mutual information in bits from a bins x bins joint histogram over [0, 1].
double mutual_information(const ScalarField& a, const ScalarField& b, int bins = 32);

/// Shannon entropy in bits of the marginal histogram used by mutual_information.
double entropy(const ScalarField& a, int bins = 32);

double mse(const ScalarField& a, const ScalarField& b);

/// Fraction of pixels whose vertical displacement strictly opposes the sign
/// of the force differential. Zero when df == 0.
double discrepancy_rate(const ScalarField& dx, double df);

/// Mean Euclidean norm of d - d_true.
double endpoint_error(const VectorField& d, const VectorField& d_true);

struct MetricReport {
    std::optional<double> dsc_artery;
    std::optional<double> dsc_vein;
    std::optional<double> hd95_artery;
    std::optional<double> hd95_vein;
    double ssim = 0.0;
    double mi = 0.0;  // non-negative; tables report the negation
    double mse = 0.0;
    double dr = 0.0;  // fraction in [0, 1]
    std::optional<double> epe;
};

struct EvaluationInputs {
    const VectorField* field = nullptr;
    const VectorField* truth = nullptr;
    const ScalarField* warped = nullptr;
    const ScalarField* target = nullptr;
    const LabelMask* mask_warped = nullptr;
    const LabelMask* mask_target = nullptr;
    double df = 0.0;
};

MetricReport evaluate(const EvaluationInputs& in);

/// Flat object; optional metrics are omitted when absent and +infinity is
/// written as the string "Infinity".
nlohmann::json to_json(const MetricReport& report);

}  // namespace padreg
