#pragma once

#include "foldlab/demo_log.hpp"
#include "foldlab/mask.hpp"
#include "foldlab/netpbm.hpp"

#include <optional>

namespace foldlab {

/// Closed saturation/value bounds in [0,1] and a half-open hue arc
/// [hue_lo, hue_hi) in degrees. hue_lo > hue_hi wraps through 0; an arc of
/// [0, 360) covers every hue.
struct HsvRange {
    double hue_lo = 0.0;
    double hue_hi = 360.0;
    double sat_lo = 0.0;
    double sat_hi = 1.0;
    double val_lo = 0.0;
    double val_hi = 1.0;

    void validate() const;
    bool contains(double hue, double sat, double val) const;
};

struct Hsv {
    double hue = 0.0;  // degrees in [0, 360); 0 for grey pixels
    double sat = 0.0;
    double val = 0.0;
};

Hsv to_hsv(const Rgb& rgb);

Mask segment_hsv(const RgbImage& image, const HsvRange& range);

/// |a and b| / |a or b|; 1.0 when both masks are empty.
double iou(const Mask& a, const Mask& b);

struct Offset {
    int dx = 0;
    int dy = 0;
    bool operator==(const Offset&) const = default;
};

struct Alignment {
    Offset offset;
    double iou = 0.0;
};

/// Exhaustive search over |dx|,|dy| <= radius for the translation of `b` that
/// maximises iou(a, translate(b, dx, dy)). Ties prefer the smaller Euclidean
/// shift, then the lexicographically smaller (dx, dy).
Alignment align(const Mask& a, const Mask& b, int radius);

inline constexpr int kDefaultAlignRadius = 20;

struct TrialScore {
    double iou = 0.0;
    Offset offset;
    std::optional<double> completion_time;  // seconds
};

/// Aligns `result` onto `goal` and reports the aligned IoU.
TrialScore score_trial(const Mask& result, const Mask& goal, int radius = kDefaultAlignRadius);

nlohmann::ordered_json to_json(const TrialScore& score);

/// Seconds from session_start to the last fold_complete.
double completion_time(const DemonstrationLog& log);

} // namespace foldlab
