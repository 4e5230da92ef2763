#include "foldlab/scoring.hpp"

#include "foldlab/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

namespace foldlab {
namespace {

void require_same_size(const Mask& a, const Mask& b)
{
    if (a.width() != b.width() || a.height() != b.height())
        throw Error(ErrorCode::DimensionMismatch, "masks differ in size");
}

double normalize_hue(double h)
{
    h = std::fmod(h, 360.0);
    return h < 0.0 ? h + 360.0 : h;
}

/// Rows packed 64 pixels per word, bit (x % 64) of word (x / 64).
class BitRows {
public:
    explicit BitRows(const Mask& m)
        : width_(m.width()), height_(m.height()), words_((m.width() + 63) / 64),
          bits_(static_cast<std::size_t>(words_) * m.height(), 0)
    {
        for (int y = 0; y < height_; ++y)
            for (int x = 0; x < width_; ++x)
                if (m.at(x, y))
                    row(y)[x / 64] |= std::uint64_t{1} << (x % 64);
    }

    int words() const { return words_; }
    int height() const { return height_; }
    std::uint64_t* row(int y) { return bits_.data() + static_cast<std::size_t>(y) * words_; }
    const std::uint64_t* row(int y) const { return bits_.data() + static_cast<std::size_t>(y) * words_; }

    /// Copy with every row moved dx columns (positive = towards larger x).
    BitRows shifted_columns(int dx) const
    {
        BitRows out = *this;
        std::fill(out.bits_.begin(), out.bits_.end(), 0);
        const int word_shift = std::abs(dx) / 64;
        const int bit_shift = std::abs(dx) % 64;
        for (int y = 0; y < height_; ++y) {
            const std::uint64_t* src = row(y);
            std::uint64_t* dst = out.row(y);
            for (int w = 0; w < words_; ++w) {
                std::uint64_t v = 0;
                if (dx >= 0) {
                    const int s = w - word_shift;
                    if (s >= 0)
                        v = bit_shift ? src[s] << bit_shift : src[s];
                    if (bit_shift && s - 1 >= 0)
                        v |= src[s - 1] >> (64 - bit_shift);
                } else {
                    const int s = w + word_shift;
                    if (s < words_)
                        v = bit_shift ? src[s] >> bit_shift : src[s];
                    if (bit_shift && s + 1 < words_)
                        v |= src[s + 1] << (64 - bit_shift);
                }
                dst[w] = v;
            }
            const int tail = width_ % 64;
            if (tail)
                dst[words_ - 1] &= (std::uint64_t{1} << tail) - 1;
        }
        return out;
    }

private:
    int width_;
    int height_;
    int words_;
    std::vector<std::uint64_t> bits_;
};

struct Counts {
    std::int64_t inter = 0;
    std::int64_t uni = 0;
};

// a/b > c/d for unions that may be zero (0/0 counts as 1).
int compare_ratio(const Counts& lhs, const Counts& rhs)
{
    const auto num = [](const Counts& c) { return c.uni == 0 ? 1 : c.inter; };
    const auto den = [](const Counts& c) { return c.uni == 0 ? 1 : c.uni; };
    const std::int64_t l = num(lhs) * den(rhs);
    const std::int64_t r = num(rhs) * den(lhs);
    return (l > r) - (l < r);
}

double ratio(const Counts& c) { return c.uni == 0 ? 1.0 : static_cast<double>(c.inter) / static_cast<double>(c.uni); }

} // namespace

void HsvRange::validate() const
{
    const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(sat_lo) || !unit(sat_hi) || !unit(val_lo) || !unit(val_hi) || sat_lo > sat_hi || val_lo > val_hi)
        throw Error(ErrorCode::InvalidSpec, "saturation/value bounds must be ordered within [0,1]");
    if (!std::isfinite(hue_lo) || !std::isfinite(hue_hi) || hue_lo < 0.0 || hue_hi > 360.0 || hue_lo >= 360.0)
        throw Error(ErrorCode::InvalidSpec, "hue bounds must lie in [0,360]");
}

bool HsvRange::contains(double hue, double sat, double val) const
{
    if (sat < sat_lo || sat > sat_hi || val < val_lo || val > val_hi)
        return false;
    if (hue_lo < hue_hi)
        return hue >= hue_lo && hue < hue_hi;
    if (hue_lo > hue_hi)
        return hue >= hue_lo || hue < hue_hi;
    return false;
}

Hsv to_hsv(const Rgb& rgb)
{
    const double r = rgb.r / 255.0;
    const double g = rgb.g / 255.0;
    const double b = rgb.b / 255.0;
    const double hi = std::max({r, g, b});
    const double lo = std::min({r, g, b});
    const double chroma = hi - lo;

    Hsv out;
    out.val = hi;
    out.sat = hi > 0.0 ? chroma / hi : 0.0;
    if (chroma > 0.0) {
        double h = 0.0;
        if (hi == r)
            h = 60.0 * ((g - b) / chroma);
        else if (hi == g)
            h = 60.0 * ((b - r) / chroma + 2.0);
        else
            h = 60.0 * ((r - g) / chroma + 4.0);
        out.hue = normalize_hue(h);
    }
    return out;
}

Mask segment_hsv(const RgbImage& image, const HsvRange& range)
{
    if (image.width < 1 || image.height < 1 || image.pixels.empty())
        throw Error(ErrorCode::EmptyImage, "image has no pixels");
    range.validate();
    Mask mask(image.width, image.height);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            const Hsv hsv = to_hsv(image.at(x, y));
            if (range.contains(hsv.hue, hsv.sat, hsv.val))
                mask.set(x, y);
        }
    }
    return mask;
}

double iou(const Mask& a, const Mask& b)
{
    require_same_size(a, b);
    Counts c;
    const auto& ab = a.bits();
    const auto& bb = b.bits();
    for (std::size_t i = 0; i < ab.size(); ++i) {
        c.inter += ab[i] & bb[i];
        c.uni += ab[i] | bb[i];
    }
    return ratio(c);
}

Alignment align(const Mask& a, const Mask& b, int radius)
{
    require_same_size(a, b);
    if (radius < 0)
        throw Error(ErrorCode::InvalidSpec, "alignment radius must be non-negative");

    const BitRows rows_a(a);
    const BitRows rows_b(b);
    const std::int64_t area_a = static_cast<std::int64_t>(a.area());
    const int h = a.height();
    const int words = rows_a.words();

    Alignment best;
    Counts best_counts{0, -1};
    for (int dx = -radius; dx <= radius; ++dx) {
        const BitRows shifted = rows_b.shifted_columns(dx);
        std::vector<std::int64_t> row_area(static_cast<std::size_t>(h), 0);
        for (int y = 0; y < h; ++y)
            for (int w = 0; w < words; ++w)
                row_area[y] += std::popcount(shifted.row(y)[w]);

        for (int dy = -radius; dy <= radius; ++dy) {
            Counts c;
            std::int64_t area_b = 0;
            // Row y of the translated mask is row y - dy of `b`.
            for (int y = std::max(0, dy); y < std::min(h, h + dy); ++y) {
                const std::uint64_t* ra = rows_a.row(y);
                const std::uint64_t* rb = shifted.row(y - dy);
                for (int w = 0; w < words; ++w)
                    c.inter += std::popcount(ra[w] & rb[w]);
                area_b += row_area[y - dy];
            }
            c.uni = area_a + area_b - c.inter;

            bool better = best_counts.uni < 0;
            if (!better) {
                const int cmp = compare_ratio(c, best_counts);
                if (cmp > 0) {
                    better = true;
                } else if (cmp == 0) {
                    const int norm = dx * dx + dy * dy;
                    const int best_norm = best.offset.dx * best.offset.dx + best.offset.dy * best.offset.dy;
                    better = norm < best_norm
                             || (norm == best_norm
                                 && std::pair(dx, dy) < std::pair(best.offset.dx, best.offset.dy));
                }
            }
            if (better) {
                best_counts = c;
                best.offset = {dx, dy};
                best.iou = ratio(c);
            }
        }
    }
    return best;
}

TrialScore score_trial(const Mask& result, const Mask& goal, int radius)
{
    const Alignment al = align(goal, result, radius);
    return TrialScore{al.iou, al.offset, std::nullopt};
}

nlohmann::ordered_json to_json(const TrialScore& score)
{
    nlohmann::ordered_json j;
    j["iou"] = score.iou;
    j["dx"] = score.offset.dx;
    j["dy"] = score.offset.dy;
    j["completion_time"] = score.completion_time ? nlohmann::ordered_json(*score.completion_time) : nullptr;
    return j;
}

double completion_time(const DemonstrationLog& log)
{
    const LogEvent* start = nullptr;
    const LogEvent* done = nullptr;
    for (const auto& e : log.events) {
        if (e.kind == EventKind::SessionStart && !start)
            start = &e;
        if (e.kind == EventKind::FoldComplete)
            done = &e;
    }
    if (!start)
        throw Error(ErrorCode::SchemaError, "log has no session_start");
    if (!done)
        throw Error(ErrorCode::NoFoldCompleted, "log has no fold_complete");
    return static_cast<double>(done->t_ms - start->t_ms) / 1000.0;
}

} // namespace foldlab
