#pragma once

// Independent reference implementations used as test oracles. They are
// deliberately naive and share no code with the library routines they check.

#include "foldlab/cloth.hpp"
#include "foldlab/fold.hpp"
#include "foldlab/mask.hpp"
#include "foldlab/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using foldlab::Mask;

/// Pixel-loop IoU of a against b shifted by (dx, dy), as exact counts.
struct Counts {
    std::int64_t inter = 0;
    std::int64_t uni = 0;
};

inline Counts shifted_counts(const Mask& a, const Mask& b, int dx, int dy)
{
    Counts c;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) {
            const int sx = x - dx, sy = y - dy;
            const bool bv = sx >= 0 && sy >= 0 && sx < b.width() && sy < b.height() && b.at(sx, sy);
            const bool av = a.at(x, y);
            c.inter += av && bv;
            c.uni += av || bv;
        }
    return c;
}

struct BruteAlignment {
    int dx = 0;
    int dy = 0;
    double iou = 0.0;
};

/// Every offset in the square, best IoU by exact rational comparison, then the
/// smaller squared norm, then lexicographic (dx, dy).
inline BruteAlignment brute_align(const Mask& a, const Mask& b, int radius)
{
    bool have = false;
    Counts best{};
    int bdx = 0, bdy = 0;
    for (int dx = -radius; dx <= radius; ++dx)
        for (int dy = -radius; dy <= radius; ++dy) {
            Counts c = shifted_counts(a, b, dx, dy);
            if (c.uni == 0)
                c = {1, 1};
            bool better = !have;
            if (have) {
                const std::int64_t lhs = c.inter * best.uni, rhs = best.inter * c.uni;
                if (lhs != rhs)
                    better = lhs > rhs;
                else {
                    const int n = dx * dx + dy * dy, bn = bdx * bdx + bdy * bdy;
                    better = n != bn ? n < bn : std::pair(dx, dy) < std::pair(bdx, bdy);
                }
            }
            if (better) {
                have = true;
                best = c;
                bdx = dx;
                bdy = dy;
            }
        }
    return {bdx, bdy, static_cast<double>(best.inter) / static_cast<double>(best.uni)};
}

/// All particles within r of pick horizontally, restricted to the band below
/// the highest of them.
inline std::vector<int> brute_grasp(const foldlab::ClothState& s, const foldlab::Vec2& pick, double r, double band)
{
    double top = -1e300;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double dx = s.positions[i].x() - pick.x(), dy = s.positions[i].y() - pick.y();
        if (std::sqrt(dx * dx + dy * dy) <= r)
            top = std::max(top, s.positions[i].z());
    }
    std::vector<int> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double dx = s.positions[i].x() - pick.x(), dy = s.positions[i].y() - pick.y();
        if (std::sqrt(dx * dx + dy * dy) <= r && s.positions[i].z() >= top - band)
            out.push_back(static_cast<int>(i));
    }
    return out;
}

/// Nearest-neighbour 2x upsampling.
inline Mask upsample2(const Mask& m)
{
    Mask out(m.width() * 2, m.height() * 2);
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x)
            out.set(x, y, m.at(x / 2, y / 2));
    return out;
}

inline double plain_iou(const Mask& a, const Mask& b)
{
    const Counts c = shifted_counts(a, b, 0, 0);
    return c.uni == 0 ? 1.0 : static_cast<double>(c.inter) / static_cast<double>(c.uni);
}

struct Box {
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;
    int width() const { return x1 - x0 + 1; }
    int height() const { return y1 - y0 + 1; }
};

inline Box bounding_box(const Mask& m)
{
    Box b{m.width(), m.height(), -1, -1};
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            if (m.at(x, y)) {
                b.x0 = std::min(b.x0, x);
                b.y0 = std::min(b.y0, y);
                b.x1 = std::max(b.x1, x);
                b.y1 = std::max(b.y1, y);
            }
    return b;
}

inline Mask random_mask(std::mt19937_64& rng, int w, int h, double density)
{
    std::bernoulli_distribution bit(density);
    Mask m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            m.set(x, y, bit(rng));
    return m;
}

/// Blobby random mask: a union of random rectangles, more cloth-like than noise.
inline Mask random_blobs(std::mt19937_64& rng, int w, int h, int count)
{
    Mask m(w, h);
    std::uniform_int_distribution<int> px(0, w - 1), py(0, h - 1), size(2, std::max(3, w / 3));
    for (int k = 0; k < count; ++k) {
        const int x0 = px(rng), y0 = py(rng), sw = size(rng), sh = size(rng);
        for (int y = y0; y < std::min(h, y0 + sh); ++y)
            for (int x = x0; x < std::min(w, x0 + sw); ++x)
                m.set(x, y);
    }
    return m;
}

} // namespace oracle
