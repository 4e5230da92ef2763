#include "support.hpp"

#include "foldlab/error.hpp"
#include "foldlab/goals.hpp"
#include "foldlab/scoring.hpp"

#include <doctest.h>

#include <random>

using namespace foldlab;

namespace {

RgbImage uniform(int w, int h, Rgb colour)
{
    return {w, h, std::vector<Rgb>(static_cast<std::size_t>(w * h), colour)};
}

constexpr Rgb kBlue{0, 0, 255};
constexpr Rgb kRed{255, 0, 0};

HsvRange blue_range()
{
    HsvRange r;
    r.hue_lo = 200;
    r.hue_hi = 260;
    r.sat_lo = 0.5;
    r.val_lo = 0.5;
    return r;
}

Mask filled_rect(int w, int h, int x0, int y0, int rw, int rh)
{
    Mask m(w, h);
    for (int y = y0; y < y0 + rh; ++y)
        for (int x = x0; x < x0 + rw; ++x)
            m.set(x, y);
    return m;
}

DemonstrationLog log_with(std::initializer_list<std::pair<std::int64_t, EventKind>> events)
{
    DemonstrationLog log;
    for (const auto& [t, kind] : events)
        log.events.push_back({t, kind, nlohmann::ordered_json::object()});
    return log;
}

} // namespace

TEST_SUITE("scoring")
{
    TEST_CASE("segment_hsv on uniform and split images")
    {
        const Mask blue = segment_hsv(uniform(16, 8, kBlue), blue_range());
        CHECK(blue.area() == 16u * 8u);
        const Mask red = segment_hsv(uniform(16, 8, kRed), blue_range());
        CHECK(red.area() == 0u);

        RgbImage split = uniform(16, 8, kRed);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x)
                split.pixels[static_cast<std::size_t>(y * 16 + x)] = kBlue;
        CHECK(segment_hsv(split, blue_range()) == filled_rect(16, 8, 0, 0, 8, 8));
    }

    TEST_CASE("segment_hsv rejects an empty image")
    {
        CHECK_THROWS_AS(segment_hsv(RgbImage{}, blue_range()), Error);
        try {
            segment_hsv(RgbImage{}, blue_range());
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::EmptyImage);
        }
    }

    TEST_CASE("standard RGB to HSV conversion")
    {
        CHECK(to_hsv(kBlue).hue == doctest::Approx(240.0));
        CHECK(to_hsv(kRed).hue == doctest::Approx(0.0));
        CHECK(to_hsv({0, 255, 0}).hue == doctest::Approx(120.0));
        CHECK(to_hsv({255, 0, 255}).hue == doctest::Approx(300.0));
        const Hsv grey = to_hsv({128, 128, 128});
        CHECK(grey.sat == 0.0);
        CHECK(grey.val == doctest::Approx(128.0 / 255.0));
    }

    TEST_CASE("complementary hue arcs partition every pixel")
    {
        std::mt19937_64 rng(7);
        std::uniform_int_distribution<int> byte(0, 255);
        RgbImage img{32, 32, {}};
        for (int i = 0; i < 32 * 32; ++i)
            img.pixels.push_back({static_cast<std::uint8_t>(byte(rng)), static_cast<std::uint8_t>(byte(rng)),
                                  static_cast<std::uint8_t>(byte(rng))});
        for (const auto& [lo, hi] : {std::pair{30.0, 200.0}, std::pair{350.0, 10.0}, std::pair{0.0, 120.0}}) {
            HsvRange a, b;
            a.hue_lo = lo;
            a.hue_hi = hi;
            b.hue_lo = hi;
            b.hue_hi = lo;
            const Mask ma = segment_hsv(img, a), mb = segment_hsv(img, b);
            for (int y = 0; y < 32; ++y)
                for (int x = 0; x < 32; ++x)
                    CHECK(ma.at(x, y) != mb.at(x, y));
        }
    }

    TEST_CASE("iou examples")
    {
        const Mask a = filled_rect(200, 100, 0, 0, 100, 100);
        CHECK(iou(a, a) == 1.0);
        CHECK(iou(a, filled_rect(200, 100, 100, 0, 100, 100)) == 0.0);
        CHECK(iou(a, filled_rect(200, 100, 50, 0, 100, 100)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        CHECK(iou(Mask(8, 8), Mask(8, 8)) == 1.0);
        CHECK_THROWS_AS(iou(Mask(8, 8), Mask(8, 9)), Error);
    }

    TEST_CASE("iou is symmetric and bounded")
    {
        std::mt19937_64 rng(11);
        for (int t = 0; t < 50; ++t) {
            const Mask a = oracle::random_blobs(rng, 40, 30, 4), b = oracle::random_blobs(rng, 40, 30, 4);
            const double ab = iou(a, b);
            CHECK(ab == iou(b, a));
            CHECK(ab >= 0.0);
            CHECK(ab <= 1.0);
            CHECK(ab == doctest::Approx(oracle::plain_iou(a, b)).epsilon(1e-15));
        }
    }

    TEST_CASE("align recovers a constructed shift")
    {
        const Mask a = filled_rect(64, 64, 20, 20, 15, 10);
        const Alignment r = align(a, translate(a, 3, -2), 5);
        CHECK(r.offset == Offset{-3, 2});
        CHECK(r.iou == 1.0);
        const Alignment same = align(a, a, 5);
        CHECK(same.offset == Offset{0, 0});
        CHECK(same.iou == 1.0);
        CHECK_THROWS_AS(align(Mask(8, 8), Mask(9, 8), 2), Error);
    }

    TEST_CASE("align matches the brute-force oracle on random masks")
    {
        std::mt19937_64 rng(2024);
        for (int t = 0; t < 40; ++t) {
            const Mask a = t % 2 ? oracle::random_mask(rng, 64, 64, 0.3) : oracle::random_blobs(rng, 64, 64, 5);
            const Mask b = t % 2 ? oracle::random_mask(rng, 64, 64, 0.3) : oracle::random_blobs(rng, 64, 64, 5);
            const Alignment got = align(a, b, 4);
            const auto want = oracle::brute_align(a, b, 4);
            CHECK(got.offset == Offset{want.dx, want.dy});
            CHECK(got.iou == want.iou);
        }
    }

    TEST_CASE("aligned iou dominates the unaligned one")
    {
        std::mt19937_64 rng(5);
        for (int t = 0; t < 30; ++t) {
            const Mask a = oracle::random_blobs(rng, 48, 48, 3), b = oracle::random_blobs(rng, 48, 48, 3);
            CHECK(align(a, b, 3).iou >= iou(a, b));
        }
    }

    TEST_CASE("shift recovery for every offset in the radius")
    {
        std::mt19937_64 rng(9);
        const int radius = 3;
        for (int t = 0; t < 10; ++t) {
            Mask a = oracle::random_blobs(rng, 40, 40, 3);
            if (a.area() == 0)
                continue;
            for (int dx = -radius; dx <= radius; ++dx)
                for (int dy = -radius; dy <= radius; ++dy) {
                    const Mask moved = translate(a, dx, dy);
                    if (2 * moved.area() < a.area())
                        continue;
                    const Alignment r = align(a, moved, radius);
                    CHECK(r.offset == Offset{-dx, -dy});
                }
        }
    }

    TEST_CASE("shift recovery is exact for an isolated shape")
    {
        const Mask a = filled_rect(40, 40, 12, 14, 9, 7);
        for (int dx = -4; dx <= 4; ++dx)
            for (int dy = -4; dy <= 4; ++dy) {
                const Alignment r = align(a, translate(a, dx, dy), 4);
                CHECK(r.offset == Offset{-dx, -dy});
                CHECK(r.iou == 1.0);
            }
    }

    TEST_CASE("score_trial")
    {
        const Mask goal = filled_rect(100, 100, 20, 20, 60, 60);
        const TrialScore same = score_trial(goal, goal);
        CHECK(same.iou == 1.0);
        CHECK(same.offset == Offset{0, 0});
        CHECK_FALSE(same.completion_time.has_value());

        // Idealized quarter fold against the flat square: a 30x30 corner of a
        // 60x60 square overlaps it entirely, so the best IoU is 900/3600.
        const Mask quarter = filled_rect(100, 100, 20, 20, 30, 30);
        CHECK(score_trial(goal, quarter).iou == 0.25);
        CHECK_THROWS_AS(score_trial(goal, Mask(50, 50)), Error);
    }

    TEST_CASE("simulated G1 against the flat cloth follows the area ratio")
    {
        const ClothSpec cloth;
        const FoldParams params;
        GridSpec grid;
        grid.pixels_per_side = 100;
        const Mask flat = rasterize_topdown(create_cloth(cloth, grid.center()), grid);
        const Mask g1 = render_goal(find_goal("G1"), cloth, params, grid);
        const TrialScore s = score_trial(flat, g1);
        const auto want = oracle::brute_align(flat, g1, kDefaultAlignRadius);
        CHECK(s.iou == want.iou);
        // The quarter-folded cloth sits inside the flat footprint, so the
        // aligned IoU is close to the ideal quarter ratio.
        CHECK(s.iou == doctest::Approx(0.25).epsilon(0.1));
    }

    TEST_CASE("completion_time")
    {
        CHECK(completion_time(log_with({{0, EventKind::SessionStart}, {1000, EventKind::FoldStart},
                                        {240000, EventKind::FoldComplete}}))
              == 240.0);
        CHECK(completion_time(log_with({{0, EventKind::SessionStart},
                                        {10, EventKind::FoldStart},
                                        {2000, EventKind::FoldComplete},
                                        {3000, EventKind::Reset},
                                        {4000, EventKind::FoldStart},
                                        {5500, EventKind::FoldComplete}}))
              == 5.5);
        try {
            completion_time(log_with({{0, EventKind::SessionStart}}));
            FAIL("expected NoFoldCompleted");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NoFoldCompleted);
        }
    }

    TEST_CASE("score serializes with its offset")
    {
        TrialScore s;
        s.iou = 0.5;
        s.offset = {1, -2};
        s.completion_time = 12.5;
        const auto j = to_json(s);
        CHECK(j["iou"] == 0.5);
        CHECK(j.dump().find("completion_time") != std::string::npos);
    }
}
