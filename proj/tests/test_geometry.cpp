#include <doctest.h>

#include <cmath>
#include <random>

#include "leafvein/geometry.hpp"
#include "oracles.hpp"

using namespace leafvein;

namespace {

Polygon square(double lo, double hi) {
    return Polygon({{lo, lo}, {hi, lo}, {hi, hi}, {lo, hi}});
}

}  // namespace

TEST_CASE("polygon_area on known shapes") {
    CHECK(polygon_area(square(0, 1)) == doctest::Approx(1.0));
    CHECK(polygon_area(Polygon({{0, 0}, {2, 0}, {0, 2}})) == doctest::Approx(2.0));
    CHECK_THROWS_AS(Polygon({{0, 0}, {1, 1}}), InvalidPolygonError);
    CHECK_THROWS_AS(Polygon({{0, 0}, {1, 1}, {2, 2}}), InvalidPolygonError);  // zero area
}

TEST_CASE("polygon_area matches the shoelace oracle on random simple polygons") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        auto pts = oracles::random_star_polygon(rng);
        Polygon poly(pts);
        CHECK(polygon_area(poly) == doctest::Approx(oracles::shoelace_area(pts)).epsilon(1e-12));
    }
}

TEST_CASE("polygon_area is translation and rotation invariant") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        auto pts = oracles::random_star_polygon(rng);
        Polygon poly(pts);
        double a0 = poly.area();
        Polygon moved = poly.translated(oracles::uniform(rng, -500, 500),
                                        oracles::uniform(rng, -500, 500));
        Polygon turned = poly.rotated(oracles::uniform(rng, 0, 360), {256, 256});
        CHECK(moved.area() == doctest::Approx(a0).epsilon(1e-9));
        CHECK(turned.area() == doctest::Approx(a0).epsilon(1e-9));
    }
}

TEST_CASE("polygon orientation is normalized to clockwise in image coordinates") {
    // counter-clockwise input (image convention): reversed unit square
    Polygon poly({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
    double s = 0.0;
    const auto& v = poly.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % v.size()];
        s += a.x * b.y - b.x * a.y;
    }
    CHECK(s > 0.0);
}

TEST_CASE("rasterize counts pixel centers inside") {
    RasterMask mask = rasterize(square(0, 10), 20, 20);
    CHECK(mask.count_set() == 100);
    CHECK(mask.test(0, 0));
    CHECK(mask.test(9, 9));
    CHECK_FALSE(mask.test(10, 10));
}

TEST_CASE("rasterize clips to the canvas") {
    Polygon far({{100, 100}, {110, 100}, {110, 110}, {100, 110}});
    CHECK(rasterize(far, 20, 20).count_set() == 0);

    Polygon half({{-5, 0}, {5, 0}, {5, 4}, {-5, 4}});
    CHECK(rasterize(half, 20, 20).count_set() == 5 * 4);
}

TEST_CASE("rasterized pixel count stays within a perimeter band of the area") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        auto pts = oracles::random_star_polygon(rng);
        Polygon poly(pts);
        RasterMask mask = rasterize(poly, 512, 512);
        double count = static_cast<double>(mask.count_set());
        CHECK(std::abs(count - poly.area()) <= poly.perimeter());
    }
}

TEST_CASE("mask_iou basics") {
    Polygon sq = square(0, 10);
    RasterMask a = rasterize(sq, 32, 32);
    CHECK(mask_iou(a, a) == doctest::Approx(1.0));

    RasterMask b = rasterize(sq.translated(15, 15), 32, 32);
    CHECK(mask_iou(a, b) == doctest::Approx(0.0));

    // 10x10 block against the same block shifted 5 px: 50 / 150
    RasterMask c = rasterize(sq.translated(5, 0), 32, 32);
    CHECK(mask_iou(a, c) == doctest::Approx(50.0 / 150.0));

    RasterMask e1(8, 8), e2(8, 8);
    CHECK(mask_iou(e1, e2) == doctest::Approx(1.0));
    RasterMask other(9, 8);
    CHECK_THROWS_AS(mask_iou(e1, other), DimensionMismatchError);
}

TEST_CASE("mask_iou is symmetric and bounded") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        Polygon p1(oracles::random_star_polygon(rng));
        Polygon p2(oracles::random_star_polygon(rng));
        RasterMask a = rasterize(p1, 256, 256);
        RasterMask b = rasterize(p2, 256, 256);
        double ab = mask_iou(a, b);
        CHECK(ab == doctest::Approx(mask_iou(b, a)));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
    }
}

TEST_CASE("shrink_polygon of a square matches the hand-computed offset") {
    Polygon sq = square(0, 100);
    // d = 10000 * (1 - 0.36) / 400 = 16 -> inner square side 68
    CHECK(shrink_offset_distance(sq, 0.6) == doctest::Approx(16.0));
    Polygon inner = shrink_polygon(sq, 0.6);
    CHECK(inner.area() == doctest::Approx(68.0 * 68.0).epsilon(1e-9));
    BoundingBox b = inner.bbox();
    CHECK(b.min_x == doctest::Approx(16.0));
    CHECK(b.max_x == doctest::Approx(84.0));
}

TEST_CASE("shrink_polygon at ratio 1 is the identity") {
    Polygon sq = square(0, 100);
    CHECK(shrink_polygon(sq, 1.0).area() == doctest::Approx(sq.area()));
    CHECK(shrink_polygon(sq, 0.999999).area() == doctest::Approx(sq.area()).epsilon(1e-4));
}

TEST_CASE("shrink_polygon on a thin sliver either collapses or stays inside") {
    Polygon sliver({{0, 0}, {100, 0}, {100, 4}, {0, 4}});
    // d = 400 * 0.64 / 208 = 1.23 < the half height, so the offset survives
    Polygon inner = shrink_polygon(sliver, 0.6);
    for (const Point& p : inner.vertices()) {
        CHECK(sliver.contains(p));
    }
    CHECK(inner.area() < sliver.area());
    // offsetting past the half height consumes it
    CHECK_THROWS_AS(shrink_polygon_at_distance(sliver, 2.5), ShrinkCollapseError);
}

TEST_CASE("shrink_polygon keeps every vertex at least d - 0.5 px inside") {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Point> hull = oracles::random_convex_polygon(rng);
        if (hull.size() < 3) continue;
        Polygon poly(hull);
        double d = shrink_offset_distance(poly, 0.6);
        try {
            Polygon inner = shrink_polygon(poly, 0.6);
            for (const Point& p : inner.vertices()) {
                CHECK(poly.contains(p));
                CHECK(poly.distance_to_boundary(p) >= d - 0.5);
            }
        } catch (const ShrinkCollapseError&) {
            continue;
        }
    }
}

TEST_CASE("ray_to_contour_distance on a square") {
    Polygon sq = square(0, 10);
    CHECK(ray_to_contour_distance({5, 5}, 0.0, sq) == doctest::Approx(5.0));
    CHECK(ray_to_contour_distance({5, 5}, 45.0, sq) == doctest::Approx(5.0 * std::sqrt(2.0)));
    CHECK_THROWS_AS(ray_to_contour_distance({50, 50}, 0.0, sq), RayCastError);
}

TEST_CASE("ray_to_contour_distance matches the marching oracle") {
    std::mt19937_64 rng(16);
    int done = 0;
    while (done < 100) {
        auto pts = oracles::random_star_polygon(rng);
        Polygon poly(pts);
        Point origin{oracles::uniform(rng, 100, 400), oracles::uniform(rng, 100, 400)};
        if (!poly.contains(origin) || poly.distance_to_boundary(origin) < 1.0) continue;
        double angle = oracles::uniform(rng, 0.0, 360.0);
        double fast = ray_to_contour_distance(origin, angle, poly);
        double slow = oracles::march_ray_distance(pts, origin, angle);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-6));
        ++done;
    }
}

TEST_CASE("opposite rays of a convex polygon span the chord") {
    std::mt19937_64 rng(17);
    Polygon rect({{50, 80}, {350, 80}, {350, 200}, {50, 200}});
    for (int trial = 0; trial < 50; ++trial) {
        Point origin{oracles::uniform(rng, 60, 340), oracles::uniform(rng, 90, 190)};
        double angle = oracles::uniform(rng, 0.0, 360.0);
        double fwd = ray_to_contour_distance(origin, angle, rect);
        double bwd = ray_to_contour_distance(origin, angle + 180.0, rect);
        double chord = oracles::march_ray_distance(rect.vertices(), origin, angle) +
                       oracles::march_ray_distance(rect.vertices(), origin, angle + 180.0);
        CHECK(fwd + bwd == doctest::Approx(chord).epsilon(1e-6));
    }
}

TEST_CASE("polar grid construction and indexing") {
    PolarGrid grid(8);
    CHECK(grid.step() == doctest::Approx(45.0));
    CHECK(grid.angle(3) == doctest::Approx(135.0));
    CHECK(grid.index_of(315.0) == 7);
    CHECK_THROWS_AS(PolarGrid(3), ConfigError);
}

TEST_CASE("mask_boundary_length approximates the true perimeter") {
    Polygon sq = square(10, 78);  // 68 x 68
    CHECK(mask_boundary_length(rasterize(sq, 100, 100)) == doctest::Approx(272.0).epsilon(0.02));

    Polygon tilted = sq.rotated(45.0, {44, 44});
    CHECK(mask_boundary_length(rasterize(tilted, 100, 100)) ==
          doctest::Approx(272.0).epsilon(0.06));
}

TEST_CASE("connected_components splits disjoint regions") {
    RasterMask mask(32, 32);
    for (int y = 2; y < 6; ++y)
        for (int x = 2; x < 10; ++x) mask.set(x, y);
    for (int y = 20; y < 30; ++y)
        for (int x = 20; x < 30; ++x) mask.set(x, y);
    auto parts = connected_components(mask);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].count_set() == 100);  // largest first
    CHECK(parts[1].count_set() == 32);
}
