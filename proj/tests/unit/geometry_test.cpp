#include "sarsim/geometry.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "sarsim/rng.hpp"

using namespace sarsim;
using Catch::Approx;

namespace {

// Independent containment oracle: winding number via signed angles.
bool winding_contains(const Vec2& p, const Polygon& poly) {
    double total = 0.0;
    const auto& v = poly.vertices();
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        const Vec2 a = v[j] - p;
        const Vec2 b = v[i] - p;
        total += std::atan2(a.cross(b), a.dot(b));
    }
    return std::abs(total) > kPi;  // ~2*pi inside, ~0 outside
}

}  // namespace

TEST_CASE("heading normalizes into [-pi, pi)", "[geometry]") {
    REQUIRE(Heading(0.0).radians() == 0.0);
    REQUIRE(Heading(3.0 * kPi / 2.0).radians() == Approx(-kPi / 2.0));
    REQUIRE(Heading(kPi).radians() == Approx(-kPi));
    REQUIRE(Heading(-kPi).radians() == Approx(-kPi));
    REQUIRE(Heading(2.0 * kPi).radians() == Approx(0.0).margin(1e-15));
    REQUIRE(Heading(-7.0 * kPi).radians() == Approx(-kPi));
    for (double t : {-100.0, -3.5, 0.1, 9.9, 1234.5}) {
        const double n = Heading(t).radians();
        REQUIRE(n >= -kPi);
        REQUIRE(n < kPi);
        // Same angle modulo 2*pi.
        REQUIRE(std::remainder(n - t, 2.0 * kPi) == Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("body offset rotation matches worked examples", "[geometry]") {
    SECTION("quarter turn sends right to south") {
        const BodyOffset out = rotate_body_offset({.right = 1.0, .forward = 0.0},
                                                  Heading(kPi / 2.0));
        REQUIRE(out.right == Approx(0.0).margin(1e-15));
        REQUIRE(out.forward == Approx(-1.0));
    }
    SECTION("half turn negates both components") {
        const BodyOffset out = rotate_body_offset({.right = 0.3, .forward = 0.4},
                                                  Heading(kPi));
        REQUIRE(out.right == Approx(-0.3));
        REQUIRE(out.forward == Approx(-0.4));
    }
    SECTION("zero heading is the identity") {
        const BodyOffset out = rotate_body_offset({.right = 0.3, .forward = 0.4}, Heading(0.0));
        REQUIRE(out.right == Approx(0.3));
        REQUIRE(out.forward == Approx(0.4));
    }
}

TEST_CASE("body_to_enu adds the rotated offset at constant altitude", "[geometry]") {
    const EnuPosition p =
        body_to_enu({5.0, 5.0, 2.0}, {.right = 0.3, .forward = 0.4}, Heading(kPi / 2.0));
    REQUIRE(p.x == Approx(5.4));
    REQUIRE(p.y == Approx(4.7));
    REQUIRE(p.z == 2.0);
}

TEST_CASE("rotation preserves norm and composes additively", "[geometry]") {
    Rng rng(2024, "geometry-prop");
    for (int i = 0; i < 10000; ++i) {
        const BodyOffset r{rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0)};
        const double a = rng.uniform(-10.0, 10.0);
        const double b = rng.uniform(-10.0, 10.0);
        const BodyOffset ra = rotate_body_offset(r, Heading(a));
        REQUIRE(std::hypot(ra.right, ra.forward) ==
                Approx(std::hypot(r.right, r.forward)).margin(1e-9));
        const BodyOffset rab = rotate_body_offset(ra, Heading(b));
        const BodyOffset direct = rotate_body_offset(r, Heading(a + b));
        REQUIRE(rab.right == Approx(direct.right).margin(1e-9));
        REQUIRE(rab.forward == Approx(direct.forward).margin(1e-9));
    }
}

TEST_CASE("geo conversion: 111.195 m north is close to one millidegree", "[geometry]") {
    const GeoPoint origin{0.0, 0.0};
    const GeoPoint g = enu_to_geo({0.0, 111.195, 0.0}, origin);
    REQUIRE(g.lat_deg == Approx(0.0010000006597013322).epsilon(1e-12));
    REQUIRE(g.lon_deg == 0.0);
}

TEST_CASE("geo conversion round-trips below a millimeter", "[geometry]") {
    const GeoPoint origin{22.317, 39.104};
    Rng rng(11, "geo-prop");
    for (int i = 0; i < 1000; ++i) {
        const EnuPosition p{rng.uniform(-500.0, 500.0), rng.uniform(-500.0, 500.0), 0.0};
        const EnuPosition back = geo_to_enu(enu_to_geo(p, origin), origin);
        REQUIRE(back.x == Approx(p.x).margin(1e-3));
        REQUIRE(back.y == Approx(p.y).margin(1e-3));
    }
}

TEST_CASE("geo conversion refuses polar origins", "[geometry]") {
    REQUIRE_THROWS_AS(enu_to_geo({1.0, 1.0, 0.0}, {90.0, 0.0}), std::domain_error);
    REQUIRE_THROWS_AS(geo_to_enu({89.95, 0.0}, {89.95, 0.0}), std::domain_error);
}

TEST_CASE("polygon constructor enforces its invariants", "[geometry]") {
    REQUIRE_THROWS_AS(Polygon({{0, 0}, {1, 0}}), std::invalid_argument);
    // Clockwise square.
    REQUIRE_THROWS_AS(Polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), std::invalid_argument);
    // Bowtie.
    REQUIRE_THROWS_AS(Polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), std::invalid_argument);
    // Repeated vertex.
    REQUIRE_THROWS_AS(Polygon({{0, 0}, {1, 0}, {1, 0}, {1, 1}}), std::invalid_argument);
    REQUIRE_NOTHROW(Polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
}

TEST_CASE("polygon area and centroid of the default field", "[geometry]") {
    const Polygon field = Polygon::axis_aligned_rect({0, 0}, {90, 60});
    REQUIRE(field.area() == Approx(5400.0));
    REQUIRE(field.centroid().x == Approx(45.0));
    REQUIRE(field.centroid().y == Approx(30.0));
    const auto bb = field.bounding_box();
    REQUIRE(bb[0].x == 0.0);
    REQUIRE(bb[1].y == 60.0);
    REQUIRE(field.is_convex());
}

TEST_CASE("containment is boundary-inclusive", "[geometry]") {
    const Polygon sq = Polygon::axis_aligned_rect({0, 0}, {10, 6});
    REQUIRE(point_in_polygon({5, 3}, sq));
    REQUIRE_FALSE(point_in_polygon({11, 3}, sq));
    REQUIRE_FALSE(point_in_polygon({5, -0.001}, sq));
    // Edges and corners count as inside.
    REQUIRE(point_in_polygon({5, 0}, sq));
    REQUIRE(point_in_polygon({10, 3}, sq));
    REQUIRE(point_in_polygon({0, 0}, sq));
    REQUIRE(point_in_polygon({10, 6}, sq));
}

TEST_CASE("containment handles concave shapes", "[geometry]") {
    // L-shape: big square minus its upper-right quadrant.
    const Polygon ell({{0, 0}, {10, 0}, {10, 5}, {5, 5}, {5, 10}, {0, 10}});
    REQUIRE(point_in_polygon({2, 2}, ell));
    REQUIRE(point_in_polygon({2, 8}, ell));
    REQUIRE(point_in_polygon({8, 2}, ell));
    REQUIRE_FALSE(point_in_polygon({8, 8}, ell));
    REQUIRE(point_in_polygon({5, 7}, ell));  // on the notch edge
}

TEST_CASE("containment agrees with a winding-number oracle", "[geometry]") {
    const Polygon ell({{0, 0}, {10, 0}, {10, 5}, {5, 5}, {5, 10}, {0, 10}});
    const Polygon tri({{0, 0}, {8, 1}, {3, 7}});
    Rng rng(5, "containment-prop");
    for (int i = 0; i < 5000; ++i) {
        const Vec2 p{rng.uniform(-2.0, 12.0), rng.uniform(-2.0, 12.0)};
        for (const Polygon* poly : {&ell, &tri}) {
            if (distance_to_boundary(p, *poly) < 1e-6) continue;  // oracle is fuzzy there
            REQUIRE(point_in_polygon(p, *poly) == winding_contains(p, *poly));
        }
    }
}

TEST_CASE("inset shrinks a rectangle by the requested margin", "[geometry]") {
    const Polygon sq = Polygon::axis_aligned_rect({0, 0}, {10, 6});
    const Polygon in = sq.inset(1.0);
    const auto bb = in.bounding_box();
    REQUIRE(bb[0].x == Approx(1.0));
    REQUIRE(bb[0].y == Approx(1.0));
    REQUIRE(bb[1].x == Approx(9.0));
    REQUIRE(bb[1].y == Approx(5.0));
    REQUIRE(in.area() == Approx(32.0));

    REQUIRE_THROWS_AS(sq.inset(3.0), std::invalid_argument);   // collapses the short axis
    REQUIRE_THROWS_AS(sq.inset(-0.5), std::invalid_argument);
    REQUIRE(sq.inset(0.0).area() == Approx(60.0));
}

TEST_CASE("inset of a triangle keeps every boundary point at distance d", "[geometry]") {
    const Polygon tri({{0, 0}, {9, 0}, {0, 9}});
    const Polygon in = tri.inset(1.0);
    for (const Vec2& v : in.vertices()) {
        REQUIRE(distance_to_boundary(v, tri) == Approx(1.0).margin(1e-9));
        REQUIRE(point_in_polygon(v, tri));
    }
}

TEST_CASE("clip_line finds the chord of a convex polygon", "[geometry]") {
    const Polygon sq = Polygon::axis_aligned_rect({0, 0}, {10, 6});
    SECTION("vertical line through the interior") {
        const auto t = clip_line(sq, {4.0, -5.0}, {0.0, 1.0});
        REQUIRE(t.has_value());
        REQUIRE(t->first == Approx(5.0));
        REQUIRE(t->second == Approx(11.0));
    }
    SECTION("line that misses") {
        REQUIRE_FALSE(clip_line(sq, {20.0, 0.0}, {0.0, 1.0}).has_value());
    }
    SECTION("diagonal") {
        const auto t = clip_line(sq, {0.0, 0.0}, {1.0, 1.0});
        REQUIRE(t.has_value());
        REQUIRE(t->first == Approx(0.0).margin(1e-12));
        REQUIRE(t->second == Approx(6.0));
    }
}

TEST_CASE("segment distance helpers", "[geometry]") {
    REQUIRE(distance_point_segment({5, 5}, {0, 0}, {10, 0}) == Approx(5.0));
    REQUIRE(distance_point_segment({-3, 4}, {0, 0}, {10, 0}) == Approx(5.0));
    const Vec2 c = closest_point_on_segment({5, 5}, {0, 0}, {10, 0});
    REQUIRE(c.x == Approx(5.0));
    REQUIRE(c.y == Approx(0.0));
    REQUIRE(point_on_segment({5, 0}, {0, 0}, {10, 0}));
    REQUIRE_FALSE(point_on_segment({5, 0.1}, {0, 0}, {10, 0}));
}
