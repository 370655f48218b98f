#include "sarsim/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sarsim {

namespace {

constexpr double kDeg2Rad = kPi / 180.0;
constexpr double kRad2Deg = 180.0 / kPi;

double signed_area(const std::vector<Vec2>& v) {
    double a = 0.0;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        a += v[j].cross(v[i]);
    }
    return 0.5 * a;
}

// Proper crossing test for simplicity validation (shared endpoints excluded
// by the caller's index arithmetic).
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double d1 = (b - a).cross(c - a);
    const double d2 = (b - a).cross(d - a);
    const double d3 = (d - c).cross(a - c);
    const double d4 = (d - c).cross(b - c);
    if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return true;
    if (d1 == 0 && point_on_segment(c, a, b, 0.0)) return true;
    if (d2 == 0 && point_on_segment(d, a, b, 0.0)) return true;
    if (d3 == 0 && point_on_segment(a, c, d, 0.0)) return true;
    if (d4 == 0 && point_on_segment(b, c, d, 0.0)) return true;
    return false;
}

}  // namespace

BodyOffset rotate_body_offset(const BodyOffset& r, Heading heading) {
    const double s = std::sin(heading.radians());
    const double c = std::cos(heading.radians());
    return {
        .right = r.forward * s + r.right * c,
        .forward = r.forward * c - r.right * s,
    };
}

EnuPosition body_to_enu(const EnuPosition& pose, const BodyOffset& r, Heading heading) {
    const BodyOffset e = rotate_body_offset(r, heading);
    return {pose.x + e.right, pose.y + e.forward, pose.z};
}

GeoPoint enu_to_geo(const EnuPosition& p, const GeoPoint& origin) {
    if (std::abs(origin.lat_deg) > 89.9) {
        throw std::domain_error("enu_to_geo: origin too close to a pole");
    }
    const double lat = origin.lat_deg + (p.y / kEarthRadiusM) * kRad2Deg;
    const double lon =
        origin.lon_deg +
        (p.x / (kEarthRadiusM * std::cos(origin.lat_deg * kDeg2Rad))) * kRad2Deg;
    return {lat, lon};
}

EnuPosition geo_to_enu(const GeoPoint& g, const GeoPoint& origin) {
    if (std::abs(origin.lat_deg) > 89.9) {
        throw std::domain_error("geo_to_enu: origin too close to a pole");
    }
    const double y = (g.lat_deg - origin.lat_deg) * kDeg2Rad * kEarthRadiusM;
    const double x = (g.lon_deg - origin.lon_deg) * kDeg2Rad * kEarthRadiusM *
                     std::cos(origin.lat_deg * kDeg2Rad);
    return {x, y, 0.0};
}

Polygon::Polygon(std::vector<Vec2> vertices) : verts_(std::move(vertices)) {
    const std::size_t n = verts_.size();
    if (n < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        if (distance(verts_[i], verts_[j]) < 1e-12) {
            throw std::invalid_argument("polygon has repeated consecutive vertices");
        }
    }
    const double a = signed_area(verts_);
    if (a <= 0.0) {
        throw std::invalid_argument("polygon vertices must be counter-clockwise");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) {
            // Skip adjacent edges (they share an endpoint by construction).
            if (k == i + 1 || (i == 0 && k == n - 1)) continue;
            if (segments_intersect(verts_[i], verts_[(i + 1) % n], verts_[k],
                                   verts_[(k + 1) % n])) {
                throw std::invalid_argument("polygon is self-intersecting");
            }
        }
    }
}

Polygon Polygon::axis_aligned_rect(const Vec2& lo, const Vec2& hi) {
    return Polygon({{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}});
}

double Polygon::area() const { return signed_area(verts_); }

Vec2 Polygon::centroid() const {
    double a = 0.0;
    Vec2 c{0.0, 0.0};
    for (std::size_t i = 0, j = verts_.size() - 1; i < verts_.size(); j = i++) {
        const double w = verts_[j].cross(verts_[i]);
        a += w;
        c.x += (verts_[j].x + verts_[i].x) * w;
        c.y += (verts_[j].y + verts_[i].y) * w;
    }
    a *= 0.5;
    return {c.x / (6.0 * a), c.y / (6.0 * a)};
}

bool Polygon::is_convex() const {
    const std::size_t n = verts_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = verts_[i];
        const Vec2& b = verts_[(i + 1) % n];
        const Vec2& c = verts_[(i + 2) % n];
        if ((b - a).cross(c - b) < -1e-12) return false;
    }
    return true;
}

std::array<Vec2, 2> Polygon::bounding_box() const {
    Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Vec2 hi{-lo.x, -lo.y};
    for (const Vec2& v : verts_) {
        lo.x = std::min(lo.x, v.x);
        lo.y = std::min(lo.y, v.y);
        hi.x = std::max(hi.x, v.x);
        hi.y = std::max(hi.y, v.y);
    }
    return {lo, hi};
}

namespace {

// Shift every edge line inward by d (outward for negative d), then intersect
// consecutive lines.
std::vector<Vec2> offset_edges(const std::vector<Vec2>& verts, double d) {
    const std::size_t n = verts.size();
    std::vector<Vec2> pts(n), dirs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e = verts[(i + 1) % n] - verts[i];
        const Vec2 inward = e.perp() * (1.0 / e.norm());
        pts[i] = verts[i] + inward * d;
        dirs[i] = e;
    }
    std::vector<Vec2> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + n - 1) % n;  // previous edge
        const double denom = dirs[j].cross(dirs[i]);
        if (std::abs(denom) < 1e-12) {
            // Collinear consecutive edges: the shifted lines coincide.
            out[i] = pts[i];
            continue;
        }
        const double t = (pts[i] - pts[j]).cross(dirs[i]) / denom;
        out[i] = pts[j] + dirs[j] * t;
    }
    return out;
}

}  // namespace

Polygon Polygon::inset(double d) const {
    if (!is_convex()) throw std::invalid_argument("inset requires a convex polygon");
    if (d < 0.0) throw std::invalid_argument("inset distance must be non-negative");
    if (d == 0.0) return *this;
    try {
        Polygon result(offset_edges(verts_, d));
        return result;
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("inset distance collapses the polygon");
    }
}

Polygon Polygon::inflate(double d) const {
    if (!is_convex()) throw std::invalid_argument("inflate requires a convex polygon");
    if (d < 0.0) throw std::invalid_argument("inflate distance must be non-negative");
    if (d == 0.0) return *this;
    return Polygon(offset_edges(verts_, -d));
}

bool point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b, double eps) {
    const Vec2 ab = b - a;
    const Vec2 ap = p - a;
    if (std::abs(ab.cross(ap)) > eps * std::max(1.0, ab.norm())) return false;
    const double t = ab.dot(ap);
    return t >= -eps && t <= ab.dot(ab) + eps;
}

bool point_in_polygon(const Vec2& p, const Polygon& poly) {
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        if (point_on_segment(p, v[j], v[i])) return true;
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        if ((v[i].y > p.y) != (v[j].y > p.y)) {
            const double xint =
                v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

Vec2 closest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    if (len2 == 0.0) return a;
    double t = (p - a).dot(ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return a + ab * t;
}

double distance_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    return distance(p, closest_point_on_segment(p, a, b));
}

double distance_to_boundary(const Vec2& p, const Polygon& poly) {
    const auto& v = poly.vertices();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        best = std::min(best, distance_point_segment(p, v[j], v[i]));
    }
    return best;
}

std::optional<std::pair<double, double>> clip_line(const Polygon& convex, const Vec2& p0,
                                                   const Vec2& dir) {
    double t_enter = -std::numeric_limits<double>::infinity();
    double t_exit = std::numeric_limits<double>::infinity();
    const auto& v = convex.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e = v[(i + 1) % n] - v[i];
        const Vec2 inward = e.perp();
        const double denom = inward.dot(dir);
        const double dist = inward.dot(v[i] - p0);
        if (std::abs(denom) < 1e-15) {
            if (dist > 0.0) return std::nullopt;  // parallel and outside
            continue;
        }
        const double t = dist / denom;
        if (denom > 0.0) {
            t_enter = std::max(t_enter, t);
        } else {
            t_exit = std::min(t_exit, t);
        }
        if (t_enter > t_exit) return std::nullopt;
    }
    return std::make_pair(t_enter, t_exit);
}

}  // namespace sarsim
