#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace sarsim {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEarthRadiusM = 6371000.0;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    // Left-hand perpendicular; for a CCW polygon this points into the interior.
    Vec2 perp() const { return {-y, x}; }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Position in a local East-North-Up frame anchored at the field origin.
struct EnuPosition {
    double x = 0.0;  // east, m
    double y = 0.0;  // north, m
    double z = 0.0;  // up, m
    Vec2 xy() const { return {x, y}; }
};

inline double horizontal_distance(const EnuPosition& a, const EnuPosition& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline double distance3d(const EnuPosition& a, const EnuPosition& b) {
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                     (a.z - b.z) * (a.z - b.z));
}

// Offset in the vehicle body frame: +right across track, +forward along track.
struct BodyOffset {
    double right = 0.0;
    double forward = 0.0;
};

// Heading in radians, normalized to [-pi, pi). 0 = north, positive = clockwise
// (toward east), matching the compass convention of the rotation below.
class Heading {
public:
    Heading() = default;
    explicit Heading(double radians) : theta_(normalize(radians)) {}
    double radians() const { return theta_; }

    static double normalize(double radians) {
        double t = radians - 2.0 * kPi * std::floor((radians + kPi) / (2.0 * kPi));
        // floor rounding can land exactly on pi; fold it to -pi.
        if (t >= kPi) t -= 2.0 * kPi;
        return t;
    }

private:
    double theta_ = 0.0;
};

struct GeoPoint {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
};

// Rotate a body-frame offset into the ENU frame:
//   east  = forward*sin(theta) + right*cos(theta)
//   north = forward*cos(theta) - right*sin(theta)
BodyOffset rotate_body_offset(const BodyOffset& r, Heading heading);

// Vehicle pose plus body-frame offset -> ENU point (altitude unchanged).
EnuPosition body_to_enu(const EnuPosition& pose, const BodyOffset& r, Heading heading);

// Equirectangular local approximation on a spherical Earth. Throws
// std::domain_error when the origin is within 0.1 deg of a pole.
GeoPoint enu_to_geo(const EnuPosition& p, const GeoPoint& origin);
EnuPosition geo_to_enu(const GeoPoint& g, const GeoPoint& origin);  // z = 0

// Simple polygon with counter-clockwise vertices. The constructor rejects
// polygons with fewer than 3 vertices, repeated consecutive vertices,
// clockwise winding, or self-intersections.
class Polygon {
public:
    explicit Polygon(std::vector<Vec2> vertices);
    static Polygon axis_aligned_rect(const Vec2& lo, const Vec2& hi);

    const std::vector<Vec2>& vertices() const { return verts_; }
    std::size_t size() const { return verts_.size(); }

    double area() const;     // positive (shoelace)
    Vec2 centroid() const;   // area centroid
    bool is_convex() const;
    std::array<Vec2, 2> bounding_box() const;  // {min, max}

    // Shrink a convex polygon by moving every edge inward by d. Throws
    // std::invalid_argument if the polygon is not convex or collapses.
    Polygon inset(double d) const;

    // Expand a convex polygon by moving every edge outward by d.
    Polygon inflate(double d) const;

private:
    std::vector<Vec2> verts_;
};

// Even-odd containment; points on the boundary count as inside.
bool point_in_polygon(const Vec2& p, const Polygon& poly);

bool point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b, double eps = 1e-9);
double distance_point_segment(const Vec2& p, const Vec2& a, const Vec2& b);
Vec2 closest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b);

// Distance from p to the polygon boundary (0 if p lies on it).
double distance_to_boundary(const Vec2& p, const Polygon& poly);

// Clip the parametric line p0 + t*dir against a convex polygon (Cyrus-Beck).
// Returns the [t_enter, t_exit] interval, or nullopt if the line misses.
std::optional<std::pair<double, double>> clip_line(const Polygon& convex, const Vec2& p0,
                                                   const Vec2& dir);

}  // namespace sarsim
