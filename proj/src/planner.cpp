#include "sarsim/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sarsim {

namespace {

struct Rect {
    double x0, y0, x1, y1;
};

Rect as_axis_aligned_rect(const Polygon& poly, const char* what) {
    if (poly.size() != 4) {
        throw std::invalid_argument(std::string(what) + " must be an axis-aligned rectangle");
    }
    const auto bb = poly.bounding_box();
    for (const Vec2& v : poly.vertices()) {
        const bool on_x = v.x == bb[0].x || v.x == bb[1].x;
        const bool on_y = v.y == bb[0].y || v.y == bb[1].y;
        if (!on_x || !on_y) {
            throw std::invalid_argument(std::string(what) +
                                        " must be an axis-aligned rectangle");
        }
    }
    return {bb[0].x, bb[0].y, bb[1].x, bb[1].y};
}

}  // namespace

std::vector<Polygon> partition_field(const Polygon& search_area, int n, PartitionMode mode,
                                     double skew) {
    if (n <= 0) throw std::invalid_argument("partition_field: n must be positive");
    const Rect r = as_axis_aligned_rect(search_area, "search area");
    if (n == 1) return {search_area};
    if (mode == PartitionMode::Trapezoid && (skew < 0.0 || skew >= 1.0)) {
        throw std::invalid_argument("partition_field: skew must be in [0, 1)");
    }

    const double w = r.x1 - r.x0;
    std::vector<double> bottom{r.x0}, top{r.x0};
    for (int i = 1; i < n; ++i) {
        const double c = r.x0 + w * i / n;
        double half = 0.0;
        if (mode == PartitionMode::Trapezoid) {
            half = skew * std::min(c - r.x0, r.x1 - c);
        }
        bottom.push_back(c - half);
        top.push_back(c + half);
    }
    bottom.push_back(r.x1);
    top.push_back(r.x1);

    std::vector<Polygon> parts;
    parts.reserve(n);
    for (int i = 0; i < n; ++i) {
        parts.push_back(Polygon({{bottom[i], r.y0},
                                 {bottom[i + 1], r.y0},
                                 {top[i + 1], r.y1},
                                 {top[i], r.y1}}));
    }
    return parts;
}

ScanPath generate_scan_path(const Polygon& partition, double lane_spacing,
                            double scan_altitude, double inset, const Vec2& start_hint) {
    if (lane_spacing <= 0.0) {
        throw std::invalid_argument("generate_scan_path: lane_spacing must be positive");
    }
    if (inset < 0.0) {
        throw std::invalid_argument("generate_scan_path: inset must be non-negative");
    }
    const Polygon inner = partition.inset(inset);
    const auto bb = partition.bounding_box();
    const double bw = bb[1].x - bb[0].x;
    const double bh = bb[1].y - bb[0].y;
    const bool vertical = bh >= bw;  // lanes run along the longest axis

    const double across_lo = vertical ? bb[0].x : bb[0].y;
    const double across_w = vertical ? bw : bh;

    // First/last lane margin from the boundary (beyond the inset) chosen so a
    // rectangle corner sits exactly at distance lane_spacing/2 + inset from
    // the nearest lane endpoint.
    const double half = 0.5 * lane_spacing;
    double margin = std::sqrt((half + inset) * (half + inset) - inset * inset) - inset;
    margin = std::clamp(margin, 0.0, std::max(0.0, across_w / 2.0 - inset));

    const double band_lo = across_lo + inset + margin;
    const double band_w = across_w - 2.0 * (inset + margin);

    std::vector<double> lanes;
    if (band_w <= 1e-9) {
        lanes.push_back(across_lo + across_w / 2.0);
    } else {
        const int k = 1 + static_cast<int>(std::ceil(band_w / lane_spacing - 1e-12));
        const double pitch = band_w / (k - 1);
        for (int i = 0; i < k; ++i) lanes.push_back(band_lo + pitch * i);
    }

    // Clip every lane to the inset polygon. (lo, hi) are along-lane bounds.
    struct Lane {
        double pos, lo, hi;
    };
    std::vector<Lane> chords;
    const Vec2 dir = vertical ? Vec2{0.0, 1.0} : Vec2{1.0, 0.0};
    for (double pos : lanes) {
        const Vec2 p0 = vertical ? Vec2{pos, 0.0} : Vec2{0.0, pos};
        const auto t = clip_line(inner, p0, dir);
        if (!t || t->second - t->first < 1e-9) continue;  // lane misses the inset polygon
        chords.push_back({pos, t->first, t->second});
    }
    if (chords.empty()) {
        throw std::invalid_argument("generate_scan_path: inset leaves no room for lanes");
    }

    auto make_point = [&](double pos, double along) {
        return vertical ? Vec2{pos, along} : Vec2{along, pos};
    };

    // Four traversal orientations; pick the one whose first waypoint is
    // nearest the start hint (ties keep the earliest candidate).
    ScanPath best;
    double best_d = std::numeric_limits<double>::infinity();
    for (int reversed = 0; reversed < 2; ++reversed) {
        for (int start_high = 0; start_high < 2; ++start_high) {
            ScanPath path;
            path.lane_spacing = lane_spacing;
            path.scan_altitude = scan_altitude;
            bool high = start_high != 0;
            for (std::size_t j = 0; j < chords.size(); ++j) {
                const Lane& ln = chords[reversed ? chords.size() - 1 - j : j];
                const Vec2 a = make_point(ln.pos, high ? ln.hi : ln.lo);
                const Vec2 b = make_point(ln.pos, high ? ln.lo : ln.hi);
                path.waypoints.push_back({a.x, a.y, scan_altitude});
                path.waypoints.push_back({b.x, b.y, scan_altitude});
                high = !high;
            }
            const double d = distance(path.waypoints.front().xy(), start_hint);
            if (d < best_d) {
                best_d = d;
                best = std::move(path);
            }
        }
    }
    return best;
}

PathCursor resume_point(const ScanPath& path, const EnuPosition& last_object_location) {
    const auto& wp = path.waypoints;
    PathCursor cur;
    if (wp.size() < 2) {
        cur.next_index = 0;
        cur.entry = wp.empty() ? EnuPosition{} : wp[0];
        return cur;
    }
    const Vec2 p = last_object_location.xy();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < wp.size(); ++i) {
        const Vec2 q = closest_point_on_segment(p, wp[i].xy(), wp[i + 1].xy());
        const double d = distance(p, q);
        if (d < best) {
            best = d;
            cur.entry = {q.x, q.y, path.scan_altitude};
            cur.next_index = i + 1;
        }
    }
    return cur;
}

int FieldMap::partition_index(const Vec2& p) const {
    for (std::size_t i = 0; i < partitions.size(); ++i) {
        if (point_in_polygon(p, partitions[i])) return static_cast<int>(i);
    }
    return -1;
}

FieldMap build_field_map(const FieldMapParams& params) {
    if (params.uav_count <= 0) {
        throw std::invalid_argument("field map: uav_count must be positive");
    }
    as_axis_aligned_rect(params.search_area, "search area");
    const Rect dz = as_axis_aligned_rect(params.drop_zone, "drop zone");

    for (const Vec2& v : params.drop_zone.vertices()) {
        if (!point_in_polygon(v, params.search_area) ||
            distance_to_boundary(v, params.search_area) < 1e-9) {
            throw std::invalid_argument("field map: drop zone must be strictly inside the field");
        }
    }

    FieldMap map{params.search_area,
                 params.drop_zone,
                 params.origin,
                 partition_field(params.search_area, params.uav_count, params.mode,
                                 params.trapezoid_skew),
                 {},
                 {params.drop_zone.centroid().x, params.drop_zone.centroid().y, 0.0},
                 {}};

    // Waiting spots: edge midpoints (left, top, right, bottom) for up to four
    // UAVs, otherwise spread evenly along the perimeter.
    const int n = params.uav_count;
    std::vector<Vec2> spots;
    const double cx = (dz.x0 + dz.x1) / 2.0;
    const double cy = (dz.y0 + dz.y1) / 2.0;
    if (n <= 4) {
        const Vec2 midpoints[4] = {
            {dz.x0, cy}, {cx, dz.y1}, {dz.x1, cy}, {cx, dz.y0}};
        for (int i = 0; i < n; ++i) spots.push_back(midpoints[i]);
    } else {
        const double w = dz.x1 - dz.x0;
        const double h = dz.y1 - dz.y0;
        const double perim = 2.0 * (w + h);
        for (int i = 0; i < n; ++i) {
            double s = perim * (i + 0.5) / n;
            Vec2 pt;
            if (s < w) {
                pt = {dz.x0 + s, dz.y0};
            } else if (s < w + h) {
                pt = {dz.x1, dz.y0 + (s - w)};
            } else if (s < 2 * w + h) {
                pt = {dz.x1 - (s - w - h), dz.y1};
            } else {
                pt = {dz.x0, dz.y1 - (s - 2 * w - h)};
            }
            spots.push_back(pt);
        }
    }
    for (std::size_t i = 0; i < spots.size(); ++i) {
        for (std::size_t j = i + 1; j < spots.size(); ++j) {
            if (distance(spots[i], spots[j]) < 5.0) {
                throw std::invalid_argument(
                    "field map: drop zone too small, waiting spots closer than 5 m");
            }
        }
    }
    for (const Vec2& s : spots) map.waiting_spots.push_back({s.x, s.y, 0.0});

    // Home spots: mid-bottom of each partition, nudged inward; fall back to
    // the centroid if the nudge leaves the partition (extreme skews).
    for (const Polygon& part : map.partitions) {
        const auto bb = part.bounding_box();
        const auto& verts = part.vertices();
        double lo = bb[1].x, hi = bb[0].x;
        for (const Vec2& v : verts) {
            if (v.y == bb[0].y) {
                lo = std::min(lo, v.x);
                hi = std::max(hi, v.x);
            }
        }
        Vec2 home{(lo + hi) / 2.0, bb[0].y + 1.5};
        if (!point_in_polygon(home, part)) home = part.centroid();
        map.home_spots.push_back({home.x, home.y, 0.0});
    }
    return map;
}

double default_lane_spacing(const CalibrationModel& model, double scan_altitude) {
    const double edge_px = std::min(model.image_width, model.image_height) / 2.0;
    const double half_units = radial_ground_distance(edge_px, model);
    const double half_m =
        half_units * (scan_altitude / model.h_c) * model.units_to_meters;
    return 0.8 * 2.0 * half_m;
}

namespace {

// True when the open segment a..b passes through the interior of `avoid`.
bool segment_blocked(const Vec2& a, const Vec2& b, const Polygon& avoid) {
    const Vec2 d = b - a;
    const double len = d.norm();
    if (len < 1e-12) return false;
    const auto clip = clip_line(avoid, a, d);
    if (!clip) return false;
    const double t0 = std::max(clip->first, 0.0);
    const double t1 = std::min(clip->second, 1.0);
    return (t1 - t0) * len > 1e-6;
}

}  // namespace

std::vector<Vec2> route_around(const Vec2& from, const Vec2& to, const Polygon& avoid,
                               double clearance) {
    if (!segment_blocked(from, to, avoid)) return {};

    std::vector<Vec2> prefix;
    Vec2 start = from;
    if (point_in_polygon(from, avoid)) {
        // Step out through the nearest boundary point first.
        const auto& verts = avoid.vertices();
        double best = std::numeric_limits<double>::max();
        Vec2 exit = from;
        for (std::size_t i = 0, j = verts.size() - 1; i < verts.size(); j = i++) {
            const Vec2 c = closest_point_on_segment(from, verts[j], verts[i]);
            const double dist = (c - from).norm();
            if (dist < best) {
                best = dist;
                Vec2 dir = c - from;
                if (dir.norm() < 1e-9) {
                    const Vec2 e = verts[i] - verts[j];
                    dir = e.perp() * -1.0;  // outward normal of the edge
                }
                exit = c + dir * (clearance * 1.5 / dir.norm());
            }
        }
        prefix.push_back(exit);
        start = exit;
        if (!segment_blocked(start, to, avoid)) return prefix;
    }
    if (point_in_polygon(to, avoid)) return prefix;  // caller heads in on purpose

    std::vector<Vec2> nodes{start, to};
    const Polygon grown = avoid.inflate(clearance);
    for (const Vec2& v : grown.vertices()) nodes.push_back(v);

    const std::size_t n = nodes.size();
    constexpr double kInf = std::numeric_limits<double>::max();
    std::vector<double> dist(n, kInf);
    std::vector<std::size_t> prev(n, n);
    std::vector<bool> done(n, false);
    dist[0] = 0.0;
    for (;;) {
        std::size_t u = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!done[i] && dist[i] < (u == n ? kInf : dist[u])) u = i;
        }
        if (u == n || u == 1) break;
        done[u] = true;
        for (std::size_t v = 0; v < n; ++v) {
            if (done[v] || segment_blocked(nodes[u], nodes[v], avoid)) continue;
            const double alt = dist[u] + (nodes[v] - nodes[u]).norm();
            if (alt < dist[v]) {
                dist[v] = alt;
                prev[v] = u;
            }
        }
    }
    if (dist[1] == kInf) return prefix;  // no detour found, fly direct

    std::vector<Vec2> corners;
    for (std::size_t v = prev[1]; v != 0 && v != n; v = prev[v]) corners.push_back(nodes[v]);
    std::reverse(corners.begin(), corners.end());
    prefix.insert(prefix.end(), corners.begin(), corners.end());
    return prefix;
}

}  // namespace sarsim
