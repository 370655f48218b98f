#pragma once

#include <cstddef>
#include <vector>

#include "sarsim/geometry.hpp"
#include "sarsim/localization.hpp"

namespace sarsim {

enum class PartitionMode { Strips, Trapezoid };

// Split an axis-aligned rectangle into n equal-area partitions. Strips mode
// cuts vertically; Trapezoid mode fans the cut lines out from the bottom
// (each cut pivots around its mid-height point, which keeps areas exactly
// equal), skew in [0, 1) controlling the fan angle.
std::vector<Polygon> partition_field(const Polygon& search_area, int n,
                                     PartitionMode mode = PartitionMode::Strips,
                                     double skew = 0.5);

struct ScanPath {
    std::vector<EnuPosition> waypoints;  // zig-zag lane endpoints at scan altitude
    double lane_spacing = 0.0;
    double scan_altitude = 0.0;
};

// Boustrophedon lanes running along the partition's longest bounding-box
// axis, clipped to the partition shrunk by `inset`. The first and last lanes
// sit `inset + margin` from the boundary with margin chosen so that for
// rectangular partitions every interior point lies within
// lane_spacing/2 + inset of the path. The traversal is oriented so the first
// waypoint is the lane endpoint nearest start_hint.
ScanPath generate_scan_path(const Polygon& partition, double lane_spacing,
                            double scan_altitude, double inset, const Vec2& start_hint);

struct PathCursor {
    std::size_t next_index = 0;  // waypoint to head for after reaching entry
    EnuPosition entry;           // nearest point on the path polyline
};

// Nearest-point projection of a location onto the path polyline; scanning
// resumes there instead of restarting. Locations off the path (GPS drift or
// a pick that ended outside the partition) clamp to the nearest point.
PathCursor resume_point(const ScanPath& path, const EnuPosition& last_object_location);

struct FieldMap {
    Polygon search_area;
    Polygon drop_zone;
    GeoPoint origin;
    std::vector<Polygon> partitions;        // one per UAV
    std::vector<EnuPosition> waiting_spots; // per UAV, on the drop-zone perimeter
    EnuPosition drop_spot;                  // drop-zone centroid
    std::vector<EnuPosition> home_spots;    // per UAV, inside its partition

    // Lowest-index partition containing the point, or -1.
    int partition_index(const Vec2& p) const;
};

struct FieldMapParams {
    Polygon search_area;  // axis-aligned rectangle
    Polygon drop_zone;    // axis-aligned rectangle strictly inside search_area
    GeoPoint origin;
    int uav_count = 3;
    PartitionMode mode = PartitionMode::Strips;
    double trapezoid_skew = 0.5;
};

// Builds the partitioning and the named per-UAV spots. Throws
// std::invalid_argument when the geometry violates the field invariants
// (drop zone not strictly inside, waiting spots closer than 5 m, ...).
FieldMap build_field_map(const FieldMapParams& params);

// 0.8 x camera ground footprint width at the scan altitude, in meters.
double default_lane_spacing(const CalibrationModel& model, double scan_altitude);

// Detour waypoints (possibly none) so the leg from -> to stays out of the
// convex `avoid` region. Corners are passed with `clearance` to spare. A
// start point inside the region first exits through the nearest boundary.
std::vector<Vec2> route_around(const Vec2& from, const Vec2& to, const Polygon& avoid,
                               double clearance = 0.05);

}  // namespace sarsim
