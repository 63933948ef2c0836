#pragma once

#include <utility>
#include <vector>

#include "leafvein/geometry.hpp"
#include "leafvein/mainvein.hpp"

namespace leafvein {

/// The two lateral veins of one start point: potential directions derived
/// from the tangent, their rectified (grid-snapped) counterparts, and the
/// measured lengths to the contour.
struct LateralVeinPair {
    Point start;
    double tangent_deg = 0.0;
    double potential_up = 0.0;
    double potential_down = 0.0;
    double rect_up = 0.0;
    double rect_down = 0.0;
    double len_up = 0.0;
    double len_down = 0.0;

    Point end_up() const { return start + unit_vector(rect_up) * len_up; }
    Point end_down() const { return start + unit_vector(rect_down) * len_down; }
    Point mid_up() const { return start + unit_vector(rect_up) * (len_up * 0.5); }
    Point mid_down() const { return start + unit_vector(rect_down) * (len_down * 0.5); }
};

/// A thin vein grows from a lateral midpoint in the rectified direction of
/// the neighboring lateral on the same side of the contour.
struct ThinVein {
    Point start;
    double direction_deg = 0.0;
    double length = 0.0;
    int parent = 0;       // index of the owning lateral
    bool up_side = true;  // which contour side the parent midpoint sits on
    bool right = true;    // true: direction of lateral parent+1, else parent-1

    Point end() const { return start + unit_vector(direction_deg) * length; }
};

/// All veins grown for one instance. Thin veins exist only between adjacent
/// laterals (2 * (n - 1) per contour side); midpoints that fall outside the
/// polygon are skipped and counted.
struct VeinSet {
    std::vector<LateralVeinPair> laterals;
    std::vector<ThinVein> thins;
    int skipped_thins = 0;
};

/// Potential growth directions of the two lateral veins at a tangent angle
/// phi in [0, 360): up = phi - 90 wrapped into the range, down = phi + 90.
std::pair<double, double> lateral_directions(double phi_deg);

/// Snaps a direction to the bracketing grid angle with the smaller angular
/// gap; ties go to the lower bracket. Result is in [0, 360).
double rectify_direction(double alpha_deg, const PolarGrid& grid);

/// Growth directions of the thin veins between two adjacent laterals: the
/// right thin vein of the first takes the second's rectified direction and
/// the left thin vein of the second takes the first's.
std::pair<double, double> thin_directions(double rect_prev_deg, double rect_next_deg);

/// Grows lateral and thin veins from the start points against the polygon,
/// measuring every length by ray casting. All starts must be strictly
/// inside.
VeinSet grow_veins(const std::vector<StartPointSample>& starts, const Polygon& poly,
                   const PolarGrid& grid);

}  // namespace leafvein
