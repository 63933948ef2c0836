#include "leafvein/veins.hpp"

#include <algorithm>
#include <cmath>

namespace leafvein {

std::pair<double, double> lateral_directions(double phi_deg) {
    double up = phi_deg > 90.0 ? phi_deg - 90.0 : phi_deg - 90.0 + 360.0;
    double down = phi_deg <= 270.0 ? phi_deg + 90.0 : phi_deg + 90.0 - 360.0;
    return {up, down};
}

double rectify_direction(double alpha_deg, const PolarGrid& grid) {
    double a = normalize_deg(alpha_deg);
    double step = grid.step();
    int k = std::min(static_cast<int>(std::floor(a / step)), grid.size() - 1);
    double sigma2 = a - k * step;         // gap to the lower bracket
    double sigma1 = step - sigma2;        // gap to the upper bracket
    int chosen = sigma1 < sigma2 ? k + 1 : k;
    return grid.angle(chosen % grid.size());
}

std::pair<double, double> thin_directions(double rect_prev_deg, double rect_next_deg) {
    return {rect_next_deg, rect_prev_deg};
}

VeinSet grow_veins(const std::vector<StartPointSample>& starts, const Polygon& poly,
                   const PolarGrid& grid) {
    VeinSet set;
    set.laterals.reserve(starts.size());
    for (const StartPointSample& s : starts) {
        LateralVeinPair lv;
        lv.start = s.point;
        lv.tangent_deg = s.tangent_angle_deg;
        auto [up, down] = lateral_directions(s.tangent_angle_deg);
        lv.potential_up = up;
        lv.potential_down = down;
        lv.rect_up = rectify_direction(up, grid);
        lv.rect_down = rectify_direction(down, grid);
        lv.len_up = ray_to_contour_distance(lv.start, lv.rect_up, poly);
        lv.len_down = ray_to_contour_distance(lv.start, lv.rect_down, poly);
        set.laterals.push_back(lv);
    }

    auto grow_thin = [&](Point mid, double dir, int parent, bool up_side, bool right) {
        if (!poly.contains(mid)) {
            ++set.skipped_thins;
            return;
        }
        ThinVein tv;
        tv.start = mid;
        tv.direction_deg = dir;
        tv.length = ray_to_contour_distance(mid, dir, poly);
        tv.parent = parent;
        tv.up_side = up_side;
        tv.right = right;
        set.thins.push_back(tv);
    };

    for (std::size_t i = 0; i + 1 < set.laterals.size(); ++i) {
        const LateralVeinPair& a = set.laterals[i];
        const LateralVeinPair& b = set.laterals[i + 1];
        auto [right_up, left_up] = thin_directions(a.rect_up, b.rect_up);
        auto [right_down, left_down] = thin_directions(a.rect_down, b.rect_down);
        int ia = static_cast<int>(i);
        grow_thin(a.mid_up(), right_up, ia, true, true);
        grow_thin(b.mid_up(), left_up, ia + 1, true, false);
        grow_thin(a.mid_down(), right_down, ia, false, true);
        grow_thin(b.mid_down(), left_down, ia + 1, false, false);
    }
    return set;
}

}  // namespace leafvein
