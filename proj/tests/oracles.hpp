// Independent reference implementations used only by tests. These stay
// deliberately naive so they cannot share bugs with the library code they
// check.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "leafvein/geometry.hpp"

namespace oracles {

using leafvein::Point;
using leafvein::Polygon;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

// Shoelace area, written out directly.
inline double shoelace_area(const std::vector<Point>& pts) {
    double s = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Point& a = pts[i];
        const Point& b = pts[(i + 1) % pts.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return std::abs(s) / 2.0;
}

// Even-odd point-in-polygon, independent of Polygon::contains.
inline bool point_in(const std::vector<Point>& pts, Point p) {
    bool in = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Point a = pts[i], b = pts[(i + 1) % pts.size()];
        if ((a.y > p.y) != (b.y > p.y)) {
            double xi = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xi) in = !in;
        }
    }
    return in;
}

// Random simple polygon: vertices at sorted angles around a center
// (star-shaped, hence simple).
inline std::vector<Point> random_star_polygon(std::mt19937_64& rng, int min_v = 5, int max_v = 12,
                                              double cx = 256, double cy = 256,
                                              double r_lo = 30, double r_hi = 200) {
    int n = min_v + static_cast<int>(rng() % static_cast<unsigned>(max_v - min_v + 1));
    std::vector<double> angles(n);
    for (double& a : angles) a = uniform(rng, 0.0, 2.0 * 3.14159265358979323846);
    std::sort(angles.begin(), angles.end());
    // reject nearly-coincident angles to keep edges well-formed
    for (int i = 1; i < n; ++i) {
        if (angles[i] - angles[i - 1] < 1e-3) angles[i] += 1e-3;
    }
    std::vector<Point> pts(n);
    for (int i = 0; i < n; ++i) {
        double r = uniform(rng, r_lo, r_hi);
        pts[i] = {cx + r * std::cos(angles[i]), cy + r * std::sin(angles[i])};
    }
    return pts;
}

// Convex hull (monotone chain) of random points in a disc.
inline std::vector<Point> random_convex_polygon(std::mt19937_64& rng, double cx = 256,
                                                double cy = 256, double radius = 180) {
    int n = 8 + static_cast<int>(rng() % 8u);
    std::vector<Point> pts(n);
    for (Point& p : pts) {
        double a = uniform(rng, 0.0, 2.0 * 3.14159265358979323846);
        double r = radius * std::sqrt(uniform(rng, 0.05, 1.0));
        p = {cx + r * std::cos(a), cy + r * std::sin(a)};
    }
    std::sort(pts.begin(), pts.end(),
              [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    auto turn = [](Point o, Point a, Point b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    // Drop near-collinear vertices; they make inward miter corners
    // ill-conditioned and are not interesting geometry.
    bool changed = true;
    while (changed && hull.size() > 3) {
        changed = false;
        for (std::size_t i = 0; i < hull.size(); ++i) {
            Point a = hull[(i + hull.size() - 1) % hull.size()];
            Point b = hull[i];
            Point c = hull[(i + 1) % hull.size()];
            Point u{b.x - a.x, b.y - a.y}, v{c.x - b.x, c.y - b.y};
            double sin_turn = std::abs(u.x * v.y - u.y * v.x) /
                              (std::hypot(u.x, u.y) * std::hypot(v.x, v.y));
            if (sin_turn < 0.1) {
                hull.erase(hull.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    return hull;
}

// First boundary hit of a ray, by marching until the point-in-polygon state
// flips and then bisecting the bracketing interval.
inline double march_ray_distance(const std::vector<Point>& poly, Point origin, double angle_deg,
                                 double step = 0.25, double max_len = 4096.0) {
    double rad = angle_deg * 3.14159265358979323846 / 180.0;
    Point u{std::cos(rad), std::sin(rad)};
    double lo = 0.0;
    double hi = step;
    while (hi < max_len) {
        Point p{origin.x + u.x * hi, origin.y + u.y * hi};
        if (!point_in(poly, p)) break;
        lo = hi;
        hi += step;
    }
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        Point p{origin.x + u.x * mid, origin.y + u.y * mid};
        if (point_in(poly, p)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Circular distance between two angles in degrees.
inline double circ_dist(double a, double b) {
    double d = std::fmod(std::abs(a - b), 360.0);
    return std::min(d, 360.0 - d);
}

// Nearest grid angle by exhaustive circular distance; on a tie the bracket
// below alpha wins.
inline double nearest_grid_angle(double alpha, int m) {
    double step = 360.0 / m;
    double best = 0.0;
    double best_d = 1e18;
    for (int i = 0; i < m; ++i) {
        double g = i * step;
        double d = circ_dist(alpha, g);
        if (d < best_d - 1e-12) {
            best_d = d;
            best = g;
        } else if (std::abs(d - best_d) <= 1e-12) {
            // tie: prefer the angle that lies below alpha (circularly)
            double below_gap = std::fmod(alpha - g + 360.0, 360.0);
            double best_gap = std::fmod(alpha - best + 360.0, 360.0);
            if (below_gap < best_gap) best = g;
        }
    }
    return best;
}

// Minimal well-formedness scan for the SVG output: every tag closes, every
// attribute value is quoted.
inline bool xml_well_formed(const std::string& text) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    bool seen_any = false;
    while (i < text.size()) {
        if (text[i] != '<') {
            ++i;
            continue;
        }
        std::size_t end = text.find('>', i);
        if (end == std::string::npos) return false;
        std::string tag = text.substr(i + 1, end - i - 1);
        i = end + 1;
        if (tag.empty()) return false;
        if (tag[0] == '?') continue;  // declaration
        bool closing = tag[0] == '/';
        bool self_closing = tag.back() == '/';
        std::string body = closing ? tag.substr(1) : tag;
        if (self_closing) body.pop_back();
        std::size_t sp = body.find_first_of(" \t");
        std::string name = sp == std::string::npos ? body : body.substr(0, sp);
        if (name.empty()) return false;
        // attribute values must be double-quoted
        std::size_t q = 0;
        int quotes = 0;
        while ((q = body.find('"', q)) != std::string::npos) {
            ++quotes;
            ++q;
        }
        if (quotes % 2 != 0) return false;
        if (closing) {
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
        } else if (!self_closing) {
            stack.push_back(name);
        }
        seen_any = true;
    }
    return seen_any && stack.empty();
}

inline int count_occurrences(const std::string& text, const std::string& needle) {
    int n = 0;
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

}  // namespace oracles
