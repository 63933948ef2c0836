#include "leafvein/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>

#define BOOST_ALLOW_DEPRECATED_HEADERS
#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

namespace leafvein {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double signed_area2(std::span<const Point> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& p = v[i];
        const Point& q = v[(i + 1) % v.size()];
        s += p.x * q.y - q.x * p.y;
    }
    return s;
}

double point_segment_distance(Point p, Point a, Point b) {
    Point d = b - a;
    double len2 = dot(d, d);
    if (len2 == 0.0) return norm(p - a);
    double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
    return norm(p - (a + d * t));
}

int orientation_sign(Point a, Point b, Point c) {
    double v = cross(b - a, c - a);
    if (v > 1e-12) return 1;
    if (v < -1e-12) return -1;
    return 0;
}

bool on_segment(Point a, Point b, Point p) {
    return std::min(a.x, b.x) - 1e-12 <= p.x && p.x <= std::max(a.x, b.x) + 1e-12 &&
           std::min(a.y, b.y) - 1e-12 <= p.y && p.y <= std::max(a.y, b.y) + 1e-12;
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
    int o1 = orientation_sign(a, b, c);
    int o2 = orientation_sign(a, b, d);
    int o3 = orientation_sign(c, d, a);
    int o4 = orientation_sign(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

}  // namespace

double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
double norm(Point a) { return std::hypot(a.x, a.y); }

Point unit_vector(double angle_deg) {
    double r = angle_deg * kDegToRad;
    return {std::cos(r), std::sin(r)};
}

double normalize_deg(double angle_deg) {
    double a = std::fmod(angle_deg, 360.0);
    if (a < 0.0) a += 360.0;
    if (a == 360.0) a = 0.0;
    return a;
}

Point rotate_deg(Point p, double deg, Point pivot) {
    double r = deg * kDegToRad;
    double c = std::cos(r), s = std::sin(r);
    double dx = p.x - pivot.x, dy = p.y - pivot.y;
    return {pivot.x + c * dx - s * dy, pivot.y + s * dx + c * dy};
}

Polygon::Polygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) {
        throw InvalidPolygonError("polygon needs at least 3 vertices, got " +
                                  std::to_string(vertices_.size()));
    }
    for (const Point& p : vertices_) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw InvalidPolygonError("polygon vertex is not finite");
        }
    }
    double s2 = signed_area2(vertices_);
    if (std::abs(s2) < 1e-12) {
        throw InvalidPolygonError("polygon has zero area");
    }
    // Clockwise in image coordinates (y down) means a positive shoelace sum.
    if (s2 < 0.0) {
        std::reverse(vertices_.begin(), vertices_.end());
    }
    area_ = std::abs(s2) * 0.5;
}

double Polygon::perimeter() const {
    double s = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        s += norm(vertices_[(i + 1) % vertices_.size()] - vertices_[i]);
    }
    return s;
}

BoundingBox Polygon::bbox() const {
    BoundingBox b{vertices_[0].x, vertices_[0].y, vertices_[0].x, vertices_[0].y};
    for (const Point& p : vertices_) {
        b.min_x = std::min(b.min_x, p.x);
        b.min_y = std::min(b.min_y, p.y);
        b.max_x = std::max(b.max_x, p.x);
        b.max_y = std::max(b.max_y, p.y);
    }
    return b;
}

bool Polygon::contains(Point p) const {
    bool inside = false;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const Point& a = vertices_[i];
        const Point& b = vertices_[(i + 1) % vertices_.size()];
        if ((a.y <= p.y && b.y > p.y) || (b.y <= p.y && a.y > p.y)) {
            double xi = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xi) inside = !inside;
        }
    }
    return inside;
}

double Polygon::distance_to_boundary(Point p) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        best = std::min(best, point_segment_distance(p, vertices_[i],
                                                     vertices_[(i + 1) % vertices_.size()]));
    }
    return best;
}

bool Polygon::is_simple() const {
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // Skip adjacent edges (they share exactly one endpoint).
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (segments_intersect(vertices_[i], vertices_[(i + 1) % n], vertices_[j],
                                   vertices_[(j + 1) % n])) {
                return false;
            }
        }
    }
    return true;
}

Polygon Polygon::translated(double dx, double dy) const {
    std::vector<Point> out = vertices_;
    for (Point& p : out) {
        p.x += dx;
        p.y += dy;
    }
    return Polygon(std::move(out));
}

Polygon Polygon::rotated(double deg, Point pivot) const {
    std::vector<Point> out = vertices_;
    for (Point& p : out) p = rotate_deg(p, deg, pivot);
    return Polygon(std::move(out));
}

std::size_t RasterMask::count_set() const {
    std::size_t n = 0;
    for (std::uint8_t b : bits) n += b != 0;
    return n;
}

PolarGrid::PolarGrid(int m) : m_(m) {
    if (m < 4) throw ConfigError("polar grid needs at least 4 directions, got " + std::to_string(m));
    angles_.reserve(m);
    for (int i = 0; i < m; ++i) angles_.push_back(i * (360.0 / m));
}

int PolarGrid::index_of(double grid_angle_deg) const {
    double a = normalize_deg(grid_angle_deg);
    int idx = static_cast<int>(std::lround(a / step())) % m_;
    if (std::abs(normalize_deg(angle(idx) - a + 180.0) - 180.0) > 1e-6) {
        throw Error("angle " + std::to_string(grid_angle_deg) + " is not on the polar grid");
    }
    return idx;
}

double polygon_area(const Polygon& poly) { return poly.area(); }

RasterMask rasterize(std::span<const Point> ring, int width, int height) {
    if (width < 1 || height < 1) throw Error("canvas dimensions must be >= 1");
    if (ring.size() < 3) throw InvalidPolygonError("ring needs at least 3 vertices");
    RasterMask mask(width, height);

    double min_y = ring[0].y, max_y = ring[0].y;
    for (const Point& p : ring) {
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    int row_lo = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
    int row_hi = std::min(height - 1, static_cast<int>(std::ceil(max_y)));

    std::vector<double> xs;
    for (int iy = row_lo; iy <= row_hi; ++iy) {
        double yc = iy + 0.5;
        xs.clear();
        for (std::size_t i = 0; i < ring.size(); ++i) {
            const Point& a = ring[i];
            const Point& b = ring[(i + 1) % ring.size()];
            if ((a.y <= yc && b.y > yc) || (b.y <= yc && a.y > yc)) {
                xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            int first = static_cast<int>(std::ceil(xs[k] - 0.5));
            int last = static_cast<int>(std::ceil(xs[k + 1] - 0.5)) - 1;
            first = std::max(first, 0);
            last = std::min(last, width - 1);
            for (int ix = first; ix <= last; ++ix) mask.set(ix, iy);
        }
    }
    return mask;
}

RasterMask rasterize(const Polygon& poly, int width, int height) {
    return rasterize(std::span<const Point>(poly.vertices()), width, height);
}

double mask_iou(const RasterMask& a, const RasterMask& b) {
    if (a.width != b.width || a.height != b.height) {
        throw DimensionMismatchError("mask dimensions differ: " + std::to_string(a.width) + "x" +
                                     std::to_string(a.height) + " vs " + std::to_string(b.width) +
                                     "x" + std::to_string(b.height));
    }
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        bool pa = a.bits[i] != 0, pb = b.bits[i] != 0;
        inter += pa && pb;
        uni += pa || pb;
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double shrink_offset_distance(const Polygon& poly, double ratio) {
    if (!(ratio > 0.0 && ratio <= 1.0)) {
        throw ConfigError("shrink ratio must be in (0, 1], got " + std::to_string(ratio));
    }
    return poly.area() * (1.0 - ratio * ratio) / poly.perimeter();
}

namespace bg = boost::geometry;
using BoostPoint = bg::model::d2::point_xy<double>;
using BoostPolygon = bg::model::polygon<BoostPoint>;
using BoostMultiPolygon = bg::model::multi_polygon<BoostPolygon>;

Polygon shrink_polygon(const Polygon& poly, double ratio) {
    return shrink_polygon_at_distance(poly, shrink_offset_distance(poly, ratio));
}

namespace {

// Vatti-style offset through Boost.Geometry's buffer. Robust against
// topology changes (splitting, vanishing edges) but its miter corners can be
// off by a fraction of a pixel, so it only backs up the exact path below.
std::optional<Polygon> buffer_shrink(const Polygon& poly, double d) {
    BoostPolygon in;
    for (const Point& p : poly.vertices()) {
        bg::append(in.outer(), BoostPoint(p.x, p.y));
    }
    bg::append(in.outer(), BoostPoint(poly.vertices()[0].x, poly.vertices()[0].y));
    bg::correct(in);

    BoostMultiPolygon out;
    bg::strategy::buffer::distance_symmetric<double> dist(-d);
    bg::strategy::buffer::join_miter join(1e6);
    bg::strategy::buffer::end_flat end;
    bg::strategy::buffer::point_square point;
    bg::strategy::buffer::side_straight side;
    bg::buffer(in, out, dist, side, join, end, point);

    const BoostPolygon* best = nullptr;
    double best_area = 0.0;
    for (const BoostPolygon& piece : out) {
        double a = std::abs(bg::area(piece));
        if (a > best_area) {
            best_area = a;
            best = &piece;
        }
    }
    if (best == nullptr || best_area < 1e-9 || best->outer().size() < 4) {
        return std::nullopt;
    }
    std::vector<Point> verts;
    verts.reserve(best->outer().size() - 1);
    for (std::size_t i = 0; i + 1 < best->outer().size(); ++i) {  // last point repeats the first
        verts.push_back({bg::get<0>(best->outer()[i]), bg::get<1>(best->outer()[i])});
    }
    return Polygon(std::move(verts));
}

bool ring_is_convex(const std::vector<Point>& v) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        Point e0 = v[(i + 1) % n] - v[i];
        Point e1 = v[(i + 2) % n] - v[(i + 1) % n];
        if (cross(e0, e1) < -1e-9 * (norm(e0) * norm(e1))) return false;
    }
    return true;
}

// Erosion of a convex polygon: intersection of the inward-shifted edge
// half-planes (Sutherland-Hodgman). Exact, including edges that vanish.
std::optional<Polygon> convex_shrink(const Polygon& poly, double d) {
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    std::vector<Point> region = v;
    for (std::size_t i = 0; i < n && !region.empty(); ++i) {
        Point a = v[i];
        Point e = v[(i + 1) % n] - a;
        double len = norm(e);
        if (len < 1e-12) continue;
        Point shift{-e.y / len * d, e.x / len * d};  // inward for a clockwise ring
        Point base = a + shift;
        // keep the inward side of the shifted line: cross(e, p - base) >= 0
        std::vector<Point> next;
        next.reserve(region.size() + 1);
        for (std::size_t j = 0; j < region.size(); ++j) {
            Point p = region[j];
            Point q = region[(j + 1) % region.size()];
            double sp = cross(e, p - base);
            double sq = cross(e, q - base);
            if (sp >= 0.0) next.push_back(p);
            if ((sp < 0.0) != (sq < 0.0)) {
                double t = sp / (sp - sq);
                next.push_back(p + (q - p) * t);
            }
        }
        region = std::move(next);
    }
    std::vector<Point> cleaned;
    for (const Point& p : region) {
        if (cleaned.empty() || norm(p - cleaned.back()) > 1e-9) cleaned.push_back(p);
    }
    while (cleaned.size() > 1 && norm(cleaned.front() - cleaned.back()) <= 1e-9) {
        cleaned.pop_back();
    }
    if (cleaned.size() < 3) return std::nullopt;
    try {
        return Polygon(cleaned);
    } catch (const InvalidPolygonError&) {
        return std::nullopt;
    }
}

// Exact mitered inward offset: every vertex is the intersection of the two
// adjacent inward-shifted edge lines. Near-parallel corners fall back to a
// bevel. Returns nothing when the result is degenerate or violates the
// offset clearance (pinched concave inputs); the buffer path handles those.
std::optional<Polygon> miter_shrink(const Polygon& poly, double d) {
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    std::vector<Point> ring;
    ring.reserve(n + 4);
    for (std::size_t i = 0; i < n; ++i) {
        Point prev = v[(i + n - 1) % n];
        Point cur = v[i];
        Point next = v[(i + 1) % n];
        Point e0 = cur - prev;
        Point e1 = next - cur;
        double l0 = norm(e0), l1 = norm(e1);
        if (l0 < 1e-12 || l1 < 1e-12) continue;
        // Inward normal of a clockwise (image coordinates) ring.
        Point n0{-e0.y / l0 * d, e0.x / l0 * d};
        Point n1{-e1.y / l1 * d, e1.x / l1 * d};
        double denom = cross(e0, e1);
        if (std::abs(denom) / (l0 * l1) < 1e-3) {
            ring.push_back(cur + n0);
            ring.push_back(cur + n1);
            continue;
        }
        Point a = prev + n0;  // base of the shifted previous edge
        Point b = cur + n1;   // base of the shifted next edge
        double t = cross(b - a, e1) / denom;
        ring.push_back(a + e0 * t);
    }

    std::vector<Point> cleaned;
    for (const Point& p : ring) {
        if (cleaned.empty() || norm(p - cleaned.back()) > 1e-9) cleaned.push_back(p);
    }
    while (cleaned.size() > 1 && norm(cleaned.front() - cleaned.back()) <= 1e-9) {
        cleaned.pop_back();
    }
    if (cleaned.size() < 3) return std::nullopt;

    std::optional<Polygon> out;
    try {
        out.emplace(cleaned);
    } catch (const InvalidPolygonError&) {
        return std::nullopt;
    }
    if (out->area() < 1e-9 || out->area() >= poly.area()) return std::nullopt;
    for (const Point& p : out->vertices()) {
        if (!poly.contains(p)) return std::nullopt;
        if (poly.distance_to_boundary(p) < d - 0.25) return std::nullopt;
    }
    return out;
}

}  // namespace

Polygon shrink_polygon_at_distance(const Polygon& poly, double d) {
    if (d < 0.0) throw ConfigError("offset distance must be >= 0");
    if (d == 0.0) return poly;
    if (ring_is_convex(poly.vertices())) {
        if (std::optional<Polygon> eroded = convex_shrink(poly, d)) {
            return *eroded;
        }
        throw ShrinkCollapseError("inward offset by " + std::to_string(d) +
                                  " px consumed the polygon");
    }
    if (std::optional<Polygon> exact = miter_shrink(poly, d)) {
        return *exact;
    }
    if (std::optional<Polygon> fallback = buffer_shrink(poly, d)) {
        return *fallback;
    }
    throw ShrinkCollapseError("inward offset by " + std::to_string(d) +
                              " px consumed the polygon");
}

double ray_to_contour_distance(Point origin, double angle_deg, const Polygon& poly) {
    if (!poly.contains(origin)) {
        throw RayCastError("ray origin (" + std::to_string(origin.x) + ", " +
                           std::to_string(origin.y) + ") is not inside the polygon");
    }
    Point u = unit_vector(angle_deg);
    const auto& v = poly.vertices();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
        Point p = v[i];
        Point e = v[(i + 1) % v.size()] - p;
        double denom = cross(u, e);
        if (std::abs(denom) < 1e-14) continue;  // parallel edge
        Point w = p - origin;
        double t = cross(w, e) / denom;
        double s = cross(w, u) / denom;
        if (t > 1e-9 && s >= -1e-12 && s <= 1.0 + 1e-12) {
            best = std::min(best, t);
        }
    }
    if (!std::isfinite(best)) {
        throw RayCastError("ray escaped the contour (interior origin expected)");
    }
    return best;
}

double mask_boundary_length(const RasterMask& mask) {
    // Marching squares on the pixel-center grid. Segment lengths depend only
    // on the cell case: one corner set gives sqrt(0.5), two adjacent give 1,
    // two diagonal give 2 * sqrt(0.5).
    constexpr double kDiag = 0.70710678118654752;
    double total = 0.0;
    for (int cy = 0; cy <= mask.height; ++cy) {
        for (int cx = 0; cx <= mask.width; ++cx) {
            int tl = mask.test(cx - 1, cy - 1) ? 1 : 0;
            int tr = mask.test(cx, cy - 1) ? 1 : 0;
            int bl = mask.test(cx - 1, cy) ? 1 : 0;
            int br = mask.test(cx, cy) ? 1 : 0;
            int n = tl + tr + bl + br;
            if (n == 1 || n == 3) {
                total += kDiag;
            } else if (n == 2) {
                bool diagonal = (tl == br && tr == bl && tl != tr);
                total += diagonal ? 2.0 * kDiag : 1.0;
            }
        }
    }
    return total;
}

std::vector<RasterMask> connected_components(const RasterMask& mask) {
    std::vector<std::uint8_t> seen(mask.bits.size(), 0);
    std::vector<RasterMask> parts;
    std::deque<std::pair<int, int>> queue;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            std::size_t idx = static_cast<std::size_t>(y) * mask.width + x;
            if (mask.bits[idx] == 0 || seen[idx]) continue;
            RasterMask part(mask.width, mask.height);
            queue.push_back({x, y});
            seen[idx] = 1;
            while (!queue.empty()) {
                auto [px, py] = queue.front();
                queue.pop_front();
                part.set(px, py);
                const int nx[4] = {px - 1, px + 1, px, px};
                const int ny[4] = {py, py, py - 1, py + 1};
                for (int k = 0; k < 4; ++k) {
                    if (!mask.test(nx[k], ny[k])) continue;
                    std::size_t nidx = static_cast<std::size_t>(ny[k]) * mask.width + nx[k];
                    if (!seen[nidx]) {
                        seen[nidx] = 1;
                        queue.push_back({nx[k], ny[k]});
                    }
                }
            }
            parts.push_back(std::move(part));
        }
    }
    std::stable_sort(parts.begin(), parts.end(), [](const RasterMask& a, const RasterMask& b) {
        return a.count_set() > b.count_set();
    });
    return parts;
}

}  // namespace leafvein
