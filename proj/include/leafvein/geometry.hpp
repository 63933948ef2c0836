#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "leafvein/errors.hpp"

namespace leafvein {

/// 2D point in image pixel coordinates. y grows downward; angles are in
/// degrees, measured from +x toward +y.
struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }

double cross(Point a, Point b);
double dot(Point a, Point b);
double norm(Point a);

/// Unit vector of an angle in the image convention.
Point unit_vector(double angle_deg);

/// Wraps an angle into [0, 360).
double normalize_deg(double angle_deg);

/// Rotates p about pivot so that a direction at angle a maps to a + deg.
Point rotate_deg(Point p, double deg, Point pivot);

struct BoundingBox {
    double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
};

/// Closed contour with at least 3 vertices and positive area. Vertex order
/// is normalized to clockwise in image coordinates at construction; the
/// closing edge from the last vertex back to the first is implicit.
class Polygon {
public:
    explicit Polygon(std::vector<Point> vertices);

    const std::vector<Point>& vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }

    double area() const { return area_; }
    double perimeter() const;
    BoundingBox bbox() const;

    /// Even-odd containment test at p. Boundary points are not reliable.
    bool contains(Point p) const;

    /// Distance from p to the nearest point of the contour.
    double distance_to_boundary(Point p) const;

    /// True when no two non-adjacent edges intersect.
    bool is_simple() const;

    Polygon translated(double dx, double dy) const;
    Polygon rotated(double deg, Point pivot) const;

private:
    std::vector<Point> vertices_;
    double area_ = 0.0;
};

/// Binary occupancy grid over an image canvas, row-major.
struct RasterMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    RasterMask() = default;
    RasterMask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

    bool test(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height &&
               bits[static_cast<std::size_t>(y) * width + x] != 0;
    }
    void set(int x, int y, bool v = true) {
        bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
    }
    std::size_t count_set() const;
    bool empty() const { return count_set() == 0; }
};

/// Uniformly spaced polar directions: angles[i] = i * (360 / m), m >= 4.
class PolarGrid {
public:
    explicit PolarGrid(int m);

    int size() const { return m_; }
    double step() const { return 360.0 / m_; }
    double angle(int index) const { return index * step(); }
    const std::vector<double>& angles() const { return angles_; }

    /// Index of a grid angle (angle must lie on the grid up to rounding).
    int index_of(double grid_angle_deg) const;

private:
    int m_ = 0;
    std::vector<double> angles_;
};

/// Shoelace area; throws InvalidPolygonError for fewer than 3 vertices.
double polygon_area(const Polygon& poly);

/// Rasterizes a closed ring with the even-odd rule: a pixel is set iff its
/// center (ix + 0.5, iy + 0.5) lies inside. Geometry outside the canvas is
/// clipped.
RasterMask rasterize(std::span<const Point> ring, int width, int height);
RasterMask rasterize(const Polygon& poly, int width, int height);

/// |a ∩ b| / |a ∪ b|; 1.0 when both masks are empty.
double mask_iou(const RasterMask& a, const RasterMask& b);

/// Inward offset by d = area * (1 - ratio^2) / perimeter. Returns the
/// largest inner offset polygon; throws ShrinkCollapseError when the offset
/// consumes the polygon. ratio = 1 is the identity.
Polygon shrink_polygon(const Polygon& poly, double ratio);

/// Offset distance used by shrink_polygon for the given polygon and ratio.
double shrink_offset_distance(const Polygon& poly, double ratio);

/// Inward offset by an explicit distance in pixels.
Polygon shrink_polygon_at_distance(const Polygon& poly, double distance);

/// Distance from origin to the first intersection of the ray at angle_deg
/// with the contour. origin must be strictly inside.
double ray_to_contour_distance(Point origin, double angle_deg, const Polygon& poly);

/// Boundary length of the set region, via marching squares on pixel
/// centers. Used to invert the shrink offset from a raster kernel.
double mask_boundary_length(const RasterMask& mask);

/// 4-connected components of the set pixels, largest first.
std::vector<RasterMask> connected_components(const RasterMask& mask);

}  // namespace leafvein
