#pragma once

#include <vector>

#include "leafvein/geometry.hpp"

namespace leafvein {

/// Polynomial main vein fitted in a rotated frame. The frame is obtained by
/// rotating image space by -frame_angle_deg about frame_origin, so that the
/// vein's overall direction maps onto +x. coeffs are monomial coefficients
/// of y = f(x) in that frame; x_range is the usable span of frame x values
/// (the kernel's extent projected onto the frame axis).
struct MainVein {
    std::vector<double> coeffs;  // coeffs[k] multiplies x^k
    int degree = 1;
    double frame_angle_deg = 0.0;
    Point frame_origin;
    double x_min = 0.0;
    double x_max = 0.0;
    // Span actually covered by fit samples. Tangents are not extrapolated
    // beyond it (polynomial derivatives curl outside the data).
    double fit_x_min = 0.0;
    double fit_x_max = 0.0;

    double evaluate(double x) const;
    double derivative(double x) const;
    /// Slope angle in degrees at x, with x clamped to the fitted span.
    double tangent_at(double x) const;
    /// Frame-space curve point at x; beyond the fitted span the curve
    /// continues straight along its end tangent.
    Point point_at(double x) const;

    /// Maps a frame-space point back to image space.
    Point to_image(Point frame_point) const;
    /// Maps an image-space point into the frame.
    Point to_frame(Point image_point) const;

    MainVein with_x_range(double lo, double hi) const;
};

/// One lateral-vein start point with its tangent angle in image space.
struct StartPointSample {
    Point point;
    double tangent_angle_deg = 0.0;  // in [0, 360)
};

/// Samples n center points of the mask. When the x extent exceeds the y
/// extent, n interior columns x = x_min + i * (x_max - x_min) / (n + 1)
/// (i = 1..n, rounded to the nearest column) are probed and the median set
/// pixel of each column is taken; otherwise the transposed procedure runs.
/// A probed column with no set pixel falls back to the nearest non-empty
/// column. Points come back ordered along the sampled axis.
std::vector<Point> middle_sample(const RasterMask& mask, int n);

/// Fits a degree-K polynomial to n middle samples: computes the angle of
/// cpts[0] -> cpts[n-1], rotates the samples into the frame where that
/// direction is +x, and least-squares fits y = f(x). Border padding of the
/// mask is a pure coordinate shift and cancels out, so none is materialized.
MainVein fit_main_vein(const RasterMask& mask, int n, int degree);

/// Samples n equidistant frame-x positions across mv's x_range (endpoints
/// included), evaluates the curve and tangent there, and maps both back to
/// image space. Tangents are reported in [0, 360).
std::vector<StartPointSample> sample_lateral_starts(const MainVein& mv, int n);

}  // namespace leafvein
