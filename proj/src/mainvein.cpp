#include "leafvein/mainvein.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace leafvein {

namespace {

struct MaskExtent {
    int x_min, x_max, y_min, y_max;
    bool any;
};

MaskExtent mask_extent(const RasterMask& mask) {
    MaskExtent e{0, 0, 0, 0, false};
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.test(x, y)) continue;
            if (!e.any) {
                e = {x, x, y, y, true};
            } else {
                e.x_min = std::min(e.x_min, x);
                e.x_max = std::max(e.x_max, x);
                e.y_min = std::min(e.y_min, y);
                e.y_max = std::max(e.y_max, y);
            }
        }
    }
    return e;
}

// Median set pixel of column x (or row y when transposed). Returns false
// when the column is empty.
bool column_median(const RasterMask& mask, int fixed, bool x_fixed, double* median) {
    std::vector<int> hits;
    if (x_fixed) {
        for (int y = 0; y < mask.height; ++y) {
            if (mask.test(fixed, y)) hits.push_back(y);
        }
    } else {
        for (int x = 0; x < mask.width; ++x) {
            if (mask.test(x, fixed)) hits.push_back(x);
        }
    }
    if (hits.empty()) return false;
    *median = hits[hits.size() / 2];
    return true;
}

// Nearest column (row) to target that has at least one set pixel. Ties go to
// the smaller index.
int nearest_nonempty(const RasterMask& mask, int target, bool x_fixed, int limit) {
    double unused;
    for (int off = 0; off <= limit; ++off) {
        if (target - off >= 0 && column_median(mask, target - off, x_fixed, &unused)) {
            return target - off;
        }
        if (off > 0 && target + off < limit && column_median(mask, target + off, x_fixed, &unused)) {
            return target + off;
        }
    }
    throw EmptyKernelError("no non-empty column near " + std::to_string(target));
}

// Least squares fit of degree K on (u, y) with u pre-scaled to [0, 1].
// Normal equations solved by Gaussian elimination with partial pivoting.
std::vector<double> polyfit(const std::vector<double>& u, const std::vector<double>& y, int k) {
    const int n = k + 1;
    std::vector<double> ata(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<double> atb(n, 0.0);
    std::vector<double> pow_u(n);
    for (std::size_t s = 0; s < u.size(); ++s) {
        pow_u[0] = 1.0;
        for (int j = 1; j < n; ++j) pow_u[j] = pow_u[j - 1] * u[s];
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) ata[r * n + c] += pow_u[r] * pow_u[c];
            atb[r] += pow_u[r] * y[s];
        }
    }
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(ata[r * n + col]) > std::abs(ata[pivot * n + col])) pivot = r;
        }
        if (std::abs(ata[pivot * n + col]) < 1e-12) {
            throw UnderdeterminedFitError("singular normal equations in polynomial fit");
        }
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(ata[pivot * n + c], ata[col * n + c]);
            std::swap(atb[pivot], atb[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            double f = ata[r * n + col] / ata[col * n + col];
            for (int c = col; c < n; ++c) ata[r * n + c] -= f * ata[col * n + c];
            atb[r] -= f * atb[col];
        }
    }
    std::vector<double> out(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = atb[r];
        for (int c = r + 1; c < n; ++c) s -= ata[r * n + c] * out[c];
        out[r] = s / ata[r * n + r];
    }
    return out;
}

// Rewrites sum a_k * ((x - x0) / s)^k as monomial coefficients in x.
std::vector<double> expand_to_monomial(const std::vector<double>& a, double x0, double s) {
    // Horner in coefficient space: poly <- poly * ((x - x0) / s) + a_k.
    std::vector<double> poly{0.0};
    for (int k = static_cast<int>(a.size()) - 1; k >= 0; --k) {
        std::vector<double> next(poly.size() + 1, 0.0);
        for (std::size_t j = 0; j < poly.size(); ++j) {
            next[j + 1] += poly[j] / s;
            next[j] -= poly[j] * x0 / s;
        }
        next[0] += a[k];
        poly = std::move(next);
    }
    poly.resize(a.size(), 0.0);
    return poly;
}

}  // namespace

double MainVein::evaluate(double x) const {
    double v = 0.0;
    for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) v = v * x + coeffs[k];
    return v;
}

double MainVein::derivative(double x) const {
    double v = 0.0;
    for (int k = static_cast<int>(coeffs.size()) - 1; k >= 1; --k) v = v * x + coeffs[k] * k;
    return v;
}

double MainVein::tangent_at(double x) const {
    if (fit_x_max > fit_x_min) x = std::clamp(x, fit_x_min, fit_x_max);
    return std::atan(derivative(x)) * 180.0 / std::numbers::pi;
}

Point MainVein::point_at(double x) const {
    if (fit_x_max > fit_x_min && (x < fit_x_min || x > fit_x_max)) {
        double edge = x < fit_x_min ? fit_x_min : fit_x_max;
        return {x, evaluate(edge) + derivative(edge) * (x - edge)};
    }
    return {x, evaluate(x)};
}

Point MainVein::to_image(Point frame_point) const {
    return rotate_deg(frame_point, frame_angle_deg, frame_origin);
}

Point MainVein::to_frame(Point image_point) const {
    return rotate_deg(image_point, -frame_angle_deg, frame_origin);
}

MainVein MainVein::with_x_range(double lo, double hi) const {
    MainVein out = *this;
    out.x_min = lo;
    out.x_max = hi;
    return out;
}

std::vector<Point> middle_sample(const RasterMask& mask, int n) {
    if (n < 2) throw ConfigError("middle_sample needs n >= 2, got " + std::to_string(n));
    MaskExtent e = mask_extent(mask);
    if (!e.any) throw EmptyKernelError("kernel mask has no set pixels");
    int ext_x = e.x_max - e.x_min;
    int ext_y = e.y_max - e.y_min;
    if (ext_x == 0 && ext_y == 0) {
        throw EmptyKernelError("kernel mask extent is degenerate (single pixel)");
    }

    const bool along_x = ext_x > ext_y;
    const int lo = along_x ? e.x_min : e.y_min;
    const int hi = along_x ? e.x_max : e.y_max;
    const int limit = along_x ? mask.width : mask.height;

    std::vector<Point> pts;
    pts.reserve(n);
    for (int i = 1; i <= n; ++i) {
        double target = lo + static_cast<double>(i) * (hi - lo) / (n + 1);
        int col = static_cast<int>(std::lround(target));
        double median;
        if (!column_median(mask, col, along_x, &median)) {
            col = nearest_nonempty(mask, col, along_x, limit);
            column_median(mask, col, along_x, &median);
        }
        if (along_x) {
            pts.push_back({static_cast<double>(col), median});
        } else {
            pts.push_back({median, static_cast<double>(col)});
        }
    }
    return pts;
}

namespace {

// Rotates the center points into the frame defined by their end-to-end
// direction and least-squares fits the polynomial there. The usable span is
// the kernel's own extent projected onto the frame axis, not just the
// center points' span, so start sampling stays stable under rotation.
MainVein fit_in_frame(const RasterMask& mask, const std::vector<Point>& cpts, int degree) {
    Point c0 = cpts.front();
    Point dir = cpts.back() - c0;
    if (norm(dir) < 1e-9) {
        throw UnderdeterminedFitError("center points span no direction");
    }
    double phi = normalize_deg(std::atan2(dir.y, dir.x) * 180.0 / std::numbers::pi);

    MainVein mv;
    mv.frame_angle_deg = phi;
    mv.frame_origin = c0;

    std::vector<Point> rotated(cpts.size());
    for (std::size_t i = 0; i < cpts.size(); ++i) rotated[i] = mv.to_frame(cpts[i]);

    Point axis = unit_vector(phi);
    double u_lo = 0.0, u_hi = 0.0;
    bool first = true;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.test(x, y)) continue;
            double u = axis.x * (x - c0.x) + axis.y * (y - c0.y);
            if (first) {
                u_lo = u_hi = u;
                first = false;
            } else {
                u_lo = std::min(u_lo, u);
                u_hi = std::max(u_hi, u);
            }
        }
    }
    // Pixel centers underestimate the continuous region by half a pixel on
    // each side.
    mv.x_min = c0.x + u_lo - 0.5;
    mv.x_max = c0.x + u_hi + 0.5;
    if (!(mv.x_max > mv.x_min)) {
        throw UnderdeterminedFitError("kernel extent collapses in the rotated frame");
    }

    // Fit on a [0, 1]-scaled abscissa for conditioning, then expand back to
    // monomials in the frame x.
    double span = mv.x_max - mv.x_min;
    std::vector<double> u(cpts.size()), yv(cpts.size());
    for (std::size_t i = 0; i < cpts.size(); ++i) {
        u[i] = (rotated[i].x - mv.x_min) / span;
        yv[i] = rotated[i].y;
    }
    std::vector<double> distinct = u;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end(),
                               [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                   distinct.end());
    int k_max = std::min<int>(degree, static_cast<int>(distinct.size()) - 1);
    if (k_max < 1) throw UnderdeterminedFitError("fewer than two distinct sample columns");

    // Prefer the lowest degree whose residual is close to the best one;
    // higher degrees chase quantization bumps at the ends of straight
    // kernels and then curl there.
    auto rms_of = [&](const std::vector<double>& c) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            double f = 0.0;
            for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) f = f * u[i] + c[k];
            s += (f - yv[i]) * (f - yv[i]);
        }
        return std::sqrt(s / u.size());
    };
    std::vector<std::vector<double>> fits(k_max + 1);
    std::vector<double> rms(k_max + 1, 0.0);
    for (int k = 1; k <= k_max; ++k) {
        fits[k] = polyfit(u, yv, k);
        rms[k] = rms_of(fits[k]);
    }
    double best_rms = *std::min_element(rms.begin() + 1, rms.end());
    int chosen = k_max;
    for (int k = 1; k <= k_max; ++k) {
        if (rms[k] <= std::max(best_rms * 1.15, best_rms + 0.35)) {
            chosen = k;
            break;
        }
    }

    std::vector<double> scaled = fits[chosen];
    scaled.resize(degree + 1, 0.0);  // identical polynomial, contracted length
    mv.coeffs = expand_to_monomial(scaled, mv.x_min, span);
    mv.degree = degree;
    auto [lo_it, hi_it] = std::minmax_element(u.begin(), u.end());
    mv.fit_x_min = mv.x_min + *lo_it * span;
    mv.fit_x_max = mv.x_min + *hi_it * span;
    return mv;
}

// Re-samples center points inside an estimated frame: n interior stations
// across the projected extent, median of the cross-track coordinates of the
// pixels in a narrow band around each station. Unlike the axis-aligned
// first pass this does not clip corners of tilted kernels.
std::vector<Point> refine_centers(const RasterMask& mask, const MainVein& mv, int n) {
    std::vector<double> us, vs;
    us.reserve(mask.count_set());
    vs.reserve(mask.count_set());
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.test(x, y)) continue;
            Point f = mv.to_frame({static_cast<double>(x), static_cast<double>(y)});
            us.push_back(f.x);
            vs.push_back(f.y);
        }
    }
    double span = mv.x_max - mv.x_min;
    struct Band {
        double target;
        std::vector<double> values;
    };
    std::vector<Band> bands;
    bands.reserve(n);
    for (int i = 1; i <= n; ++i) {
        Band band{mv.x_min + i * span / (n + 1), {}};
        double halfwidth = 0.75;
        while (band.values.empty() && halfwidth < span) {
            for (std::size_t k = 0; k < us.size(); ++k) {
                if (std::abs(us[k] - band.target) <= halfwidth) band.values.push_back(vs[k]);
            }
            halfwidth *= 2.0;
        }
        if (!band.values.empty()) bands.push_back(std::move(band));
    }
    if (bands.empty()) return {};

    // Bands over oblique instance ends only cut a corner of the cross
    // section; their medians sit off the centerline and bend the fit.
    std::vector<std::size_t> counts;
    counts.reserve(bands.size());
    for (const Band& b : bands) counts.push_back(b.values.size());
    std::sort(counts.begin(), counts.end());
    std::size_t median_count = counts[counts.size() / 2];

    std::vector<Point> centers;
    centers.reserve(bands.size());
    for (Band& band : bands) {
        if (bands.size() > 4 && band.values.size() * 2 < median_count) continue;
        std::sort(band.values.begin(), band.values.end());
        centers.push_back(mv.to_image({band.target, band.values[band.values.size() / 2]}));
    }
    return centers;
}

}  // namespace

MainVein fit_main_vein(const RasterMask& mask, int n, int degree) {
    if (degree < 1) throw ConfigError("polynomial degree must be >= 1");
    if (n < degree + 1) {
        throw UnderdeterminedFitError("fit needs n >= degree + 1 samples (n = " +
                                      std::to_string(n) + ", degree = " + std::to_string(degree) +
                                      ")");
    }
    std::vector<Point> cpts = middle_sample(mask, n);
    MainVein fitted = fit_in_frame(mask, cpts, degree);

    // Refinement passes: the axis-aligned sampling of middle_sample clips
    // corners of tilted kernels and skews the frame estimate by a few
    // degrees, and a handful of quantized medians makes the fit's ends
    // noisy. Resampling densely in the estimated frame removes the bias and
    // averages the noise down; iterating lets the frame settle onto the
    // kernel's own axis.
    const int stations = std::max(n, 17);
    for (int pass = 0; pass < 3; ++pass) {
        std::vector<Point> refined = refine_centers(mask, fitted, stations);
        if (static_cast<int>(refined.size()) < degree + 1 || refined.size() < 2) break;
        try {
            MainVein next = fit_in_frame(mask, refined, degree);
            double turn = std::abs(normalize_deg(next.frame_angle_deg - fitted.frame_angle_deg +
                                                 180.0) -
                                   180.0);
            fitted = next;
            if (turn < 0.25) break;
        } catch (const UnderdeterminedFitError&) {
            break;
        }
    }
    return fitted;
}

std::vector<StartPointSample> sample_lateral_starts(const MainVein& mv, int n) {
    if (n < 2) throw ConfigError("need at least 2 start points, got " + std::to_string(n));
    if (!(mv.x_max > mv.x_min)) throw Error("main vein has a degenerate x range");
    std::vector<StartPointSample> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        double x = mv.x_min + (mv.x_max - mv.x_min) * i / (n - 1);
        out.push_back(
            {mv.to_image(mv.point_at(x)), normalize_deg(mv.tangent_at(x) + mv.frame_angle_deg)});
    }
    return out;
}

}  // namespace leafvein
