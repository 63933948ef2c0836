#pragma once

#include <optional>
#include <string>
#include <vector>

#include "leafvein/geometry.hpp"
#include "leafvein/mainvein.hpp"
#include "leafvein/veins.hpp"

namespace leafvein {

/// All codec parameters. n_p is the number of lateral start points, n_d the
/// number of polar directions, degree the polynomial degree of the main
/// vein. short_side is the resize target the incentive coefficient
/// normalizes lengths against.
struct LvtConfig {
    int n_p = 5;
    int n_d = 8;
    int degree = 3;
    double shrink_ratio = 0.6;
    double rho = 1.0;
    double alpha = 1.0;
    double beta = 0.25;
    double short_side = 640.0;

    void validate() const;
    int effective_degree() const { return degree < n_p - 1 ? degree : n_p - 1; }

    /// Best settings for line-level / multi-oriented text.
    static LvtConfig line_level();
    /// Best settings for curved text.
    static LvtConfig curved();
};

/// Vein lengths recorded at one pixel. lengths has n_d entries; zero marks a
/// direction with no vein at this point (real lengths are always positive).
struct LengthRecord {
    int x = 0;
    int y = 0;
    std::vector<double> lengths;
};

/// Answers length queries for vein growth. The encoder's label satisfies
/// this; a dense predicted length map would too. max_distance bounds how
/// far from the query point a stored value may be taken from; pass
/// infinity for a required length.
class LengthLookup {
public:
    virtual ~LengthLookup() = default;
    virtual std::optional<double> length_at(Point p, int direction_index,
                                            double max_distance) const = 0;
};

/// Ground-truth label of one instance: the kernel mask plus vein lengths
/// recorded at the start points. veins and the start lists are in-memory
/// conveniences (rendering, tests); serialization carries kernel + records.
struct LvtLabel {
    RasterMask kernel;
    std::vector<LengthRecord> records;
    VeinSet veins;
    std::vector<Point> lateral_starts;
    std::vector<Point> thin_starts;
};

/// Lookup over a label's records: exact pixel match first, then the nearest
/// record that has the queried direction filled, within the caller's
/// distance bound.
class LabelLengthLookup : public LengthLookup {
public:
    explicit LabelLengthLookup(const LvtLabel& label);
    std::optional<double> length_at(Point p, int direction_index,
                                    double max_distance) const override;

private:
    const LvtLabel& label_;
};

/// Decoded contour: lateral and thin vein endpoints in clockwise order (up
/// side along the main vein, then down side reversed, thin endpoints
/// adjacent to their parent lateral endpoint). When an end lateral's ray
/// exits through the instance's end rather than its side, the assembly
/// replaces the clipped endpoints with the intersections of the side
/// support lines and the end cap line; the counters keep the vertex
/// bookkeeping exact.
struct ReconstructedContour {
    std::vector<Point> vertices;
    std::string source;
    int skipped_thins = 0;    // thin veins without a usable length
    int clipped_dropped = 0;  // cap-clipped endpoints removed
    int cap_vertices = 0;     // synthesized cap corners inserted
};

/// Estimated inward-offset distance that produced this kernel, inverted
/// from the kernel's raster area and boundary length for the given ratio.
double estimate_shrink_offset(const RasterMask& kernel, double ratio);

/// Fits the main vein from the kernel and widens its x range by the
/// estimated shrink offset on both ends, recovering the extent the shrink
/// removed. Encoder and decoder share this so their start points agree.
MainVein fit_sampling_vein(const RasterMask& kernel, const LvtConfig& cfg);

/// Encodes a polygon: kernel = rasterized inward offset, main vein fitted
/// from the kernel, veins grown against the full polygon, lengths recorded
/// per polar direction at the (nearest-pixel) start points.
LvtLabel encode(const Polygon& poly, const LvtConfig& cfg, int width, int height);

/// Rebuilds a contour from a kernel mask and a length lookup. A missing
/// length for a lateral vein is an error; a missing thin-vein length skips
/// that vein.
ReconstructedContour decode(const RasterMask& kernel, const LengthLookup& lengths,
                            const LvtConfig& cfg, const std::string& source = "");

/// IoU between the rasterized source polygon and its encode-decode rebuild.
double roundtrip_iou(const Polygon& poly, const LvtConfig& cfg, int width, int height);

}  // namespace leafvein
