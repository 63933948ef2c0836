#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "leafvein/codec.hpp"
#include "leafvein/geometry.hpp"

namespace leafvein {

/// Canvas side used by the synthetic corpora; shapes are generated to fit
/// it with a margin.
inline constexpr int kSynthCanvas = 512;

enum class ShapeKind { rect, rotated_rect, sine_ribbon, arc_ribbon, wave_word };

ShapeKind shape_kind_from_string(const std::string& name);
std::string to_string(ShapeKind kind);

/// Deterministic shape factories (all coordinates in pixels).
Polygon make_rect(double cx, double cy, double length, double thickness);
Polygon make_rotated_rect(double cx, double cy, double length, double thickness,
                          double angle_deg);
/// Ribbon around y = amplitude * sin(2 pi periods t + phase) with normal
/// offsets of +-thickness / 2; amplitude is capped so the offset curves
/// cannot self-intersect.
Polygon make_sine_ribbon(double cx, double cy, double length, double thickness, double amplitude,
                         double periods, double phase_deg, double rotation_deg,
                         int samples_per_side = 48);
/// Annulus sector of mean radius `radius`, the given thickness and sweep.
Polygon make_arc_ribbon(double cx, double cy, double radius, double thickness, double sweep_deg,
                        double start_deg, int steps = 0);
/// Word-like ribbon: gentle sine centerline with smoothly modulated
/// thickness.
Polygon make_wave_word(double cx, double cy, double length, double thickness, double amplitude,
                       double rotation_deg);

/// count seeded random polygons of one kind. Same (kind, count, seed) always
/// produces the same polygons, independent of platform and thread count.
std::vector<Polygon> synth_corpus(ShapeKind kind, int count, std::uint64_t seed);

/// One cell of the parameter sweep. Failed encodes are excluded from the
/// statistics and reported in `failures`.
struct SweepRow {
    int n_d = 0;
    int n_p = 0;
    double mean_iou = 0.0;
    double min_iou = 0.0;
    double p5_iou = 0.0;
    int failures = 0;
};

struct SweepReport {
    std::string corpus_id;
    std::uint64_t seed = 0;
    std::vector<SweepRow> rows;
};

/// Per-shape roundtrip IoUs for one (n_d, n_p) cell; negative entries mark
/// encode failures.
std::vector<double> roundtrip_ious(std::span<const Polygon> corpus, const LvtConfig& cfg,
                                   int width, int height);

/// Roundtrip IoU over the full (n_d, n_p) grid.
SweepReport upper_bound_sweep(std::span<const Polygon> corpus, std::span<const int> n_d_set,
                              std::span<const int> n_p_set, const LvtConfig& base, int width,
                              int height);

std::string sweep_report_to_json(const SweepReport& report);
std::string sweep_report_to_table(const SweepReport& report);

/// Writes an SVG layering the source polygon, kernel outline, main vein,
/// lateral veins, thin veins, and the reconstructed contour.
void render_instance(const Polygon& poly, const LvtLabel& label,
                     const ReconstructedContour& contour, const std::string& path);

}  // namespace leafvein
