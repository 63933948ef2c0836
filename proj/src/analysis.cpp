#include "leafvein/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

#include "leafvein/parallel.hpp"
#include "leafvein/version.hpp"

namespace leafvein {

namespace {

constexpr double kPi = std::numbers::pi;

// Portable uniform draw: identical for a given seed on every platform,
// unlike std::uniform_real_distribution.
double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

std::vector<Point> ribbon(double length, double thickness, double amplitude, double periods,
                          double phase_rad, int samples, double thickness_wobble,
                          double wobble_phase_rad) {
    // Centerline y = A sin(omega t + phase), t in [0, 1]; both sides are
    // normal offsets. The caller caps the amplitude against the curvature.
    double omega = 2.0 * kPi * periods;
    std::vector<Point> top, bottom;
    top.reserve(samples + 1);
    bottom.reserve(samples + 1);
    for (int i = 0; i <= samples; ++i) {
        double t = static_cast<double>(i) / samples;
        double x = (t - 0.5) * length;
        double y = amplitude * std::sin(omega * t + phase_rad);
        double dy_dx = amplitude * omega * std::cos(omega * t + phase_rad) / length;
        double inv = 1.0 / std::sqrt(1.0 + dy_dx * dy_dx);
        Point n{-dy_dx * inv, inv};
        double half = 0.5 * thickness *
                      (1.0 + thickness_wobble * std::sin(2.0 * kPi * t + wobble_phase_rad));
        top.push_back({x - n.x * half, y - n.y * half});
        bottom.push_back({x + n.x * half, y + n.y * half});
    }
    std::vector<Point> ring = std::move(top);
    ring.insert(ring.end(), bottom.rbegin(), bottom.rend());
    return ring;
}

Polygon place(std::vector<Point> ring, double cx, double cy, double rotation_deg) {
    for (Point& p : ring) {
        p = rotate_deg(p, rotation_deg, {0.0, 0.0});
        p.x += cx;
        p.y += cy;
    }
    return Polygon(std::move(ring));
}

double cap_amplitude(double amplitude, double thickness, double length, double periods) {
    // Keep the inner offset curve regular: (thickness / 2) * kappa_max < 0.85
    // with kappa_max ~ A * omega^2 for the centerline sine.
    double omega = 2.0 * kPi * periods / length;
    double limit = 1.7 / (omega * omega * thickness);
    return std::min(amplitude, limit);
}

// Clockwise Moore-neighbor trace of the set region's outer boundary, as
// pixel centers. Display helper for the SVG layer.
std::vector<Point> trace_mask_outline(const RasterMask& mask) {
    static const int dx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
    static const int dy[8] = {0, 1, 1, 1, 0, -1, -1, -1};
    int sx = -1, sy = -1;
    for (int y = 0; y < mask.height && sx < 0; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (mask.test(x, y)) {
                sx = x;
                sy = y;
                break;
            }
        }
    }
    if (sx < 0) return {};
    std::vector<Point> contour{{static_cast<double>(sx), static_cast<double>(sy)}};
    int cx = sx, cy = sy;
    int px = sx - 1, py = sy;  // backtrack: the empty neighbor we came from
    const int px0 = px, py0 = py;
    std::size_t max_steps = 4 * mask.count_set() + 16;
    for (std::size_t step = 0; step < max_steps; ++step) {
        int d0 = 0;
        for (int d = 0; d < 8; ++d) {
            if (cx + dx[d] == px && cy + dy[d] == py) {
                d0 = d;
                break;
            }
        }
        bool moved = false;
        for (int k = 1; k <= 8; ++k) {
            int d = (d0 + k) % 8;
            int nx = cx + dx[d], ny = cy + dy[d];
            if (mask.test(nx, ny)) {
                int last = (d0 + k - 1) % 8;
                px = cx + dx[last];
                py = cy + dy[last];
                cx = nx;
                cy = ny;
                moved = true;
                break;
            }
        }
        if (!moved) break;  // isolated pixel
        if (cx == sx && cy == sy && px == px0 && py == py0) break;
        contour.push_back({static_cast<double>(cx), static_cast<double>(cy)});
    }
    return contour;
}

void svg_poly(std::string& out, std::span<const Point> pts, const char* cls, const char* stroke,
              bool closed) {
    char buf[64];
    out += closed ? "  <polygon class=\"" : "  <polyline class=\"";
    out += cls;
    out += "\" fill=\"none\" stroke=\"";
    out += stroke;
    out += "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) out += ' ';
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f", pts[i].x, pts[i].y);
        out += buf;
    }
    out += "\"/>\n";
}

void svg_line(std::string& out, Point a, Point b, const char* cls, const char* stroke) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "  <line class=\"%s\" stroke=\"%s\" x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" "
                  "y2=\"%.2f\"/>\n",
                  cls, stroke, a.x, a.y, b.x, b.y);
    out += buf;
}

}  // namespace

ShapeKind shape_kind_from_string(const std::string& name) {
    if (name == "rect") return ShapeKind::rect;
    if (name == "rotated_rect") return ShapeKind::rotated_rect;
    if (name == "sine_ribbon") return ShapeKind::sine_ribbon;
    if (name == "arc_ribbon") return ShapeKind::arc_ribbon;
    if (name == "wave_word") return ShapeKind::wave_word;
    throw ConfigError("unknown corpus kind \"" + name + "\"");
}

std::string to_string(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::rect: return "rect";
        case ShapeKind::rotated_rect: return "rotated_rect";
        case ShapeKind::sine_ribbon: return "sine_ribbon";
        case ShapeKind::arc_ribbon: return "arc_ribbon";
        case ShapeKind::wave_word: return "wave_word";
    }
    throw ConfigError("unknown corpus kind");
}

Polygon make_rect(double cx, double cy, double length, double thickness) {
    return make_rotated_rect(cx, cy, length, thickness, 0.0);
}

Polygon make_rotated_rect(double cx, double cy, double length, double thickness,
                          double angle_deg) {
    std::vector<Point> ring = {{-length / 2, -thickness / 2},
                               {length / 2, -thickness / 2},
                               {length / 2, thickness / 2},
                               {-length / 2, thickness / 2}};
    return place(std::move(ring), cx, cy, angle_deg);
}

Polygon make_sine_ribbon(double cx, double cy, double length, double thickness, double amplitude,
                         double periods, double phase_deg, double rotation_deg,
                         int samples_per_side) {
    amplitude = cap_amplitude(amplitude, thickness, length, periods);
    return place(ribbon(length, thickness, amplitude, periods, phase_deg * kPi / 180.0,
                        samples_per_side, 0.0, 0.0),
                 cx, cy, rotation_deg);
}

Polygon make_arc_ribbon(double cx, double cy, double radius, double thickness, double sweep_deg,
                        double start_deg, int steps) {
    if (sweep_deg <= 0.0 || sweep_deg >= 360.0) {
        throw ConfigError("arc sweep must be in (0, 360), got " + std::to_string(sweep_deg));
    }
    if (thickness >= 2.0 * radius) throw ConfigError("arc thickness exceeds the diameter");
    if (steps <= 0) steps = std::max(8, static_cast<int>(std::ceil(sweep_deg / 3.0)));
    double r_out = radius + thickness / 2.0;
    double r_in = radius - thickness / 2.0;
    std::vector<Point> ring;
    ring.reserve(2 * (steps + 1));
    for (int i = 0; i <= steps; ++i) {
        double a = (start_deg + sweep_deg * i / steps) * kPi / 180.0;
        ring.push_back({r_out * std::cos(a), r_out * std::sin(a)});
    }
    for (int i = steps; i >= 0; --i) {
        double a = (start_deg + sweep_deg * i / steps) * kPi / 180.0;
        ring.push_back({r_in * std::cos(a), r_in * std::sin(a)});
    }
    return place(std::move(ring), cx, cy, 0.0);
}

Polygon make_wave_word(double cx, double cy, double length, double thickness, double amplitude,
                       double rotation_deg) {
    const double periods = 0.75;
    amplitude = cap_amplitude(amplitude, thickness * 1.2, length, periods);
    return place(ribbon(length, thickness, amplitude, periods, 0.0, 40, 0.15, 1.1), cx, cy,
                 rotation_deg);
}

std::vector<Polygon> synth_corpus(ShapeKind kind, int count, std::uint64_t seed) {
    if (count < 1) throw ConfigError("corpus count must be >= 1");
    std::mt19937_64 rng(seed + 1000003ULL * static_cast<std::uint64_t>(kind));
    const double c = kSynthCanvas / 2.0;
    std::vector<Polygon> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        double cx = uniform(rng, c - 12.0, c + 12.0);
        double cy = uniform(rng, c - 12.0, c + 12.0);
        switch (kind) {
            case ShapeKind::rect:
            case ShapeKind::rotated_rect: {
                double length = uniform(rng, 80.0, 336.0);
                double aspect = uniform(rng, 1.0, 10.0);
                double thickness = std::max(16.0, length / aspect);
                double angle =
                    kind == ShapeKind::rotated_rect ? uniform(rng, 0.0, 360.0) : 0.0;
                out.push_back(make_rotated_rect(cx, cy, length, thickness, angle));
                break;
            }
            case ShapeKind::sine_ribbon: {
                double length = uniform(rng, 160.0, 352.0);
                double thickness = uniform(rng, 22.0, 44.0);
                double amplitude = thickness * uniform(rng, 0.2, 0.6);
                double periods = uniform(rng, 0.5, 1.25);
                double phase = uniform(rng, 0.0, 360.0);
                double rotation = uniform(rng, 0.0, 360.0);
                out.push_back(make_sine_ribbon(cx, cy, length, thickness, amplitude, periods,
                                               phase, rotation));
                break;
            }
            case ShapeKind::arc_ribbon: {
                double radius = uniform(rng, 70.0, 170.0);
                double thickness = std::min(uniform(rng, 22.0, 44.0), 0.8 * radius);
                double sweep = uniform(rng, 60.0, 240.0);
                double start = uniform(rng, 0.0, 360.0);
                out.push_back(make_arc_ribbon(cx, cy, radius, thickness, sweep, start));
                break;
            }
            case ShapeKind::wave_word: {
                double length = uniform(rng, 140.0, 300.0);
                double thickness = uniform(rng, 24.0, 48.0);
                double amplitude = thickness * uniform(rng, 0.1, 0.4);
                double rotation = uniform(rng, 0.0, 360.0);
                out.push_back(make_wave_word(cx, cy, length, thickness, amplitude, rotation));
                break;
            }
        }
    }
    return out;
}

std::vector<double> roundtrip_ious(std::span<const Polygon> corpus, const LvtConfig& cfg,
                                   int width, int height) {
    std::vector<double> ious(corpus.size(), -1.0);
    parallel_for(corpus.size(), [&](std::size_t i) {
        try {
            ious[i] = roundtrip_iou(corpus[i], cfg, width, height);
        } catch (const Error&) {
            ious[i] = -1.0;  // recorded as an encode failure, not a score
        }
    });
    return ious;
}

SweepReport upper_bound_sweep(std::span<const Polygon> corpus, std::span<const int> n_d_set,
                              std::span<const int> n_p_set, const LvtConfig& base, int width,
                              int height) {
    if (corpus.empty()) throw Error("sweep needs a non-empty corpus");
    if (n_d_set.empty() || n_p_set.empty()) throw Error("sweep needs non-empty parameter grids");
    SweepReport report;
    for (int n_d : n_d_set) {
        for (int n_p : n_p_set) {
            LvtConfig cfg = base;
            cfg.n_d = n_d;
            cfg.n_p = n_p;
            cfg.validate();
            std::vector<double> ious = roundtrip_ious(corpus, cfg, width, height);
            std::vector<double> ok;
            ok.reserve(ious.size());
            for (double v : ious) {
                if (v >= 0.0) ok.push_back(v);
            }
            SweepRow row;
            row.n_d = n_d;
            row.n_p = n_p;
            row.failures = static_cast<int>(ious.size() - ok.size());
            if (!ok.empty()) {
                std::sort(ok.begin(), ok.end());
                double sum = 0.0;
                for (double v : ok) sum += v;
                row.mean_iou = sum / ok.size();
                row.min_iou = ok.front();
                row.p5_iou = ok[(ok.size() - 1) * 5 / 100];
            }
            report.rows.push_back(row);
        }
    }
    return report;
}

std::string sweep_report_to_json(const SweepReport& report) {
    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["corpus_id"] = report.corpus_id;
    j["seed"] = report.seed;
    j["rows"] = nlohmann::ordered_json::array();
    for (const SweepRow& r : report.rows) {
        j["rows"].push_back({{"n_d", r.n_d},
                             {"n_p", r.n_p},
                             {"mean_iou", r.mean_iou},
                             {"min_iou", r.min_iou},
                             {"p5_iou", r.p5_iou},
                             {"failures", r.failures}});
    }
    return j.dump(2) + "\n";
}

std::string sweep_report_to_table(const SweepReport& report) {
    std::string out = "corpus: " + report.corpus_id + "  seed: " + std::to_string(report.seed) +
                      "\n n_d  n_p  mean_iou   min_iou    p5_iou  failures\n";
    char buf[128];
    for (const SweepRow& r : report.rows) {
        std::snprintf(buf, sizeof(buf), "%4d %4d  %8.4f  %8.4f  %8.4f  %8d\n", r.n_d, r.n_p,
                      r.mean_iou, r.min_iou, r.p5_iou, r.failures);
        out += buf;
    }
    return out;
}

void render_instance(const Polygon& poly, const LvtLabel& label,
                     const ReconstructedContour& contour, const std::string& path) {
    BoundingBox b = poly.bbox();
    int w = std::max(label.kernel.width, static_cast<int>(std::ceil(b.max_x)) + 8);
    int h = std::max(label.kernel.height, static_cast<int>(std::ceil(b.max_y)) + 8);

    std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
           "\" height=\"" + std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " +
           std::to_string(h) + "\">\n";
    svg_poly(svg, poly.vertices(), "source", "#1f77b4", true);
    std::vector<Point> kernel_outline = trace_mask_outline(label.kernel);
    if (!kernel_outline.empty()) {
        svg_poly(svg, kernel_outline, "kernel", "#2ca02c", true);
    }
    if (!label.lateral_starts.empty()) {
        svg_poly(svg, label.lateral_starts, "mainvein", "#9467bd", false);
    }
    for (const LateralVeinPair& lv : label.veins.laterals) {
        svg_line(svg, lv.start, lv.end_up(), "lateral", "#d62728");
        svg_line(svg, lv.start, lv.end_down(), "lateral", "#d62728");
    }
    for (const ThinVein& tv : label.veins.thins) {
        svg_line(svg, tv.start, tv.end(), "thin", "#ff7f0e");
    }
    svg_poly(svg, contour.vertices, "contour", "#000000", true);
    svg += "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << svg;
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace leafvein
