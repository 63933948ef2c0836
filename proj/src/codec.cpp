#include "leafvein/codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace leafvein {

namespace {

std::int64_t pixel_key(int x, int y) {
    return (static_cast<std::int64_t>(y) << 32) | static_cast<std::uint32_t>(x);
}

struct RecordIndex {
    std::unordered_map<std::int64_t, std::size_t> by_pixel;
};

void add_record(std::vector<LengthRecord>& records, RecordIndex& index, int n_d, Point at,
                int dir, double length) {
    int px = static_cast<int>(std::lround(at.x));
    int py = static_cast<int>(std::lround(at.y));
    auto [it, inserted] = index.by_pixel.try_emplace(pixel_key(px, py), records.size());
    if (inserted) {
        records.push_back({px, py, std::vector<double>(n_d, 0.0)});
    }
    LengthRecord& rec = records[it->second];
    if (rec.lengths[dir] == 0.0) rec.lengths[dir] = length;
}

struct DirectedStart {
    StartPointSample sample;
    double rect_up = 0.0, rect_down = 0.0;
    int idx_up = 0, idx_down = 0;
};

std::vector<DirectedStart> directed_starts(const std::vector<StartPointSample>& starts,
                                           const PolarGrid& grid) {
    std::vector<DirectedStart> out;
    out.reserve(starts.size());
    for (const StartPointSample& s : starts) {
        DirectedStart d;
        d.sample = s;
        auto [up, down] = lateral_directions(s.tangent_angle_deg);
        d.rect_up = rectify_direction(up, grid);
        d.rect_down = rectify_direction(down, grid);
        d.idx_up = grid.index_of(d.rect_up);
        d.idx_down = grid.index_of(d.rect_down);
        out.push_back(d);
    }
    return out;
}

}  // namespace

void LvtConfig::validate() const {
    if (n_p < 2) throw ConfigError("n_p must be >= 2, got " + std::to_string(n_p));
    if (n_d < 4) throw ConfigError("n_d must be >= 4, got " + std::to_string(n_d));
    if (degree < 1) throw ConfigError("degree must be >= 1, got " + std::to_string(degree));
    if (!(shrink_ratio > 0.0 && shrink_ratio < 1.0)) {
        throw ConfigError("shrink_ratio must be in (0, 1), got " + std::to_string(shrink_ratio));
    }
    if (!(rho > 0.0)) throw ConfigError("rho must be > 0, got " + std::to_string(rho));
    if (!(short_side > 0.0)) {
        throw ConfigError("short_side must be > 0, got " + std::to_string(short_side));
    }
}

LvtConfig LvtConfig::line_level() {
    LvtConfig cfg;
    cfg.n_d = 8;
    cfg.n_p = 9;
    return cfg;
}

LvtConfig LvtConfig::curved() {
    LvtConfig cfg;
    cfg.n_d = 16;
    cfg.n_p = 5;
    return cfg;
}

LabelLengthLookup::LabelLengthLookup(const LvtLabel& label) : label_(label) {}

std::optional<double> LabelLengthLookup::length_at(Point p, int direction_index,
                                                   double max_distance) const {
    int px = static_cast<int>(std::lround(p.x));
    int py = static_cast<int>(std::lround(p.y));
    const LengthRecord* best = nullptr;
    double best_dist = max_distance;
    for (const LengthRecord& rec : label_.records) {
        if (direction_index < 0 || direction_index >= static_cast<int>(rec.lengths.size())) {
            continue;
        }
        if (rec.lengths[direction_index] <= 0.0) continue;
        if (rec.x == px && rec.y == py) return rec.lengths[direction_index];
        double d = std::hypot(p.x - rec.x, p.y - rec.y);
        if (d < best_dist) {
            best_dist = d;
            best = &rec;
        }
    }
    if (best != nullptr) return best->lengths[direction_index];

    // No record carries this direction near the query. Fall back to the
    // nearest record's circularly closest filled direction, so the lookup
    // stays total over the label's coverage.
    const LengthRecord* nearest = nullptr;
    double nearest_dist = max_distance;
    for (const LengthRecord& rec : label_.records) {
        double d = std::hypot(p.x - rec.x, p.y - rec.y);
        if (d < nearest_dist) {
            nearest_dist = d;
            nearest = &rec;
        }
    }
    if (nearest == nullptr) return std::nullopt;
    int m = static_cast<int>(nearest->lengths.size());
    int best_gap = m;
    std::optional<double> value;
    for (int i = 0; i < m; ++i) {
        if (nearest->lengths[i] <= 0.0) continue;
        int gap = std::abs(i - direction_index);
        gap = std::min(gap, m - gap);
        if (gap < best_gap) {
            best_gap = gap;
            value = nearest->lengths[i];
        }
    }
    return value;
}

double estimate_shrink_offset(const RasterMask& kernel, double ratio) {
    double area = static_cast<double>(kernel.count_set());
    if (area <= 0.0) return 0.0;
    double boundary = mask_boundary_length(kernel);
    if (boundary <= 0.0) return 0.0;
    // Invert d = A (1 - r^2) / L with the original area and perimeter
    // modeled from the kernel's: A = A_k + L_k d + 4 d^2, L = L_k + 8 d
    // (exact for rectangles). Gives a quadratic with one positive root.
    double r2 = ratio * ratio;
    double quad = 4.0 * (1.0 + r2);
    double lin = boundary * r2;
    double con = -(1.0 - r2) * area;
    return (-lin + std::sqrt(lin * lin - 4.0 * quad * con)) / (2.0 * quad);
}

MainVein fit_sampling_vein(const RasterMask& kernel, const LvtConfig& cfg) {
    MainVein mv = fit_main_vein(kernel, cfg.n_p, cfg.effective_degree());
    double d = estimate_shrink_offset(kernel, cfg.shrink_ratio);
    return mv.with_x_range(mv.x_min - d, mv.x_max + d);
}

LvtLabel encode(const Polygon& poly, const LvtConfig& cfg, int width, int height) {
    cfg.validate();
    BoundingBox b = poly.bbox();
    if (b.min_x < -1e-9 || b.min_y < -1e-9 || b.max_x > width + 1e-9 || b.max_y > height + 1e-9) {
        throw Error("polygon does not fit the canvas");
    }

    LvtLabel label;
    try {
        Polygon shrunk = shrink_polygon(poly, cfg.shrink_ratio);
        label.kernel = rasterize(shrunk, width, height);
    } catch (const ShrinkCollapseError& e) {
        throw EncodeDegenerateError(e.what());
    }
    if (label.kernel.count_set() == 0) {
        throw EncodeDegenerateError("kernel rasterized to an empty mask");
    }

    MainVein mv;
    try {
        mv = fit_sampling_vein(label.kernel, cfg);
    } catch (const EmptyKernelError& e) {
        throw EncodeDegenerateError(std::string("kernel too small to sample: ") + e.what());
    }

    // End start points can land outside the polygon when the estimated
    // extension overshoots; pull them back along the curve.
    std::vector<StartPointSample> starts;
    starts.reserve(cfg.n_p);
    double x_center = 0.5 * (mv.x_min + mv.x_max);
    for (int i = 0; i < cfg.n_p; ++i) {
        double x = mv.x_min + (mv.x_max - mv.x_min) * i / (cfg.n_p - 1);
        auto inside = [&](double xv) {
            Point p = mv.to_image(mv.point_at(xv));
            return poly.contains(p) && poly.distance_to_boundary(p) > 0.25;
        };
        int guard = 0;
        while (!inside(x)) {
            double step = x < x_center ? 0.5 : -0.5;
            if (std::abs(x_center - x) <= 0.5 || ++guard > 4096) {
                throw EncodeDegenerateError("main vein does not stay inside the polygon");
            }
            x += step;
        }
        starts.push_back({mv.to_image(mv.point_at(x)),
                          normalize_deg(mv.tangent_at(x) + mv.frame_angle_deg)});
    }

    PolarGrid grid(cfg.n_d);
    label.veins = grow_veins(starts, poly, grid);

    for (const StartPointSample& s : starts) label.lateral_starts.push_back(s.point);
    for (const ThinVein& t : label.veins.thins) label.thin_starts.push_back(t.start);

    RecordIndex index;
    for (const LateralVeinPair& lv : label.veins.laterals) {
        add_record(label.records, index, cfg.n_d, lv.start, grid.index_of(lv.rect_up), lv.len_up);
        add_record(label.records, index, cfg.n_d, lv.start, grid.index_of(lv.rect_down),
                   lv.len_down);
    }
    for (const ThinVein& tv : label.veins.thins) {
        add_record(label.records, index, cfg.n_d, tv.start, grid.index_of(tv.direction_deg),
                   tv.length);
    }
    return label;
}

namespace {

struct ChainEntry {
    Point p;
    int station = 0;
    bool up_side = true;
    bool clipped = false;  // ray exited through the instance cap
};

// Intersection of the line through a and b with the line through q along c.
std::optional<Point> line_intersect(Point a, Point b, Point q, Point c) {
    Point e = b - a;
    double denom = cross(e, c);
    if (std::abs(denom) < 1e-9 * std::max(1.0, norm(e) * norm(c))) return std::nullopt;
    double t = cross(q - a, c) / denom;
    return a + e * t;
}

// End-cap completion. When an end lateral's ray exits through the instance
// cap, the clipped endpoints trace the cap instead of the sides and the
// plain clockwise chain cuts both cap corners off. This replaces the
// clipped endpoints with the intersections of the side support lines and
// the cap line (perpendicular to the end tangent through the farthest
// clipped point).
void complete_cap(std::vector<ChainEntry>& ups, std::vector<ChainEntry>& downs,
                  const MainVein& mv, const LateralVeinPair& end_lateral, int station,
                  bool right_end, ReconstructedContour* stats) {
    auto u_of = [&](Point p) { return mv.to_frame(p).x; };
    double sign = right_end ? 1.0 : -1.0;
    auto affected = [&](const ChainEntry& e) { return e.station == station && e.clipped; };

    bool any_clipped = false;
    for (const auto* chain : {&ups, &downs}) {
        for (const ChainEntry& e : *chain) {
            if (affected(e)) any_clipped = true;
        }
    }
    if (!any_clipped) return;

    // Farthest clipped endpoint sits on the cap and anchors the cap line.
    std::optional<Point> anchor;
    double best_u = 0.0;
    for (const auto* chain : {&ups, &downs}) {
        for (const ChainEntry& e : *chain) {
            if (!affected(e)) continue;
            double u = sign * u_of(e.p);
            if (!anchor || u > best_u) {
                anchor = e.p;
                best_u = u;
            }
        }
    }
    Point cap_dir = unit_vector(end_lateral.tangent_deg + 90.0);

    // Side support lines: the two distinct endpoint samples nearest the cap
    // that did not clip.
    auto support = [&](const std::vector<ChainEntry>& chain) -> std::optional<std::pair<Point, Point>> {
        std::vector<Point> pts;
        for (const ChainEntry& e : chain) {
            if (e.clipped) continue;
            pts.push_back(e.p);
        }
        std::sort(pts.begin(), pts.end(),
                  [&](Point a, Point b) { return sign * u_of(a) > sign * u_of(b); });
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (norm(pts[i] - pts[0]) > 1e-6) return std::make_pair(pts[i], pts[0]);
        }
        return std::nullopt;
    };
    auto up_support = support(ups);
    auto down_support = support(downs);
    if (!up_support || !down_support) return;
    std::optional<Point> v_up = line_intersect(up_support->first, up_support->second, *anchor, cap_dir);
    std::optional<Point> v_down =
        line_intersect(down_support->first, down_support->second, *anchor, cap_dir);
    if (!v_up || !v_down) return;
    // A corner far from its supports means the side line ran nearly parallel
    // to the cap; completion would only inflate the contour.
    double scale = norm(up_support->second - down_support->second) + 1.0;
    if (norm(*v_up - up_support->second) > 1.5 * scale ||
        norm(*v_down - down_support->second) > 1.5 * scale) {
        return;
    }

    auto drop_clipped = [&](std::vector<ChainEntry>& chain) {
        std::size_t before = chain.size();
        chain.erase(std::remove_if(chain.begin(), chain.end(), affected), chain.end());
        stats->clipped_dropped += static_cast<int>(before - chain.size());
    };
    drop_clipped(ups);
    drop_clipped(downs);

    // The cap runs from the up corner through the anchor to the down corner.
    ChainEntry up_corner{*v_up, station, true, false};
    ChainEntry anchor_entry{*anchor, station, true, false};
    ChainEntry down_corner{*v_down, station, false, false};
    if (right_end) {
        ups.push_back(up_corner);
        ups.push_back(anchor_entry);
        downs.insert(downs.begin(), down_corner);
    } else {
        downs.push_back(down_corner);
        downs.push_back(anchor_entry);
        ups.insert(ups.begin(), up_corner);
    }
    stats->cap_vertices += 3;
}

}  // namespace

ReconstructedContour decode(const RasterMask& kernel, const LengthLookup& lengths,
                            const LvtConfig& cfg, const std::string& source) {
    cfg.validate();
    if (kernel.count_set() == 0) throw EmptyKernelError("cannot decode an empty kernel");

    PolarGrid grid(cfg.n_d);
    MainVein mv = fit_sampling_vein(kernel, cfg);
    std::vector<StartPointSample> starts = sample_lateral_starts(mv, cfg.n_p);
    std::vector<DirectedStart> dirs = directed_starts(starts, grid);

    const int n = cfg.n_p;
    std::vector<LateralVeinPair> laterals(n);
    for (int i = 0; i < n; ++i) {
        const DirectedStart& d = dirs[i];
        LateralVeinPair lv;
        lv.start = d.sample.point;
        lv.tangent_deg = d.sample.tangent_angle_deg;
        lv.rect_up = d.rect_up;
        lv.rect_down = d.rect_down;
        constexpr double kUnbounded = std::numeric_limits<double>::infinity();
        auto up = lengths.length_at(lv.start, d.idx_up, kUnbounded);
        auto down = lengths.length_at(lv.start, d.idx_down, kUnbounded);
        if (!up || !down) {
            throw MissingLengthError("no length for lateral start (" + std::to_string(lv.start.x) +
                                     ", " + std::to_string(lv.start.y) + ")");
        }
        lv.len_up = *up;
        lv.len_down = *down;
        laterals[i] = lv;
    }

    // A side counts as cap-clipped when its ray came back drastically
    // shorter than both the opposite side and the typical length of its own
    // side; thin veins growing from a clipped side's midpoint hug the cap
    // as well and inherit the flag.
    auto median_of = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    std::vector<double> all_up(n), all_down(n);
    for (int i = 0; i < n; ++i) {
        all_up[i] = laterals[i].len_up;
        all_down[i] = laterals[i].len_down;
    }
    double med_up = median_of(all_up);
    double med_down = median_of(all_down);
    auto side_clipped = [&](int i, bool up) {
        double len = up ? laterals[i].len_up : laterals[i].len_down;
        double other = up ? laterals[i].len_down : laterals[i].len_up;
        double median = up ? med_up : med_down;
        return len < 0.35 * std::max(other, median);
    };

    // Thin endpoints per lateral and side; absent when the lookup misses.
    // The tight distance bound keeps thin veins the encoder skipped skipped.
    constexpr double kThinLookupRadius = 4.0;
    ReconstructedContour out;
    out.source = source;
    struct ThinSlot {
        std::optional<ChainEntry> entry;
    };
    std::vector<ThinSlot> up_left(n), up_right(n), down_left(n), down_right(n);
    auto grow_thin = [&](Point mid, double dir, int station, bool up_side) -> ThinSlot {
        auto len = lengths.length_at(mid, grid.index_of(dir), kThinLookupRadius);
        if (!len) {
            ++out.skipped_thins;
            return {};
        }
        return {ChainEntry{mid + unit_vector(dir) * (*len), station, up_side,
                           side_clipped(station, up_side)}};
    };
    for (int i = 0; i + 1 < n; ++i) {
        const LateralVeinPair& a = laterals[i];
        const LateralVeinPair& b = laterals[i + 1];
        up_right[i] = grow_thin(a.mid_up(), b.rect_up, i, true);
        up_left[i + 1] = grow_thin(b.mid_up(), a.rect_up, i + 1, true);
        down_right[i] = grow_thin(a.mid_down(), b.rect_down, i, false);
        down_left[i + 1] = grow_thin(b.mid_down(), a.rect_down, i + 1, false);
    }

    std::vector<ChainEntry> ups, downs;
    ups.reserve(3 * n + 4);
    downs.reserve(3 * n + 4);
    for (int i = 0; i < n; ++i) {
        if (up_left[i].entry) ups.push_back(*up_left[i].entry);
        ups.push_back({laterals[i].end_up(), i, true, side_clipped(i, true)});
        if (up_right[i].entry) ups.push_back(*up_right[i].entry);
    }
    for (int i = n - 1; i >= 0; --i) {
        if (down_right[i].entry) downs.push_back(*down_right[i].entry);
        downs.push_back({laterals[i].end_down(), i, false, side_clipped(i, false)});
        if (down_left[i].entry) downs.push_back(*down_left[i].entry);
    }

    complete_cap(ups, downs, mv, laterals[n - 1], n - 1, true, &out);
    complete_cap(ups, downs, mv, laterals[0], 0, false, &out);

    out.vertices.reserve(ups.size() + downs.size());
    for (const ChainEntry& e : ups) out.vertices.push_back(e.p);
    for (const ChainEntry& e : downs) out.vertices.push_back(e.p);

    double s2 = 0.0;
    for (std::size_t i = 0; i < out.vertices.size(); ++i) {
        const Point& p = out.vertices[i];
        const Point& q = out.vertices[(i + 1) % out.vertices.size()];
        s2 += p.x * q.y - q.x * p.y;
    }
    if (s2 < 0.0) std::reverse(out.vertices.begin(), out.vertices.end());
    return out;
}

double roundtrip_iou(const Polygon& poly, const LvtConfig& cfg, int width, int height) {
    LvtLabel label = encode(poly, cfg, width, height);
    LabelLengthLookup lookup(label);
    ReconstructedContour contour = decode(label.kernel, lookup, cfg);
    RasterMask truth = rasterize(poly, width, height);
    RasterMask rebuilt = rasterize(std::span<const Point>(contour.vertices), width, height);
    return mask_iou(truth, rebuilt);
}

}  // namespace leafvein
