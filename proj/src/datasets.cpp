#include "leafvein/datasets.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace leafvein {

namespace {

constexpr std::string_view kIgnoreMarker = "###";

std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::string_view strip_bom(std::string_view s) {
    if (s.size() >= 3 && static_cast<unsigned char>(s[0]) == 0xEF &&
        static_cast<unsigned char>(s[1]) == 0xBB && static_cast<unsigned char>(s[2]) == 0xBF) {
        s.remove_prefix(3);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

bool try_parse_double(std::string_view token, double* out) {
    token = strip(token);
    if (token.empty()) return false;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, *out);
    return ec == std::errc() && ptr == last && std::isfinite(*out);
}

double parse_double(std::string_view token, std::string_view what, int line_number) {
    double v;
    if (!try_parse_double(token, &v)) {
        throw ParseError("expected a number for " + std::string(what) + ", got \"" +
                             std::string(token) + "\"",
                         line_number);
    }
    return v;
}

int parse_int(std::string_view token, std::string_view what, int line_number) {
    token = strip(token);
    int v;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ParseError("expected an integer for " + std::string(what) + ", got \"" +
                             std::string(token) + "\"",
                         line_number);
    }
    return v;
}

Polygon make_polygon(std::vector<Point> pts, int line_number) {
    try {
        return Polygon(std::move(pts));
    } catch (const InvalidPolygonError& e) {
        throw ParseError(e.what(), line_number);
    }
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace

Annotation parse_icdar15(std::string_view line, int line_number) {
    line = strip(strip_bom(line));
    std::vector<std::string_view> fields = split(line, ',');
    if (fields.size() < 9) {
        throw ParseError("expected x1,y1,...,x4,y4,transcription (9+ fields), got " +
                             std::to_string(fields.size()),
                         line_number);
    }
    std::vector<Point> pts(4);
    for (int i = 0; i < 4; ++i) {
        pts[i].x = parse_double(fields[2 * i], "x" + std::to_string(i + 1), line_number);
        pts[i].y = parse_double(fields[2 * i + 1], "y" + std::to_string(i + 1), line_number);
    }
    std::string transcription(fields[8]);
    for (std::size_t i = 9; i < fields.size(); ++i) {
        transcription += ',';
        transcription += fields[i];
    }
    Annotation ann{make_polygon(std::move(pts), line_number), transcription,
                   transcription != kIgnoreMarker};
    return ann;
}

std::string serialize_icdar15(const Annotation& ann) {
    if (ann.polygon.size() != 4) {
        throw Error("icdar15 lines carry quadrilaterals, polygon has " +
                    std::to_string(ann.polygon.size()) + " vertices");
    }
    std::string out;
    for (const Point& p : ann.polygon.vertices()) {
        out += format_double(p.x);
        out += ',';
        out += format_double(p.y);
        out += ',';
    }
    out += ann.transcription.value_or(std::string(ann.care ? "" : kIgnoreMarker));
    return out;
}

MsraRecord parse_msra_record(std::string_view line, int line_number) {
    line = strip(strip_bom(line));
    std::vector<std::string_view> fields = split_whitespace(line);
    if (fields.size() != 7) {
        throw ParseError("expected index difficulty x y w h theta (7 fields), got " +
                             std::to_string(fields.size()),
                         line_number);
    }
    MsraRecord rec;
    rec.index = parse_int(fields[0], "index", line_number);
    rec.difficulty = parse_int(fields[1], "difficulty", line_number);
    rec.x = parse_double(fields[2], "x", line_number);
    rec.y = parse_double(fields[3], "y", line_number);
    rec.w = parse_double(fields[4], "w", line_number);
    rec.h = parse_double(fields[5], "h", line_number);
    rec.theta = parse_double(fields[6], "theta", line_number);
    return rec;
}

std::string serialize_msra(const MsraRecord& rec) {
    std::string out = std::to_string(rec.index) + " " + std::to_string(rec.difficulty);
    for (double v : {rec.x, rec.y, rec.w, rec.h, rec.theta}) {
        out += ' ';
        out += format_double(v);
    }
    return out;
}

Annotation msra_to_annotation(const MsraRecord& rec) {
    Point center{rec.x + rec.w / 2.0, rec.y + rec.h / 2.0};
    std::vector<Point> pts = {{rec.x, rec.y},
                              {rec.x + rec.w, rec.y},
                              {rec.x + rec.w, rec.y + rec.h},
                              {rec.x, rec.y + rec.h}};
    double deg = rec.theta * 180.0 / 3.14159265358979323846;
    for (Point& p : pts) p = rotate_deg(p, deg, center);
    return Annotation{make_polygon(std::move(pts), 0), std::nullopt, rec.difficulty == 0};
}

Annotation parse_msra(std::string_view line, int line_number) {
    MsraRecord rec = parse_msra_record(line, line_number);
    try {
        return msra_to_annotation(rec);
    } catch (const ParseError&) {
        throw ParseError("degenerate box", line_number);
    }
}

Annotation parse_polyline_format(std::string_view line, int min_points, int line_number) {
    line = strip(strip_bom(line));
    std::vector<std::string_view> fields = split(line, ',');

    // Numeric fields form the coordinate list; a non-numeric tail (if any)
    // is the transcription. Non-numeric fields before the tail are errors.
    std::vector<double> coords;
    std::size_t i = 0;
    for (; i < fields.size(); ++i) {
        double v;
        if (!try_parse_double(fields[i], &v)) break;
        coords.push_back(v);
    }
    std::optional<std::string> transcription;
    if (i < fields.size()) {
        std::string tail(fields[i]);
        for (std::size_t k = i + 1; k < fields.size(); ++k) {
            double v;
            if (try_parse_double(fields[k], &v)) {
                throw ParseError("numeric field after transcription text", line_number);
            }
            tail += ',';
            tail += fields[k];
        }
        transcription = tail;
    }
    if (coords.size() % 2 != 0) {
        throw ParseError("odd coordinate count " + std::to_string(coords.size()), line_number);
    }
    if (coords.size() < 2 * static_cast<std::size_t>(min_points)) {
        throw ParseError("need at least " + std::to_string(min_points) + " points, got " +
                             std::to_string(coords.size() / 2),
                         line_number);
    }
    std::vector<Point> pts(coords.size() / 2);
    for (std::size_t k = 0; k < pts.size(); ++k) {
        pts[k] = {coords[2 * k], coords[2 * k + 1]};
    }
    bool care = !(transcription && *transcription == kIgnoreMarker);
    return Annotation{make_polygon(std::move(pts), line_number), std::move(transcription), care};
}

std::string serialize_polyline(const Annotation& ann) {
    std::string out;
    for (const Point& p : ann.polygon.vertices()) {
        if (!out.empty()) out += ',';
        out += format_double(p.x);
        out += ',';
        out += format_double(p.y);
    }
    if (ann.transcription) {
        out += ',';
        out += *ann.transcription;
    }
    return out;
}

AnnotationFormat annotation_format_from_string(const std::string& name) {
    if (name == "icdar15") return AnnotationFormat::icdar15;
    if (name == "msra") return AnnotationFormat::msra;
    if (name == "ctw1500") return AnnotationFormat::ctw1500;
    if (name == "totaltext") return AnnotationFormat::totaltext;
    throw ConfigError("unknown annotation format \"" + name + "\"");
}

std::vector<Annotation> read_annotation_file(const std::string& path, AnnotationFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<Annotation> out;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::string_view view = line;
        if (line_number == 1) view = strip_bom(view);
        if (strip(view).empty()) continue;
        switch (format) {
            case AnnotationFormat::icdar15:
                out.push_back(parse_icdar15(view, line_number));
                break;
            case AnnotationFormat::msra:
                out.push_back(parse_msra(view, line_number));
                break;
            case AnnotationFormat::ctw1500:
                out.push_back(parse_polyline_format(view, 7, line_number));
                break;
            case AnnotationFormat::totaltext:
                out.push_back(parse_polyline_format(view, 4, line_number));
                break;
        }
    }
    return out;
}

}  // namespace leafvein
