#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leafvein/geometry.hpp"

namespace leafvein {

/// One ground-truth instance. care is false for DO-NOT-CARE instances
/// (transcription equal to the "###" ignore marker).
struct Annotation {
    Polygon polygon;
    std::optional<std::string> transcription;
    bool care = true;
};

/// Rotated-box record of the line format "index difficulty x y w h theta"
/// (theta in radians, rotation about the box center).
struct MsraRecord {
    int index = 0;
    int difficulty = 0;
    double x = 0.0, y = 0.0, w = 0.0, h = 0.0, theta = 0.0;
};

/// "x1,y1,...,x4,y4,transcription". care is false iff the transcription is
/// "###". Commas inside the transcription are preserved.
Annotation parse_icdar15(std::string_view line, int line_number = 0);
std::string serialize_icdar15(const Annotation& ann);

MsraRecord parse_msra_record(std::string_view line, int line_number = 0);
std::string serialize_msra(const MsraRecord& rec);
Annotation msra_to_annotation(const MsraRecord& rec);
Annotation parse_msra(std::string_view line, int line_number = 0);

/// Comma-separated coordinate list with an optional trailing transcription,
/// at least min_points vertices. Output orientation is normalized clockwise.
Annotation parse_polyline_format(std::string_view line, int min_points, int line_number = 0);
std::string serialize_polyline(const Annotation& ann);

enum class AnnotationFormat { icdar15, msra, ctw1500, totaltext };

AnnotationFormat annotation_format_from_string(const std::string& name);

/// Parses a whole annotation file (UTF-8, byte-order-mark tolerated, blank
/// lines skipped). ParseError diagnostics carry the 1-based line number.
std::vector<Annotation> read_annotation_file(const std::string& path, AnnotationFormat format);

}  // namespace leafvein
