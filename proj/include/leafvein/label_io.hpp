#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "leafvein/codec.hpp"
#include "leafvein/geometry.hpp"

namespace leafvein {

/// One encoded instance together with its source polygon.
struct LabeledInstance {
    Polygon polygon;
    LvtLabel label;
};

/// Label document for one image.
struct LabelDocument {
    std::string image_id;
    std::vector<LabeledInstance> instances;
};

/// Run lengths of the flattened row-major mask, alternating clear/set and
/// starting with the clear count (which may be zero).
std::vector<std::int64_t> rle_encode(const RasterMask& mask);
RasterMask rle_decode(int width, int height, const std::vector<std::int64_t>& runs);

/// JSON serialization of a label document. serialize-then-parse is the
/// identity on the document, and parse-then-serialize reproduces the bytes
/// of any document this serializer wrote.
std::string serialize_label_document(const LabelDocument& doc);
LabelDocument parse_label_document(const std::string& json_text);

}  // namespace leafvein
