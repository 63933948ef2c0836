#include "leafvein/label_io.hpp"

#include <json.hpp>

#include "leafvein/version.hpp"

namespace leafvein {

using Json = nlohmann::ordered_json;

std::vector<std::int64_t> rle_encode(const RasterMask& mask) {
    std::vector<std::int64_t> runs;
    std::uint8_t current = 0;
    std::int64_t run = 0;
    for (std::uint8_t b : mask.bits) {
        std::uint8_t v = b ? 1 : 0;
        if (v == current) {
            ++run;
        } else {
            runs.push_back(run);
            current = v;
            run = 1;
        }
    }
    runs.push_back(run);
    return runs;
}

RasterMask rle_decode(int width, int height, const std::vector<std::int64_t>& runs) {
    if (width < 1 || height < 1) throw Error("RLE mask dimensions must be >= 1");
    RasterMask mask(width, height);
    std::size_t pos = 0;
    std::uint8_t value = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        std::int64_t run = runs[i];
        if (run < 0 || (i > 0 && run == 0)) throw Error("invalid RLE run length");
        if (pos + static_cast<std::size_t>(run) > mask.bits.size()) {
            throw Error("RLE runs exceed mask size");
        }
        for (std::int64_t k = 0; k < run; ++k) mask.bits[pos++] = value;
        value = value ? 0 : 1;
    }
    if (pos != mask.bits.size()) throw Error("RLE runs do not cover the mask");
    return mask;
}

std::string serialize_label_document(const LabelDocument& doc) {
    Json j;
    j["version"] = kVersion;
    j["image_id"] = doc.image_id;
    j["instances"] = Json::array();
    for (const LabeledInstance& inst : doc.instances) {
        Json ji;
        Json poly = Json::array();
        for (const Point& p : inst.polygon.vertices()) {
            poly.push_back(Json::array({p.x, p.y}));
        }
        ji["polygon"] = std::move(poly);
        ji["kernel_rle"] = {{"width", inst.label.kernel.width},
                            {"height", inst.label.kernel.height},
                            {"runs", rle_encode(inst.label.kernel)}};
        Json recs = Json::array();
        for (const LengthRecord& rec : inst.label.records) {
            recs.push_back({{"x", rec.x}, {"y", rec.y}, {"lengths", rec.lengths}});
        }
        ji["records"] = std::move(recs);
        j["instances"].push_back(std::move(ji));
    }
    return j.dump(2) + "\n";
}

LabelDocument parse_label_document(const std::string& json_text) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("label document is not valid JSON: ") + e.what());
    }
    try {
        LabelDocument doc;
        doc.image_id = j.at("image_id").get<std::string>();
        for (const Json& ji : j.at("instances")) {
            std::vector<Point> pts;
            for (const Json& jp : ji.at("polygon")) {
                pts.push_back({jp.at(0).get<double>(), jp.at(1).get<double>()});
            }
            LvtLabel label;
            const Json& rle = ji.at("kernel_rle");
            label.kernel = rle_decode(rle.at("width").get<int>(), rle.at("height").get<int>(),
                                      rle.at("runs").get<std::vector<std::int64_t>>());
            for (const Json& jr : ji.at("records")) {
                label.records.push_back({jr.at("x").get<int>(), jr.at("y").get<int>(),
                                         jr.at("lengths").get<std::vector<double>>()});
            }
            doc.instances.push_back({Polygon(std::move(pts)), std::move(label)});
        }
        return doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed label document: ") + e.what());
    }
}

}  // namespace leafvein
