#include "ewnoise/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>

#include <json.hpp>

#include "ewnoise/error.hpp"
#include "ewnoise/xml.hpp"

namespace ewnoise {

namespace {

using nlohmann::json;

constexpr int kMaxSceneDim = 10'000'000;

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::SchemaViolation, path + ": " + what);
}

[[noreturn]] void invariant_fail(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::InvariantViolation, path + ": " + what);
}

long long parse_int_text(const std::string& text, const std::string& path) {
    const char* s = text.c_str();
    char* end = nullptr;
    errno = 0;
    long long v = std::strtoll(s, &end, 10);
    while (end && *end != '\0' && std::isspace(static_cast<unsigned char>(*end))) ++end;
    if (end == s || *end != '\0' || errno == ERANGE)
        schema_fail(path, "not an integer: '" + text + "'");
    return v;
}

int parse_int32_text(const std::string& text, const std::string& path) {
    long long v = parse_int_text(text, path);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        schema_fail(path, "integer out of range: '" + text + "'");
    return static_cast<int>(v);
}

double parse_double_text(const std::string& text, const std::string& path) {
    const char* s = text.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(s, &end);
    while (end && *end != '\0' && std::isspace(static_cast<unsigned char>(*end))) ++end;
    if (end == s || *end != '\0')
        schema_fail(path, "not a number: '" + text + "'");
    if (!std::isfinite(v))
        schema_fail(path, "non-finite number: '" + text + "'");
    return v;
}

std::vector<std::string> split_ws(const std::string& text) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) out.push_back(text.substr(start, i - start));
    }
    return out;
}

// ---------------------------------------------------------------- XML side

const xml::Element& require_child(const xml::Element& parent, const char* name,
                                  const std::string& path) {
    const xml::Element* c = parent.find(name);
    if (!c) schema_fail(path, std::string("missing element <") + name + ">");
    return *c;
}

int require_int(const xml::Element& parent, const char* name, const std::string& path) {
    return parse_int32_text(require_child(parent, name, path).text, path + "/" + name);
}

Swath require_swath(const xml::Element& parent, const std::string& path) {
    const xml::Element& c = require_child(parent, "swath", path);
    auto s = swath_from_name(c.text);
    if (!s) schema_fail(path + "/swath", "unknown subswath '" + c.text + "'");
    return *s;
}

void check_count_attr(const xml::Element& e, size_t actual, const std::string& path) {
    auto it = e.attributes.find("count");
    if (it == e.attributes.end()) return;
    long long declared = parse_int_text(it->second, path + "@count");
    if (declared < 0 || static_cast<size_t>(declared) != actual)
        schema_fail(path, "count attribute " + it->second + " does not match " +
                              std::to_string(actual) + " entries");
}

std::vector<int> int_list(const xml::Element& parent, const char* name,
                          const std::string& parent_path) {
    std::string path = parent_path + "/" + name;
    const xml::Element& e = require_child(parent, name, parent_path);
    std::vector<int> out;
    for (const std::string& tok : split_ws(e.text))
        out.push_back(parse_int32_text(tok, path));
    check_count_attr(e, out.size(), path);
    return out;
}

std::vector<double> double_list(const xml::Element& parent, const char* name,
                                const std::string& parent_path) {
    std::string path = parent_path + "/" + name;
    const xml::Element& e = require_child(parent, name, parent_path);
    std::vector<double> out;
    for (const std::string& tok : split_ws(e.text))
        out.push_back(parse_double_text(tok, path));
    check_count_attr(e, out.size(), path);
    return out;
}

CalibrationSet from_xml(std::string_view document) {
    xml::Element root = xml::parse(document);
    if (root.name != "calibration")
        schema_fail("/", "root element must be <calibration>, got <" + root.name + ">");

    CalibrationSet cal;
    cal.scene_rows = require_int(root, "sceneRows", "calibration");
    cal.scene_cols = require_int(root, "sceneCols", "calibration");

    const xml::Element& rv_list = require_child(root, "noiseRangeVectorList", "calibration");
    int idx = 0;
    for (const xml::Element* rv : rv_list.find_all("noiseRangeVector")) {
        std::string path = "noiseRangeVectorList/noiseRangeVector[" + std::to_string(idx) + "]";
        RangeNoiseVector v;
        v.azimuth_line = require_int(*rv, "line", path);
        v.range_pixels = int_list(*rv, "pixel", path);
        v.noise_values = double_list(*rv, "noiseRangeLut", path);
        cal.range_vectors.push_back(std::move(v));
        ++idx;
    }
    check_count_attr(rv_list, cal.range_vectors.size(), "noiseRangeVectorList");

    const xml::Element& av_list = require_child(root, "noiseAzimuthVectorList", "calibration");
    idx = 0;
    for (const xml::Element* av : av_list.find_all("noiseAzimuthVector")) {
        std::string path = "noiseAzimuthVectorList/noiseAzimuthVector[" + std::to_string(idx) + "]";
        AzimuthNoiseVector v;
        v.swath = require_swath(*av, path);
        v.first_azimuth_line = require_int(*av, "firstAzimuthLine", path);
        v.last_azimuth_line = require_int(*av, "lastAzimuthLine", path);
        v.first_range_sample = require_int(*av, "firstRangeSample", path);
        v.last_range_sample = require_int(*av, "lastRangeSample", path);
        v.azimuth_lines = int_list(*av, "line", path);
        v.noise_values = double_list(*av, "noiseAzimuthLut", path);
        cal.azimuth_vectors.push_back(std::move(v));
        ++idx;
    }
    check_count_attr(av_list, cal.azimuth_vectors.size(), "noiseAzimuthVectorList");

    const xml::Element& sb_list = require_child(root, "swathBoundList", "calibration");
    idx = 0;
    for (const xml::Element* sb : sb_list.find_all("swathBound")) {
        std::string path = "swathBoundList/swathBound[" + std::to_string(idx) + "]";
        SubswathRectangle r;
        r.swath = require_swath(*sb, path);
        r.first_azimuth_line = require_int(*sb, "firstAzimuthLine", path);
        r.last_azimuth_line = require_int(*sb, "lastAzimuthLine", path);
        r.first_range_sample = require_int(*sb, "firstRangeSample", path);
        r.last_range_sample = require_int(*sb, "lastRangeSample", path);
        cal.rectangles.push_back(r);
        ++idx;
    }
    check_count_attr(sb_list, cal.rectangles.size(), "swathBoundList");

    const xml::Element& ap_list = require_child(root, "antennaPatternList", "calibration");
    std::map<Swath, int> item_counts;
    idx = 0;
    for (const xml::Element* ap : ap_list.find_all("antennaPattern")) {
        std::string path = "antennaPatternList/antennaPattern[" + std::to_string(idx) + "]";
        item_counts[require_swath(*ap, path)] += 1;
        ++idx;
    }
    check_count_attr(ap_list, static_cast<size_t>(idx), "antennaPatternList");

    for (const SubswathRectangle& r : cal.rectangles)
        item_counts.emplace(r.swath, 0);
    for (const auto& [sw, n] : item_counts)
        cal.burst_counts[sw] = n + 1;
    return cal;
}

// --------------------------------------------------------------- JSON side

// nlohmann's parser recurses per nesting level; bound the depth before
// handing arbitrary bytes to it.
void check_json_depth(std::string_view doc) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (char c : doc) {
        if (in_string) {
            if (escaped) escaped = false;
            else if (c == '\\') escaped = true;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '[' || c == '{') {
            if (++depth > 512)
                throw Error(ErrorKind::MalformedDocument, "nesting too deep");
        } else if (c == ']' || c == '}') {
            --depth;
        }
    }
}

const json& require_key(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) schema_fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) schema_fail(path, std::string("missing key '") + key + "'");
    return *it;
}

int json_int(const json& obj, const char* key, const std::string& path) {
    const json& v = require_key(obj, key, path);
    if (!v.is_number_integer()) schema_fail(path + "." + key, "expected an integer");
    long long n = v.get<long long>();
    if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max())
        schema_fail(path + "." + key, "integer out of range");
    return static_cast<int>(n);
}

Swath json_swath(const json& obj, const std::string& path) {
    const json& v = require_key(obj, "swath", path);
    if (!v.is_string()) schema_fail(path + ".swath", "expected a string");
    auto s = swath_from_name(v.get<std::string>());
    if (!s) schema_fail(path + ".swath", "unknown subswath '" + v.get<std::string>() + "'");
    return *s;
}

std::vector<int> json_int_list(const json& obj, const char* key, const std::string& path) {
    const json& v = require_key(obj, key, path);
    if (!v.is_array()) schema_fail(path + "." + key, "expected an array");
    std::vector<int> out;
    for (const json& e : v) {
        if (!e.is_number_integer()) schema_fail(path + "." + key, "expected integer entries");
        long long n = e.get<long long>();
        if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max())
            schema_fail(path + "." + key, "integer out of range");
        out.push_back(static_cast<int>(n));
    }
    return out;
}

std::vector<double> json_double_list(const json& obj, const char* key, const std::string& path) {
    const json& v = require_key(obj, key, path);
    if (!v.is_array()) schema_fail(path + "." + key, "expected an array");
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number()) schema_fail(path + "." + key, "expected numeric entries");
        double d = e.get<double>();
        if (!std::isfinite(d)) schema_fail(path + "." + key, "non-finite number");
        out.push_back(d);
    }
    return out;
}

CalibrationSet from_json(std::string_view document) {
    check_json_depth(document);
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::MalformedDocument, e.what());
    }
    if (!doc.is_object())
        schema_fail("/", "document root must be an object");

    CalibrationSet cal;
    cal.scene_rows = json_int(doc, "sceneRows", "/");
    cal.scene_cols = json_int(doc, "sceneCols", "/");

    const json& rvs = require_key(doc, "rangeVectors", "/");
    if (!rvs.is_array()) schema_fail("rangeVectors", "expected an array");
    for (size_t i = 0; i < rvs.size(); ++i) {
        std::string path = "rangeVectors[" + std::to_string(i) + "]";
        RangeNoiseVector v;
        v.azimuth_line = json_int(rvs[i], "line", path);
        v.range_pixels = json_int_list(rvs[i], "pixels", path);
        v.noise_values = json_double_list(rvs[i], "values", path);
        cal.range_vectors.push_back(std::move(v));
    }

    const json& avs = require_key(doc, "azimuthVectors", "/");
    if (!avs.is_array()) schema_fail("azimuthVectors", "expected an array");
    for (size_t i = 0; i < avs.size(); ++i) {
        std::string path = "azimuthVectors[" + std::to_string(i) + "]";
        AzimuthNoiseVector v;
        v.swath = json_swath(avs[i], path);
        v.first_azimuth_line = json_int(avs[i], "firstAzimuthLine", path);
        v.last_azimuth_line = json_int(avs[i], "lastAzimuthLine", path);
        v.first_range_sample = json_int(avs[i], "firstRangeSample", path);
        v.last_range_sample = json_int(avs[i], "lastRangeSample", path);
        v.azimuth_lines = json_int_list(avs[i], "lines", path);
        v.noise_values = json_double_list(avs[i], "values", path);
        cal.azimuth_vectors.push_back(std::move(v));
    }

    const json& sbs = require_key(doc, "swathBounds", "/");
    if (!sbs.is_array()) schema_fail("swathBounds", "expected an array");
    for (size_t i = 0; i < sbs.size(); ++i) {
        std::string path = "swathBounds[" + std::to_string(i) + "]";
        SubswathRectangle r;
        r.swath = json_swath(sbs[i], path);
        r.first_azimuth_line = json_int(sbs[i], "firstAzimuthLine", path);
        r.last_azimuth_line = json_int(sbs[i], "lastAzimuthLine", path);
        r.first_range_sample = json_int(sbs[i], "firstRangeSample", path);
        r.last_range_sample = json_int(sbs[i], "lastRangeSample", path);
        cal.rectangles.push_back(r);
    }

    const json& aps = require_key(doc, "antennaPatternCounts", "/");
    if (!aps.is_object()) schema_fail("antennaPatternCounts", "expected an object");
    std::map<Swath, int> item_counts;
    for (auto it = aps.begin(); it != aps.end(); ++it) {
        std::string path = "antennaPatternCounts." + it.key();
        auto s = swath_from_name(it.key());
        if (!s) schema_fail(path, "unknown subswath");
        if (!it.value().is_number_integer()) schema_fail(path, "expected an integer");
        long long n = it.value().get<long long>();
        if (n < 0 || n > std::numeric_limits<int>::max())
            schema_fail(path, "count out of range");
        item_counts[*s] = static_cast<int>(n);
    }
    for (const SubswathRectangle& r : cal.rectangles)
        item_counts.emplace(r.swath, 0);
    for (const auto& [sw, n] : item_counts)
        cal.burst_counts[sw] = n + 1;
    return cal;
}

// --------------------------------------------------------------- validation

struct PathNames {
    std::string range_vec(size_t i) const {
        return xml_style ? "noiseRangeVectorList/noiseRangeVector[" + std::to_string(i) + "]"
                         : "rangeVectors[" + std::to_string(i) + "]";
    }
    std::string azimuth_vec(size_t i) const {
        return xml_style ? "noiseAzimuthVectorList/noiseAzimuthVector[" + std::to_string(i) + "]"
                         : "azimuthVectors[" + std::to_string(i) + "]";
    }
    std::string rect(size_t i) const {
        return xml_style ? "swathBoundList/swathBound[" + std::to_string(i) + "]"
                         : "swathBounds[" + std::to_string(i) + "]";
    }
    bool xml_style = true;
};

void validate_calibration(CalibrationSet& cal, const PathNames& names) {
    if (cal.scene_rows < 1 || cal.scene_rows > kMaxSceneDim ||
        cal.scene_cols < 1 || cal.scene_cols > kMaxSceneDim)
        invariant_fail("sceneRows/sceneCols", "scene dimensions must be in [1, 1e7]");

    if (cal.range_vectors.size() < 2)
        invariant_fail("noiseRangeVectorList", "need at least 2 range vectors, got " +
                                                   std::to_string(cal.range_vectors.size()));

    std::stable_sort(cal.range_vectors.begin(), cal.range_vectors.end(),
                     [](const RangeNoiseVector& a, const RangeNoiseVector& b) {
                         return a.azimuth_line < b.azimuth_line;
                     });

    for (size_t i = 0; i < cal.range_vectors.size(); ++i) {
        const RangeNoiseVector& v = cal.range_vectors[i];
        const std::string path = names.range_vec(i);
        if (i > 0 && cal.range_vectors[i - 1].azimuth_line == v.azimuth_line)
            schema_fail(path, "duplicate azimuth line " + std::to_string(v.azimuth_line));
        if (v.range_pixels.empty())
            invariant_fail(path, "empty pixel list (line " + std::to_string(v.azimuth_line) + ")");
        if (v.range_pixels.size() != v.noise_values.size())
            invariant_fail(path, "pixel/value length mismatch (line " +
                                     std::to_string(v.azimuth_line) + ")");
        for (size_t k = 1; k < v.range_pixels.size(); ++k)
            if (v.range_pixels[k] <= v.range_pixels[k - 1])
                invariant_fail(path, "pixel list not strictly increasing (line " +
                                         std::to_string(v.azimuth_line) + ")");
        for (double x : v.noise_values)
            if (x < 0.0) invariant_fail(path, "negative noise value (line " +
                                                  std::to_string(v.azimuth_line) + ")");
    }

    for (size_t i = 0; i < cal.azimuth_vectors.size(); ++i) {
        const AzimuthNoiseVector& v = cal.azimuth_vectors[i];
        const std::string path = names.azimuth_vec(i);
        if (v.first_azimuth_line > v.last_azimuth_line ||
            v.first_range_sample > v.last_range_sample)
            invariant_fail(path, "first bound exceeds last bound");
        if (v.azimuth_lines.empty())
            invariant_fail(path, "empty line list");
        if (v.azimuth_lines.size() != v.noise_values.size())
            invariant_fail(path, "line/value length mismatch");
        for (size_t k = 0; k < v.azimuth_lines.size(); ++k) {
            if (v.azimuth_lines[k] < v.first_azimuth_line ||
                v.azimuth_lines[k] > v.last_azimuth_line)
                invariant_fail(path, "line " + std::to_string(v.azimuth_lines[k]) +
                                         " outside azimuth extent");
            if (k > 0 && v.azimuth_lines[k] <= v.azimuth_lines[k - 1])
                invariant_fail(path, "line list not strictly increasing");
        }
        for (double x : v.noise_values)
            if (x < 0.0) invariant_fail(path, "negative noise value");
    }

    for (size_t i = 0; i < cal.rectangles.size(); ++i) {
        const SubswathRectangle& r = cal.rectangles[i];
        const std::string path = names.rect(i);
        if (r.first_azimuth_line > r.last_azimuth_line ||
            r.first_range_sample > r.last_range_sample)
            invariant_fail(path, "first bound exceeds last bound");
        if (r.first_azimuth_line < 0 || r.last_azimuth_line >= cal.scene_rows ||
            r.first_range_sample < 0 || r.last_range_sample >= cal.scene_cols)
            invariant_fail(path, "rectangle outside scene grid");
    }

    // Rectangles of one subswath must not overlap along azimuth.
    for (size_t i = 0; i < cal.rectangles.size(); ++i) {
        for (size_t k = i + 1; k < cal.rectangles.size(); ++k) {
            const SubswathRectangle& a = cal.rectangles[i];
            const SubswathRectangle& b = cal.rectangles[k];
            if (a.swath != b.swath) continue;
            if (a.first_azimuth_line <= b.last_azimuth_line &&
                b.first_azimuth_line <= a.last_azimuth_line)
                invariant_fail(names.rect(k), std::string("azimuth overlap with ") +
                                                  names.rect(i) + " in " + swath_name(a.swath));
        }
    }

    for (const SubswathRectangle& r : cal.rectangles) {
        auto it = cal.burst_counts.find(r.swath);
        if (it == cal.burst_counts.end() || it->second < 1)
            invariant_fail("antennaPatternList",
                           std::string("no burst count for ") + swath_name(r.swath));
    }
}

} // namespace

const char* swath_name(Swath s) {
    static const char* names[kSwathCount] = {"EW1", "EW2", "EW3", "EW4", "EW5"};
    return names[swath_index(s)];
}

std::optional<Swath> swath_from_name(std::string_view name) {
    for (int i = 0; i < kSwathCount; ++i)
        if (name == swath_name(swath_at(i))) return swath_at(i);
    return std::nullopt;
}

CalibrationSet parse_calibration(std::string_view document, CalibrationFormat format) {
    CalibrationSet cal;
    PathNames names;
    if (format == CalibrationFormat::Xml) {
        cal = from_xml(document);
        names.xml_style = true;
    } else {
        cal = from_json(document);
        names.xml_style = false;
    }
    validate_calibration(cal, names);
    return cal;
}

std::string emit_calibration_json(const CalibrationSet& cal) {
    json doc;
    doc["sceneRows"] = cal.scene_rows;
    doc["sceneCols"] = cal.scene_cols;
    doc["rangeVectors"] = json::array();
    for (const RangeNoiseVector& v : cal.range_vectors) {
        doc["rangeVectors"].push_back(
            {{"line", v.azimuth_line}, {"pixels", v.range_pixels}, {"values", v.noise_values}});
    }
    doc["azimuthVectors"] = json::array();
    for (const AzimuthNoiseVector& v : cal.azimuth_vectors) {
        doc["azimuthVectors"].push_back({{"swath", swath_name(v.swath)},
                                         {"firstAzimuthLine", v.first_azimuth_line},
                                         {"lastAzimuthLine", v.last_azimuth_line},
                                         {"firstRangeSample", v.first_range_sample},
                                         {"lastRangeSample", v.last_range_sample},
                                         {"lines", v.azimuth_lines},
                                         {"values", v.noise_values}});
    }
    doc["swathBounds"] = json::array();
    for (const SubswathRectangle& r : cal.rectangles) {
        doc["swathBounds"].push_back({{"swath", swath_name(r.swath)},
                                      {"firstAzimuthLine", r.first_azimuth_line},
                                      {"lastAzimuthLine", r.last_azimuth_line},
                                      {"firstRangeSample", r.first_range_sample},
                                      {"lastRangeSample", r.last_range_sample}});
    }
    doc["antennaPatternCounts"] = json::object();
    for (const auto& [sw, burst] : cal.burst_counts)
        doc["antennaPatternCounts"][swath_name(sw)] = burst - 1;
    return doc.dump(2) + "\n";
}

std::string emit_calibration_xml(const CalibrationSet& cal) {
    using xml::Element;
    auto leaf = [](const char* name, const std::string& text) {
        Element e;
        e.name = name;
        e.text = text;
        return e;
    };
    auto int_leaf = [&](const char* name, long long v) { return leaf(name, std::to_string(v)); };
    auto list_leaf = [&](const char* name, const auto& values) {
        std::string text;
        for (size_t i = 0; i < values.size(); ++i) {
            if (i) text += ' ';
            if constexpr (std::is_floating_point_v<std::decay_t<decltype(values[i])>>) {
                char buf[40];
                snprintf(buf, sizeof buf, "%.17g", static_cast<double>(values[i]));
                text += buf;
            } else {
                text += std::to_string(values[i]);
            }
        }
        Element e = leaf(name, text);
        e.attributes["count"] = std::to_string(values.size());
        return e;
    };

    Element root;
    root.name = "calibration";
    root.children.push_back(int_leaf("sceneRows", cal.scene_rows));
    root.children.push_back(int_leaf("sceneCols", cal.scene_cols));

    Element rv_list;
    rv_list.name = "noiseRangeVectorList";
    rv_list.attributes["count"] = std::to_string(cal.range_vectors.size());
    for (const RangeNoiseVector& v : cal.range_vectors) {
        Element e;
        e.name = "noiseRangeVector";
        e.children.push_back(int_leaf("line", v.azimuth_line));
        e.children.push_back(list_leaf("pixel", v.range_pixels));
        e.children.push_back(list_leaf("noiseRangeLut", v.noise_values));
        rv_list.children.push_back(std::move(e));
    }
    root.children.push_back(std::move(rv_list));

    Element av_list;
    av_list.name = "noiseAzimuthVectorList";
    av_list.attributes["count"] = std::to_string(cal.azimuth_vectors.size());
    for (const AzimuthNoiseVector& v : cal.azimuth_vectors) {
        Element e;
        e.name = "noiseAzimuthVector";
        e.children.push_back(leaf("swath", swath_name(v.swath)));
        e.children.push_back(int_leaf("firstAzimuthLine", v.first_azimuth_line));
        e.children.push_back(int_leaf("lastAzimuthLine", v.last_azimuth_line));
        e.children.push_back(int_leaf("firstRangeSample", v.first_range_sample));
        e.children.push_back(int_leaf("lastRangeSample", v.last_range_sample));
        e.children.push_back(list_leaf("line", v.azimuth_lines));
        e.children.push_back(list_leaf("noiseAzimuthLut", v.noise_values));
        av_list.children.push_back(std::move(e));
    }
    root.children.push_back(std::move(av_list));

    Element sb_list;
    sb_list.name = "swathBoundList";
    sb_list.attributes["count"] = std::to_string(cal.rectangles.size());
    for (const SubswathRectangle& r : cal.rectangles) {
        Element e;
        e.name = "swathBound";
        e.children.push_back(leaf("swath", swath_name(r.swath)));
        e.children.push_back(int_leaf("firstAzimuthLine", r.first_azimuth_line));
        e.children.push_back(int_leaf("lastAzimuthLine", r.last_azimuth_line));
        e.children.push_back(int_leaf("firstRangeSample", r.first_range_sample));
        e.children.push_back(int_leaf("lastRangeSample", r.last_range_sample));
        sb_list.children.push_back(std::move(e));
    }
    root.children.push_back(std::move(sb_list));

    Element ap_list;
    ap_list.name = "antennaPatternList";
    int n_items = 0;
    for (const auto& [sw, burst] : cal.burst_counts) {
        for (int i = 0; i < burst - 1; ++i) {
            Element e;
            e.name = "antennaPattern";
            e.children.push_back(leaf("swath", swath_name(sw)));
            ap_list.children.push_back(std::move(e));
            ++n_items;
        }
    }
    ap_list.attributes["count"] = std::to_string(n_items);
    root.children.push_back(std::move(ap_list));

    return xml::serialize(root);
}

std::vector<CoverageGap> validate_coverage(const CalibrationSet& cal) {
    // Anomalies are constant over row bands delimited by rectangle edges.
    std::set<int> row_edges{0, cal.scene_rows};
    for (const SubswathRectangle& r : cal.rectangles) {
        row_edges.insert(std::clamp(r.first_azimuth_line, 0, cal.scene_rows));
        row_edges.insert(std::clamp(r.last_azimuth_line + 1, 0, cal.scene_rows));
    }

    struct BandAnomaly {
        int first_col, last_col;
        std::vector<Swath> swaths; // empty = gap
        bool operator==(const BandAnomaly&) const = default;
    };

    std::vector<CoverageGap> out;
    std::vector<BandAnomaly> prev_anomalies;
    int prev_band_start = -1;

    std::vector<int> edges(row_edges.begin(), row_edges.end());
    for (size_t b = 0; b + 1 < edges.size(); ++b) {
        const int row0 = edges[b];
        const int row1 = edges[b + 1]; // exclusive
        if (row0 >= row1) continue;

        // Column sweep over rectangles active in this band.
        struct Event {
            int col;
            int delta;
            Swath swath;
        };
        std::vector<Event> events;
        for (const SubswathRectangle& r : cal.rectangles) {
            if (r.first_azimuth_line > row0 || r.last_azimuth_line < row0) continue;
            int c0 = std::clamp(r.first_range_sample, 0, cal.scene_cols);
            int c1 = std::clamp(r.last_range_sample + 1, 0, cal.scene_cols);
            if (c0 >= c1) continue;
            events.push_back({c0, +1, r.swath});
            events.push_back({c1, -1, r.swath});
        }
        std::sort(events.begin(), events.end(),
                  [](const Event& a, const Event& b) { return a.col < b.col; });

        std::vector<BandAnomaly> anomalies;
        std::multiset<Swath> active;
        int cursor = 0;
        size_t e = 0;
        auto flush_segment = [&](int seg_end) {
            if (cursor >= seg_end) return;
            if (active.empty()) {
                anomalies.push_back({cursor, seg_end - 1, {}});
            } else if (active.size() > 1) {
                std::vector<Swath> sw(active.begin(), active.end());
                sw.erase(std::unique(sw.begin(), sw.end()), sw.end());
                anomalies.push_back({cursor, seg_end - 1, std::move(sw)});
            }
            cursor = seg_end;
        };
        while (e < events.size()) {
            int col = events[e].col;
            flush_segment(std::min(col, cal.scene_cols));
            while (e < events.size() && events[e].col == col) {
                if (events[e].delta > 0) active.insert(events[e].swath);
                else active.erase(active.find(events[e].swath));
                ++e;
            }
        }
        flush_segment(cal.scene_cols);

        // Merge identical column anomalies across vertically adjacent bands.
        if (!anomalies.empty() && anomalies == prev_anomalies &&
            prev_band_start >= 0 && !out.empty() && out.back().last_row == row0 - 1) {
            size_t base = out.size() - anomalies.size();
            for (size_t i = 0; i < anomalies.size(); ++i)
                out[base + i].last_row = row1 - 1;
        } else {
            for (const BandAnomaly& a : anomalies)
                out.push_back({row0, row1 - 1, a.first_col, a.last_col, a.swaths});
            prev_anomalies = anomalies;
            prev_band_start = row0;
        }
        if (anomalies.empty()) {
            prev_anomalies.clear();
            prev_band_start = -1;
        }
    }
    return out;
}

} // namespace ewnoise
