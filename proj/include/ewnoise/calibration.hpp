#ifndef EWNOISE_CALIBRATION_HPP
#define EWNOISE_CALIBRATION_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ewnoise {

// The five EW subswaths, ordered by increasing elevation angle along range.
enum class Swath : int { EW1 = 0, EW2, EW3, EW4, EW5 };

inline constexpr int kSwathCount = 5;

const char* swath_name(Swath s);
std::optional<Swath> swath_from_name(std::string_view name);
inline int swath_index(Swath s) { return static_cast<int>(s); }
inline Swath swath_at(int index) { return static_cast<Swath>(index); }

// One row of the range noise lookup table: noise power samples at the given
// range pixels on a fixed azimuth line.
struct RangeNoiseVector {
    int azimuth_line = 0;
    std::vector<int> range_pixels;    // strictly increasing
    std::vector<double> noise_values; // squared-DN units, >= 0

    bool operator==(const RangeNoiseVector&) const = default;
};

// One azimuth (descalloping) gain block: samples along azimuth, valid over
// the stated azimuth/range extent and constant across its range span.
struct AzimuthNoiseVector {
    Swath swath = Swath::EW1;
    int first_azimuth_line = 0;
    int last_azimuth_line = 0;
    int first_range_sample = 0;
    int last_range_sample = 0;
    std::vector<int> azimuth_lines; // ascending, inside the azimuth extent
    std::vector<double> noise_values;

    bool operator==(const AzimuthNoiseVector&) const = default;
};

// One rectangular subswath subregion from the swath bound list.
struct SubswathRectangle {
    Swath swath = Swath::EW1;
    int first_azimuth_line = 0;
    int last_azimuth_line = 0;
    int first_range_sample = 0;
    int last_range_sample = 0;

    bool operator==(const SubswathRectangle&) const = default;
};

// Parsed and validated scene calibration metadata.
struct CalibrationSet {
    int scene_rows = 0;
    int scene_cols = 0;
    std::vector<RangeNoiseVector> range_vectors; // sorted by azimuth_line
    std::vector<AzimuthNoiseVector> azimuth_vectors;
    std::vector<SubswathRectangle> rectangles;
    std::map<Swath, int> burst_counts; // antennaPattern item count + 1

    bool operator==(const CalibrationSet&) const = default;
};

enum class CalibrationFormat { Xml, Json };

/// Parses the XML subset (see docs/calibration-schema.md) or its JSON
/// mirror. Throws Error with kind MalformedDocument, SchemaViolation, or
/// InvariantViolation; the message names the offending element path.
CalibrationSet parse_calibration(std::string_view document, CalibrationFormat format);

/// Emits the JSON mirror; parse_calibration(emit_json(cal), Json) == cal.
std::string emit_calibration_json(const CalibrationSet& cal);

/// Emits the XML subset form.
std::string emit_calibration_xml(const CalibrationSet& cal);

// A region of the scene grid that is covered by zero or by more than one
// subswath rectangle. `swaths` is empty for a gap and lists the involved
// subswaths for an overlap.
struct CoverageGap {
    int first_row = 0, last_row = 0;
    int first_col = 0, last_col = 0;
    std::vector<Swath> swaths;

    bool is_overlap() const { return !swaths.empty(); }
    bool operator==(const CoverageGap&) const = default;
};

/// Diagnostic: empty iff every scene pixel lies in exactly one rectangle.
std::vector<CoverageGap> validate_coverage(const CalibrationSet& cal);

} // namespace ewnoise

#endif
