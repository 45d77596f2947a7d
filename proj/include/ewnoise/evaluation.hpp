#ifndef EWNOISE_EVALUATION_HPP
#define EWNOISE_EVALUATION_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ewnoise/denoise.hpp"
#include "ewnoise/metrics.hpp"
#include "ewnoise/objective.hpp"

namespace ewnoise {

enum class IpfClass { Le291, Ge3 };

struct SceneEntry {
    std::string scene_id;
    std::string raster_path;
    std::string calibration_path; // format from the .xml / .json extension
    Polarization polarization = Polarization::HV;
    OceanStrip ocean_strip;
    IpfClass ipf_class = IpfClass::Le291;
};

struct SceneManifest {
    std::vector<SceneEntry> entries;
};

/// Loads the manifest JSON; relative paths resolve against the manifest's
/// directory.
SceneManifest load_manifest(const std::string& path);

struct EvaluationOptions {
    std::set<DenoiseMode> methods{DenoiseMode::Esa, DenoiseMode::Static,
                                  DenoiseMode::Dynamic};
    ObjectiveParams params;
    std::optional<Vec5> static_k; // otherwise polarization defaults
    float mask_threshold = 0.0f;
    int jobs = 1;
};

struct EvaluationRow {
    std::string scene_id;
    DenoiseMode method = DenoiseMode::Esa;
    double flatness_nrmse = 0.0;
    bool degraded = false; // dynamic estimation failed, fell back to k = 1
    std::string note;
};

struct EvaluationFailure {
    std::string scene_id;
    std::string reason;
};

struct MethodAggregate {
    DenoiseMode method = DenoiseMode::Esa;
    int scenes = 0;
    double mean = 0.0;
    double stddev = 0.0;
};

struct EvaluationResult {
    std::vector<EvaluationRow> rows; // ordered by scene, then method
    std::vector<EvaluationFailure> failures;
    std::vector<MethodAggregate> aggregates; // overall
    std::vector<std::pair<IpfClass, MethodAggregate>> aggregates_by_class;
    std::optional<double> p_dynamic_vs_esa;
    std::optional<double> p_dynamic_vs_static;
    // Plot-ready profiles: one entry per (scene, method) in row order.
    struct Profile {
        std::string scene_id;
        DenoiseMode method;
        FlatnessProfile profile;
    };
    std::vector<Profile> profiles;
};

/// Batch flatness evaluation over the manifest. Per-scene failures are
/// recorded and skipped; a failed dynamic estimate degrades to the ESA
/// output for that scene (flagged, excluded from the paired tests).
EvaluationResult run_evaluation(const SceneManifest& manifest,
                                const EvaluationOptions& options);

const char* denoise_mode_name(DenoiseMode mode);
const char* ipf_class_name(IpfClass c);

std::string evaluation_rows_csv(const EvaluationResult& result);
std::string evaluation_summary_json(const EvaluationResult& result);
std::string evaluation_profiles_csv(const EvaluationResult& result);

} // namespace ewnoise

#endif
