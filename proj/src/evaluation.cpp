#include "ewnoise/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ewnoise/error.hpp"
#include "ewnoise/solver.hpp"

namespace ewnoise {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CalibrationFormat format_from_extension(const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".xml")
        return CalibrationFormat::Xml;
    return CalibrationFormat::Json;
}

} // namespace

const char* denoise_mode_name(DenoiseMode mode) {
    switch (mode) {
    case DenoiseMode::Esa: return "esa";
    case DenoiseMode::Static: return "static";
    case DenoiseMode::Dynamic: return "dynamic";
    }
    return "?";
}

const char* ipf_class_name(IpfClass c) {
    return c == IpfClass::Le291 ? "le_2_91" : "ge_3";
}

SceneManifest load_manifest(const std::string& path) {
    std::string text = read_file(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::MalformedDocument, path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("scenes") || !doc["scenes"].is_array())
        throw Error(ErrorKind::SchemaViolation, path + ": missing 'scenes' array");

    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto resolve = [&base](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    SceneManifest manifest;
    int index = 0;
    for (const json& s : doc["scenes"]) {
        std::string at = path + ": scenes[" + std::to_string(index) + "]";
        if (!s.is_object()) throw Error(ErrorKind::SchemaViolation, at + ": expected object");
        auto str = [&](const char* key) {
            if (!s.contains(key) || !s[key].is_string())
                throw Error(ErrorKind::SchemaViolation,
                            at + ": missing string '" + key + "'");
            return s[key].get<std::string>();
        };
        SceneEntry entry;
        entry.scene_id = str("sceneId");
        entry.raster_path = resolve(str("rasterPath"));
        entry.calibration_path = resolve(str("calibrationPath"));
        std::string pol = str("polarization");
        if (pol == "HV") entry.polarization = Polarization::HV;
        else if (pol == "VH") entry.polarization = Polarization::VH;
        else throw Error(ErrorKind::SchemaViolation, at + ": polarization must be HV or VH");
        std::string ipf = s.value("ipfClass", "le_2_91");
        if (ipf == "le_2_91") entry.ipf_class = IpfClass::Le291;
        else if (ipf == "ge_3") entry.ipf_class = IpfClass::Ge3;
        else throw Error(ErrorKind::SchemaViolation, at + ": ipfClass must be le_2_91 or ge_3");
        if (!s.contains("oceanStrip") || !s["oceanStrip"].is_object())
            throw Error(ErrorKind::SchemaViolation, at + ": missing 'oceanStrip'");
        const json& strip = s["oceanStrip"];
        auto strip_int = [&](const char* key) {
            if (!strip.contains(key) || !strip[key].is_number_integer())
                throw Error(ErrorKind::SchemaViolation,
                            at + ".oceanStrip: missing integer '" + key + "'");
            return strip[key].get<int>();
        };
        entry.ocean_strip.first_row = strip_int("firstRow");
        entry.ocean_strip.last_row = strip_int("lastRow");
        entry.ocean_strip.first_col = strip_int("firstCol");
        entry.ocean_strip.last_col = strip_int("lastCol");
        manifest.entries.push_back(std::move(entry));
        ++index;
    }
    return manifest;
}

namespace {

struct SceneOutcome {
    std::vector<EvaluationRow> rows;
    std::vector<EvaluationResult::Profile> profiles;
    std::optional<EvaluationFailure> failure;
};

SceneOutcome evaluate_scene(const SceneEntry& entry, const EvaluationOptions& options) {
    SceneOutcome outcome;
    try {
        SceneRaster raster = load_raster(entry.raster_path, options.mask_threshold);
        CalibrationSet cal = parse_calibration(read_file(entry.calibration_path),
                                               format_from_extension(entry.calibration_path));
        NoiseField field = build_noise_field(cal);
        if (raster.rows != field.rows || raster.cols != field.cols)
            throw Error(ErrorKind::GeometryMismatch,
                        entry.scene_id + ": raster does not match calibration grid");

        Vec5 k_static = options.static_k ? *options.static_k
                                         : static_defaults(entry.polarization);

        Vec5 k_dynamic{1, 1, 1, 1, 1};
        bool dynamic_degraded = false;
        std::string dynamic_note;
        if (options.methods.count(DenoiseMode::Dynamic)) {
            try {
                k_dynamic = solve(build_system(raster, field, cal, options.params)).k;
            } catch (const Error& e) {
                dynamic_degraded = true;
                dynamic_note = e.what();
            }
        }

        DenoiseConfig config;
        config.negative_policy = NegativePolicy::Keep;
        config.output_units = OutputUnits::Dn2;
        for (DenoiseMode mode : options.methods) {
            Vec5 k{1, 1, 1, 1, 1};
            if (mode == DenoiseMode::Static) k = k_static;
            if (mode == DenoiseMode::Dynamic) k = k_dynamic;
            SceneRaster denoised = apply_denoise(raster, field, k, config);
            EvaluationRow row;
            row.scene_id = entry.scene_id;
            row.method = mode;
            row.flatness_nrmse = ocean_flatness_nrmse(denoised, entry.ocean_strip);
            if (mode == DenoiseMode::Dynamic && dynamic_degraded) {
                row.degraded = true;
                row.note = dynamic_note;
            }
            outcome.rows.push_back(row);
            outcome.profiles.push_back(
                {entry.scene_id, mode, flatness_profile(denoised, entry.ocean_strip)});
        }
    } catch (const Error& e) {
        outcome.rows.clear();
        outcome.profiles.clear();
        outcome.failure = EvaluationFailure{entry.scene_id, e.what()};
    }
    return outcome;
}

MethodAggregate aggregate_of(DenoiseMode mode, const std::vector<double>& xs) {
    MethodAggregate agg;
    agg.method = mode;
    agg.scenes = static_cast<int>(xs.size());
    if (xs.empty()) return agg;
    for (double x : xs) agg.mean += x;
    agg.mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - agg.mean) * (x - agg.mean);
    agg.stddev = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    return agg;
}

} // namespace

EvaluationResult run_evaluation(const SceneManifest& manifest,
                                const EvaluationOptions& options) {
    const int n = static_cast<int>(manifest.entries.size());
    std::vector<SceneOutcome> outcomes(n);

    const int jobs = std::max(1, options.jobs);
    if (jobs == 1 || n <= 1) {
        for (int i = 0; i < n; ++i)
            outcomes[i] = evaluate_scene(manifest.entries[i], options);
    } else {
        std::atomic<int> next{0};
        auto worker = [&] {
            while (true) {
                int i = next.fetch_add(1);
                if (i >= n) break;
                outcomes[i] = evaluate_scene(manifest.entries[i], options);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min(jobs, n); ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    // Deterministic merge in manifest order.
    EvaluationResult result;
    for (int i = 0; i < n; ++i) {
        SceneOutcome& o = outcomes[i];
        if (o.failure) {
            result.failures.push_back(*o.failure);
            continue;
        }
        for (EvaluationRow& row : o.rows) result.rows.push_back(std::move(row));
        for (auto& p : o.profiles) result.profiles.push_back(std::move(p));
    }

    auto collect = [&result](DenoiseMode mode, std::optional<IpfClass> cls,
                             const SceneManifest& m, bool paired_only) {
        std::vector<double> xs;
        for (const EvaluationRow& row : result.rows) {
            if (row.method != mode) continue;
            if (paired_only && row.degraded) continue;
            if (cls) {
                auto it = std::find_if(m.entries.begin(), m.entries.end(),
                                       [&row](const SceneEntry& e) {
                                           return e.scene_id == row.scene_id;
                                       });
                if (it == m.entries.end() || it->ipf_class != *cls) continue;
            }
            xs.push_back(row.flatness_nrmse);
        }
        return xs;
    };

    for (DenoiseMode mode : options.methods) {
        result.aggregates.push_back(
            aggregate_of(mode, collect(mode, std::nullopt, manifest, false)));
        for (IpfClass cls : {IpfClass::Le291, IpfClass::Ge3}) {
            std::vector<double> xs = collect(mode, cls, manifest, false);
            if (!xs.empty())
                result.aggregates_by_class.push_back({cls, aggregate_of(mode, xs)});
        }
    }

    // Paired tests over scenes where the dynamic estimate genuinely ran.
    auto paired = [&result](DenoiseMode a, DenoiseMode b,
                            std::vector<double>& xa, std::vector<double>& xb) {
        std::map<std::string, double> va, vb;
        std::set<std::string> degraded;
        for (const EvaluationRow& row : result.rows) {
            if (row.degraded) degraded.insert(row.scene_id);
            if (row.method == a) va[row.scene_id] = row.flatness_nrmse;
            if (row.method == b) vb[row.scene_id] = row.flatness_nrmse;
        }
        for (const auto& [scene, value] : va) {
            auto it = vb.find(scene);
            if (it == vb.end() || degraded.count(scene)) continue;
            xa.push_back(value);
            xb.push_back(it->second);
        }
    };
    if (options.methods.count(DenoiseMode::Dynamic)) {
        for (DenoiseMode other : {DenoiseMode::Esa, DenoiseMode::Static}) {
            if (!options.methods.count(other)) continue;
            std::vector<double> xd, xo;
            paired(DenoiseMode::Dynamic, other, xd, xo);
            if (xd.size() >= 2) {
                try {
                    double p = paired_t_test_one_tailed(xd, xo).p;
                    if (other == DenoiseMode::Esa) result.p_dynamic_vs_esa = p;
                    else result.p_dynamic_vs_static = p;
                } catch (const Error&) {
                    // Identical differences: leave the p-value unset.
                }
            }
        }
    }
    return result;
}

namespace {

void append_double(std::string& out, double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, p);
}

} // namespace

std::string evaluation_rows_csv(const EvaluationResult& result) {
    std::string out = "scene_id,method,flatness_nrmse,degraded,note\n";
    for (const EvaluationRow& row : result.rows) {
        out += row.scene_id;
        out += ',';
        out += denoise_mode_name(row.method);
        out += ',';
        append_double(out, row.flatness_nrmse);
        out += ',';
        out += row.degraded ? '1' : '0';
        out += ',';
        std::string note = row.note;
        std::replace(note.begin(), note.end(), ',', ';');
        std::replace(note.begin(), note.end(), '\n', ' ');
        out += note;
        out += '\n';
    }
    return out;
}

std::string evaluation_summary_json(const EvaluationResult& result) {
    json doc;
    doc["aggregates"] = json::object();
    for (const MethodAggregate& agg : result.aggregates)
        doc["aggregates"][denoise_mode_name(agg.method)] = {
            {"scenes", agg.scenes}, {"mean", agg.mean}, {"std", agg.stddev}};
    doc["aggregatesByIpfClass"] = json::object();
    for (const auto& [cls, agg] : result.aggregates_by_class)
        doc["aggregatesByIpfClass"][ipf_class_name(cls)][denoise_mode_name(agg.method)] = {
            {"scenes", agg.scenes}, {"mean", agg.mean}, {"std", agg.stddev}};
    if (result.p_dynamic_vs_esa) doc["pValues"]["dynamic_vs_esa"] = *result.p_dynamic_vs_esa;
    if (result.p_dynamic_vs_static)
        doc["pValues"]["dynamic_vs_static"] = *result.p_dynamic_vs_static;
    doc["failures"] = json::array();
    for (const EvaluationFailure& f : result.failures)
        doc["failures"].push_back({{"sceneId", f.scene_id}, {"reason", f.reason}});
    return doc.dump(2) + "\n";
}

std::string evaluation_profiles_csv(const EvaluationResult& result) {
    std::string out = "scene_id,method,col,xi,fit\n";
    for (const EvaluationResult::Profile& p : result.profiles) {
        for (size_t idx = 0; idx < p.profile.xi.size(); ++idx) {
            out += p.scene_id;
            out += ',';
            out += denoise_mode_name(p.method);
            out += ',';
            out += std::to_string(p.profile.cols[idx]);
            out += ',';
            append_double(out, p.profile.xi[idx]);
            out += ',';
            append_double(out, p.profile.fit[idx]);
            out += '\n';
        }
    }
    return out;
}

} // namespace ewnoise
