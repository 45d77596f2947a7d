#include "ewnoise/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ewnoise/calibration.hpp"
#include "ewnoise/denoise.hpp"
#include "ewnoise/error.hpp"
#include "ewnoise/evaluation.hpp"
#include "ewnoise/metrics.hpp"
#include "ewnoise/noise_field.hpp"
#include "ewnoise/objective.hpp"
#include "ewnoise/raster.hpp"
#include "ewnoise/rng.hpp"
#include "ewnoise/simulation.hpp"
#include "ewnoise/solver.hpp"
#include "ewnoise/synthetic.hpp"

namespace ewnoise::cli {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
    out << content;
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

CalibrationFormat format_from_extension(const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".xml")
        return CalibrationFormat::Xml;
    return CalibrationFormat::Json;
}

CalibrationSet load_calibration(const std::string& path) {
    return parse_calibration(read_file(path), format_from_extension(path));
}

// Shared objective/masking flags; defaults are the published constants.
struct CommonFlags {
    ObjectiveParams params;
    std::vector<double> lambda;
    float mask_threshold = 0.0f;

    void attach(CLI::App* cmd) {
        cmd->add_option("--epsilon", params.epsilon,
                        "Range half-window for windowed means, pixels")
            ->capture_default_str();
        cmd->add_option("--mu", params.mu, "Intra-subswath row weight")
            ->capture_default_str();
        cmd->add_option("--ratio-lo", params.ratio_lo,
                        "Lower bound of the accepted x-diff/y-diff ratio")
            ->capture_default_str();
        cmd->add_option("--ratio-hi", params.ratio_hi,
                        "Upper bound of the accepted x-diff/y-diff ratio")
            ->capture_default_str();
        cmd->add_option("--lambda", lambda,
                        "Per-subswath regularization strengths "
                        "(default 0.1 0.1 6.75124 2.78253 10)")
            ->expected(5);
        cmd->add_option("--mask-threshold", mask_threshold,
                        "Cells with value <= threshold are masked out")
            ->capture_default_str();
    }

    void finalize() {
        if (!lambda.empty())
            for (int a = 0; a < 5; ++a) params.lambda[a] = lambda[a];
    }
};

int run_estimate(const std::string& raster_path, const std::string& cal_path,
                 const std::string& out_path, const std::string& rows_path,
                 CommonFlags& flags) {
    flags.finalize();
    SceneRaster raster = load_raster(raster_path, flags.mask_threshold);
    CalibrationSet cal = load_calibration(cal_path);
    NoiseField field = build_noise_field(cal);
    LinearSystem system = build_system(raster, field, cal, flags.params);
    ScalingEstimate estimate = solve(system);
    std::string report = estimate_report_json(estimate, flags.params);
    if (out_path.empty() || out_path == "-") std::cout << report;
    else write_file(out_path, report);
    if (!rows_path.empty()) write_file(rows_path, system_to_csv(system));
    return 0;
}

int run_denoise(const std::string& raster_path, const std::string& cal_path,
                const std::string& out_path, const std::string& mode_name,
                std::vector<double>& static_k, const std::string& polarization,
                const std::string& units, const std::string& negatives,
                const std::string& report_path, const std::string& noise_path,
                CommonFlags& flags) {
    flags.finalize();
    SceneRaster raster = load_raster(raster_path, flags.mask_threshold);
    CalibrationSet cal = load_calibration(cal_path);
    NoiseField field = build_noise_field(cal);

    DenoiseConfig config;
    config.output_units = units == "dn" ? OutputUnits::Dn : OutputUnits::Dn2;
    if (negatives.empty())
        config.negative_policy = config.output_units == OutputUnits::Dn
                                     ? NegativePolicy::ClampZero
                                     : NegativePolicy::Keep;
    else
        config.negative_policy =
            negatives == "keep" ? NegativePolicy::Keep : NegativePolicy::ClampZero;

    Vec5 k{1, 1, 1, 1, 1};
    nlohmann::json report;
    if (mode_name == "static") {
        if (!static_k.empty())
            for (int a = 0; a < 5; ++a) k[a] = static_k[a];
        else
            k = static_defaults(polarization == "VH" ? Polarization::VH
                                                     : Polarization::HV);
    } else if (mode_name == "dynamic") {
        ScalingEstimate estimate = solve(build_system(raster, field, cal, flags.params));
        k = estimate.k;
        report["condition"] = estimate.condition_estimate;
        for (const auto& [tag, value] : estimate.per_term_residuals)
            report["residuals"][term_tag_name(tag)] = value;
    }
    report["mode"] = mode_name;
    report["k"] = k;

    SceneRaster out = apply_denoise(raster, field, k, config);
    save_raster(out, out_path, units == "dn" ? "dn" : "dn2");
    if (!report_path.empty()) write_file(report_path, report.dump(2) + "\n");
    if (!noise_path.empty()) {
        SceneRaster noise(field.rows, field.cols);
        for (size_t i = 0; i < field.values.size(); ++i)
            noise.values[i] = static_cast<float>(field.values[i]);
        save_raster(noise, noise_path, "dn2");
    }
    return 0;
}

int run_simulate(const std::string& out_dir, const std::string& cal_path,
                 std::vector<std::string>& clean_paths, int images, int replicates,
                 int rows, int cols, uint64_t seed, double snr, int jobs,
                 CommonFlags& flags) {
    flags.finalize();
    fs::create_directories(out_dir);

    CalibrationSet cal;
    if (!cal_path.empty()) {
        cal = load_calibration(cal_path);
    } else {
        SyntheticCalOptions opt;
        opt.rows = rows;
        opt.cols = cols;
        cal = make_synthetic_calibration(opt);
    }
    NoiseField field = build_noise_field(cal);

    std::vector<SceneRaster> clean_set;
    if (!clean_paths.empty()) {
        for (const std::string& p : clean_paths)
            clean_set.push_back(load_raster(p, flags.mask_threshold));
    } else {
        RandomStream root(seed);
        for (int i = 0; i < images; ++i)
            clean_set.push_back(make_clean_raster(cal.scene_rows, cal.scene_cols,
                                                  CleanStyle::Textured,
                                                  root.substream(0x10000 + i)));
    }

    SimulationSpec spec;
    spec.replicates = replicates;
    spec.seed = seed;
    spec.snr_target = snr;
    SimulationResult result = run_simulation(clean_set, field, cal, spec,
                                             flags.params, jobs);
    write_file((fs::path(out_dir) / "records.csv").string(),
               simulation_records_csv(result));
    write_file((fs::path(out_dir) / "summary.json").string(),
               simulation_summary_json(result, spec));
    return 0;
}

int run_evaluate(const std::string& manifest_path, const std::string& out_dir,
                 std::vector<std::string>& methods, std::vector<double>& static_k,
                 int jobs, CommonFlags& flags) {
    flags.finalize();
    fs::create_directories(out_dir);
    SceneManifest manifest = load_manifest(manifest_path);

    EvaluationOptions options;
    options.params = flags.params;
    options.mask_threshold = flags.mask_threshold;
    options.jobs = jobs;
    if (!methods.empty()) {
        options.methods.clear();
        for (const std::string& m : methods) {
            if (m == "esa") options.methods.insert(DenoiseMode::Esa);
            else if (m == "static") options.methods.insert(DenoiseMode::Static);
            else if (m == "dynamic") options.methods.insert(DenoiseMode::Dynamic);
            else throw Error(ErrorKind::InvariantViolation, "unknown method " + m);
        }
    }
    if (!static_k.empty()) {
        Vec5 k;
        for (int a = 0; a < 5; ++a) k[a] = static_k[a];
        options.static_k = k;
    }

    EvaluationResult result = run_evaluation(manifest, options);
    write_file((fs::path(out_dir) / "scenes.csv").string(), evaluation_rows_csv(result));
    write_file((fs::path(out_dir) / "summary.json").string(),
               evaluation_summary_json(result));
    write_file((fs::path(out_dir) / "profiles.csv").string(),
               evaluation_profiles_csv(result));
    return result.failures.empty() ? 0 : 5;
}

int run_make_fixtures(const std::string& out_dir, int rows, int cols, int scenes,
                      uint64_t seed) {
    fs::create_directories(out_dir);
    SyntheticCalOptions opt;
    opt.rows = rows;
    opt.cols = cols;
    CalibrationSet cal = make_synthetic_calibration(opt);
    write_file((fs::path(out_dir) / "calibration.xml").string(), emit_calibration_xml(cal));
    write_file((fs::path(out_dir) / "calibration.json").string(),
               emit_calibration_json(cal));
    NoiseField field = build_noise_field(cal);

    RandomStream root(seed);
    SimulationSpec spec; // for the published k sampling intervals
    nlohmann::json manifest;
    manifest["scenes"] = nlohmann::json::array();
    nlohmann::json truth = nlohmann::json::object();
    for (int s = 0; s < scenes; ++s) {
        RandomStream stream = root.substream(0x20000 + s);
        SceneRaster clean =
            make_clean_raster(rows, cols, CleanStyle::FlatOcean, stream.substream(0));
        SceneRaster scaled = rescale_to_snr(clean, field, 3.0);
        Vec5 k_true;
        for (int a = 0; a < 5; ++a)
            k_true[a] = stream.uniform(spec.k_ranges[a].first, spec.k_ranges[a].second);
        SceneRaster noisy = inject_noise(scaled, field, k_true);
        std::string name = "scene_" + std::to_string(s) + ".f32";
        save_raster(noisy, (fs::path(out_dir) / name).string());
        truth[name] = k_true;
        manifest["scenes"].push_back(
            {{"sceneId", "scene_" + std::to_string(s)},
             {"rasterPath", name},
             {"calibrationPath", "calibration.xml"},
             {"polarization", "HV"},
             {"ipfClass", "le_2_91"},
             {"oceanStrip",
              {{"firstRow", rows / 8},
               {"lastRow", rows - 1 - rows / 8},
               {"firstCol", 0},
               {"lastCol", cols - 1}}}});
    }
    write_file((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
    nlohmann::json meta{{"seed", seed}, {"rows", rows}, {"cols", cols},
                        {"injectedK", truth}};
    write_file((fs::path(out_dir) / "fixtures.json").string(), meta.dump(2) + "\n");

    // One textured clean raster for simulation workflows.
    SceneRaster clean = make_clean_raster(rows, cols, CleanStyle::Textured,
                                          root.substream(0x30000));
    save_raster(clean, (fs::path(out_dir) / "clean_0.f32").string());
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Per-subswath rescaling of the additive noise field for "
                 "cross-polarized wide-swath SAR imagery"};
    app.require_subcommand(1);

    // estimate
    auto* estimate = app.add_subcommand(
        "estimate", "Estimate per-subswath noise scales for one scene");
    std::string est_raster, est_cal, est_out = "-", est_rows;
    CommonFlags est_flags;
    estimate->add_option("--raster", est_raster, "Scene raster (f32le + JSON sidecar)")
        ->required();
    estimate->add_option("--calibration", est_cal, "Calibration document (.xml or .json)")
        ->required();
    estimate->add_option("--out", est_out, "Estimate report JSON ('-' for stdout)");
    estimate->add_option("--dump-rows", est_rows, "Optional CSV audit dump of all rows");
    est_flags.attach(estimate);

    // denoise
    auto* denoise = app.add_subcommand("denoise", "Denoise one scene");
    std::string den_raster, den_cal, den_out, den_mode = "dynamic", den_pol = "HV";
    std::string den_units = "dn2", den_neg, den_report, den_noise;
    std::vector<double> den_static_k;
    CommonFlags den_flags;
    denoise->add_option("--raster", den_raster, "Scene raster")->required();
    denoise->add_option("--calibration", den_cal, "Calibration document")->required();
    denoise->add_option("--out", den_out, "Output raster path")->required();
    denoise->add_option("--mode", den_mode, "esa | static | dynamic")
        ->check(CLI::IsMember({"esa", "static", "dynamic"}))
        ->capture_default_str();
    denoise->add_option("--static-k", den_static_k, "Static scaling vector")->expected(5);
    denoise
        ->add_option("--polarization", den_pol,
                     "Polarization selecting the published static vector")
        ->check(CLI::IsMember({"HV", "VH"}))
        ->capture_default_str();
    denoise->add_option("--units", den_units, "Output units: dn2 | dn")
        ->check(CLI::IsMember({"dn2", "dn"}))
        ->capture_default_str();
    denoise->add_option("--negatives", den_neg,
                        "clamp | keep (default: clamp for dn, keep for dn2)")
        ->check(CLI::IsMember({"clamp", "keep"}));
    denoise->add_option("--report", den_report, "Write the applied-k report JSON");
    denoise->add_option("--write-noise", den_noise, "Also write the noise field raster");
    den_flags.attach(denoise);

    // simulate
    auto* simulate = app.add_subcommand(
        "simulate", "Inject scaled noise into clean rasters and re-estimate");
    std::string sim_out, sim_cal;
    std::vector<std::string> sim_clean;
    int sim_images = 10, sim_replicates = 10, sim_rows = 256, sim_cols = 400;
    uint64_t sim_seed = 1;
    double sim_snr = 3.0;
    int sim_jobs = 1;
    CommonFlags sim_flags;
    simulate->add_option("--out-dir", sim_out, "Output directory")->required();
    simulate->add_option("--calibration", sim_cal,
                         "Calibration document (default: synthetic)");
    simulate->add_option("--clean", sim_clean, "Clean input rasters (default: synthetic)");
    simulate->add_option("--images", sim_images, "Synthetic clean images")
        ->capture_default_str();
    simulate->add_option("--replicates", sim_replicates, "Noisy replicates per image")
        ->capture_default_str();
    simulate->add_option("--rows", sim_rows, "Synthetic scene rows")->capture_default_str();
    simulate->add_option("--cols", sim_cols, "Synthetic scene cols")->capture_default_str();
    simulate->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
    simulate->add_option("--snr", sim_snr, "Clean-to-noise mean ratio after rescaling")
        ->capture_default_str();
    simulate->add_option("--jobs", sim_jobs, "Parallel replicate workers")
        ->capture_default_str();
    sim_flags.attach(simulate);

    // evaluate
    auto* evaluate = app.add_subcommand(
        "evaluate", "Batch flatness evaluation over a scene manifest");
    std::string eval_manifest, eval_out;
    std::vector<std::string> eval_methods;
    std::vector<double> eval_static_k;
    int eval_jobs = 1;
    CommonFlags eval_flags;
    evaluate->add_option("--manifest", eval_manifest, "Scene manifest JSON")->required();
    evaluate->add_option("--out-dir", eval_out, "Output directory")->required();
    evaluate->add_option("--methods", eval_methods,
                         "Subset of: esa static dynamic (default: all)");
    evaluate->add_option("--static-k", eval_static_k,
                         "Static vector override (default: polarization table)")
        ->expected(5);
    evaluate->add_option("--jobs", eval_jobs, "Parallel scene workers")
        ->capture_default_str();
    eval_flags.attach(evaluate);

    // make-fixtures
    auto* fixtures = app.add_subcommand(
        "make-fixtures", "Write a synthetic calibration + scene set + manifest");
    std::string fix_out;
    int fix_rows = 256, fix_cols = 400, fix_scenes = 4;
    uint64_t fix_seed = 7;
    fixtures->add_option("--out-dir", fix_out, "Output directory")->required();
    fixtures->add_option("--rows", fix_rows, "Scene rows")->capture_default_str();
    fixtures->add_option("--cols", fix_cols, "Scene cols")->capture_default_str();
    fixtures->add_option("--scenes", fix_scenes, "Number of ocean scenes")
        ->capture_default_str();
    fixtures->add_option("--seed", fix_seed, "RNG seed")->capture_default_str();

    std::vector<const char*> argv;
    argv.push_back("ewnoise");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (estimate->parsed())
            return run_estimate(est_raster, est_cal, est_out, est_rows, est_flags);
        if (denoise->parsed())
            return run_denoise(den_raster, den_cal, den_out, den_mode, den_static_k,
                               den_pol, den_units, den_neg, den_report, den_noise,
                               den_flags);
        if (simulate->parsed())
            return run_simulate(sim_out, sim_cal, sim_clean, sim_images, sim_replicates,
                                sim_rows, sim_cols, sim_seed, sim_snr, sim_jobs,
                                sim_flags);
        if (evaluate->parsed())
            return run_evaluate(eval_manifest, eval_out, eval_methods, eval_static_k,
                                eval_jobs, eval_flags);
        if (fixtures->parsed())
            return run_make_fixtures(fix_out, fix_rows, fix_cols, fix_scenes, fix_seed);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return error_kind_exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}

} // namespace ewnoise::cli
