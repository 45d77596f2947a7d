// Acceptance suite: runs each shipping criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ewnoise/calibration.hpp"
#include "ewnoise/cli.hpp"
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

#include "fixtures.hpp"
#include "oracles.hpp"
#include "reference_values.hpp"

using namespace ewnoise;

namespace {

int failures = 0;

struct Criterion {
    std::string label;
    std::vector<std::string> problems;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    explicit Criterion(std::string text) : label(std::move(text)) {}

    void require(bool ok, const std::string& what) {
        if (!ok) problems.push_back(what);
    }

    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }

    void finish(double budget_seconds = 0.0) {
        double elapsed = seconds();
        if (budget_seconds > 0.0 && elapsed > budget_seconds)
            problems.push_back("runtime " + std::to_string(elapsed) + "s over budget " +
                               std::to_string(budget_seconds) + "s");
        if (problems.empty()) {
            std::printf("PASS  %s (%.1fs)\n", label.c_str(), elapsed);
        } else {
            ++failures;
            std::printf("FAIL  %s (%.1fs)\n", label.c_str(), elapsed);
            for (const std::string& p : problems)
                std::printf("      - %s\n", p.c_str());
        }
        std::fflush(stdout);
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// 1. Stacked inner product == direct summation, 50 scenes x 10 k, < 1e-9.
void criterion_equivalence() {
    Criterion c("1 inner-product loss equals direct summation (50 scenes x 10 k, 1e-9)");
    RandomStream stream(1001);
    ObjectiveParams params;
    params.epsilon = 6;
    for (int scene = 0; scene < 50 && c.problems.size() < 3; ++scene) {
        CalibrationSet cal = fixtures::random_cal(stream, 64, 160);
        NoiseField field = build_noise_field(cal);
        SceneRaster raster = fixtures::perturbed_field_raster(field, stream);
        ExtremaLayout layout = locate_extrema(field, cal, params.epsilon);
        LinearSystem system = assemble(
            azimuth_rows(raster, field, params),
            intra_range_rows(raster, field, cal, layout, params),
            inter_swath_rows(raster, field, cal, params),
            regularizer_rows(params.lambda));
        for (int trial = 0; trial < 10; ++trial) {
            Vec5 k;
            for (double& v : k) v = stream.uniform(0.5, 2.0);
            double stacked = system.evaluate(k);
            double direct = oracles::direct_loss(raster, field, cal, layout, params, k);
            double rel = std::abs(stacked - direct) / std::max(1.0, std::abs(direct));
            if (!(rel < 1e-9)) {
                c.require(false, "scene " + std::to_string(scene) + " rel err " +
                                     std::to_string(rel));
                break;
            }
        }
    }
    c.finish(10.0);
}

// 2. Closed form vs coordinate grid search, 20 systems, 2e-3 per component.
void criterion_solver_oracle() {
    Criterion c("2 closed-form solve matches grid search (20 systems, 2e-3)");
    RandomStream stream(2002);
    for (int trial = 0; trial < 20; ++trial) {
        Vec5 k_target;
        for (double& v : k_target) v = stream.uniform(0.7, 1.8);
        std::vector<LossRow> single, pair;
        for (int r = 0; r < 200; ++r) {
            LossRow row;
            row.weight = 1.0;
            if (stream.next_double() < 0.75) {
                int a = static_cast<int>(stream.uniform(0, 5));
                row.tag = TermTag::Azimuth;
                row.coefficients[a] = stream.uniform(0.5, 3.0);
                row.residual_const =
                    row.coefficients[a] * k_target[a] + 0.05 * stream.normal();
                single.push_back(row);
            } else {
                int a = static_cast<int>(stream.uniform(0, 4));
                row.tag = TermTag::InterSwath;
                row.coefficients[a] = stream.uniform(0.5, 3.0);
                row.coefficients[a + 1] = -stream.uniform(0.5, 3.0);
                row.residual_const = row.coefficients[a] * k_target[a] +
                                     row.coefficients[a + 1] * k_target[a + 1] +
                                     0.05 * stream.normal();
                pair.push_back(row);
            }
        }
        LinearSystem system =
            assemble(single, {}, pair, regularizer_rows({0.1, 0.1, 0.1, 0.1, 0.1}));
        Vec5 solved = solve(system).k;
        Vec5 searched = oracles::grid_search_minimize(system);
        for (int a = 0; a < 5; ++a)
            c.require(std::abs(solved[a] - searched[a]) < 2e-3,
                      "system " + std::to_string(trial) + " col " + std::to_string(a) +
                          ": " + std::to_string(solved[a]) + " vs " +
                          std::to_string(searched[a]));
    }
    c.finish(120.0);
}

// 3. Exact recovery on x = c y fixtures.
void criterion_exact_recovery() {
    Criterion c("3 exact recovery of k = c on pure-noise scenes");
    RandomStream stream(3003);
    CalibrationSet cal = fixtures::random_cal(stream, 64, 160);
    NoiseField field = build_noise_field(cal);
    for (double scale : {0.8, 1.0, 1.4886}) {
        SceneRaster raster = fixtures::raster_from_field(field, scale);

        ObjectiveParams free_params;
        free_params.epsilon = 6;
        free_params.lambda = {0, 0, 0, 0, 0};
        Vec5 k_free = solve(build_system(raster, field, cal, free_params)).k;
        for (int a = 0; a < 5; ++a)
            c.require(std::abs(k_free[a] - scale) < 1e-6,
                      "lambda=0, c=" + std::to_string(scale) + ", col " +
                          std::to_string(a) + ": " + std::to_string(k_free[a]));

        ObjectiveParams paper_params;
        paper_params.epsilon = 6;
        Vec5 k_reg = solve(build_system(raster, field, cal, paper_params)).k;
        for (int a = 0; a < 2; ++a) // weakly regularized EW1, EW2
            c.require(std::abs(k_reg[a] - scale) < 0.05,
                      "paper lambda, c=" + std::to_string(scale) + ", col " +
                          std::to_string(a) + ": " + std::to_string(k_reg[a]));
    }
    c.finish();
}

// 4. Simulation ordering with the published intervals and baseline.
void criterion_simulation_ordering() {
    Criterion c("4 simulation: NRMSE/SSIM orderings with p < 0.05");
    RandomStream stream(4004);
    SyntheticCalOptions opt;
    opt.rows = 192;
    opt.cols = 320;
    CalibrationSet cal = make_synthetic_calibration(opt);
    NoiseField field = build_noise_field(cal);
    std::vector<SceneRaster> clean_set;
    for (int i = 0; i < 10; ++i)
        clean_set.push_back(make_clean_raster(opt.rows, opt.cols, CleanStyle::Textured,
                                              stream.substream(100 + i)));
    SimulationSpec spec; // published intervals and central baseline
    spec.replicates = 5;
    spec.seed = 4004;
    ObjectiveParams params;
    params.epsilon = 6;
    SimulationResult result = run_simulation(clean_set, field, cal, spec, params, 2);

    const auto& s = result.summary;
    const double nrmse_noisy = s.stats[0][0].mean;
    const double nrmse_baseline = s.stats[1][0].mean;
    const double nrmse_proposed = s.stats[2][0].mean;
    const double ssim_baseline = s.stats[1][2].mean;
    const double ssim_proposed = s.stats[2][2].mean;
    c.require(nrmse_proposed < nrmse_baseline,
              "mean NRMSE proposed " + std::to_string(nrmse_proposed) +
                  " !< baseline " + std::to_string(nrmse_baseline));
    c.require(nrmse_baseline < nrmse_noisy,
              "mean NRMSE baseline " + std::to_string(nrmse_baseline) + " !< noisy " +
                  std::to_string(nrmse_noisy));
    c.require(ssim_proposed > ssim_baseline,
              "mean SSIM proposed " + std::to_string(ssim_proposed) +
                  " !> baseline " + std::to_string(ssim_baseline));
    c.require(s.p_nrmse_vs_baseline < 0.05,
              "p (NRMSE, proposed vs baseline) = " +
                  std::to_string(s.p_nrmse_vs_baseline));
    c.require(s.p_nrmse_vs_noisy < 0.05,
              "p (NRMSE, proposed vs noisy) = " + std::to_string(s.p_nrmse_vs_noisy));
    c.finish(300.0);
}

// 5. Flatness ordering over manifest-driven synthetic ocean scenes.
void criterion_flatness_ordering() {
    Criterion c("5 flatness: dynamic < static < esa in the mean, p < 0.05");
    std::string dir = fixtures::temp_dir("acceptance_flatness");
    RandomStream root(5005);
    SyntheticCalOptions opt;
    opt.rows = 96;
    opt.cols = 200;
    CalibrationSet cal = make_synthetic_calibration(opt);
    {
        std::ofstream out(dir + "/calibration.json", std::ios::binary);
        out << emit_calibration_json(cal);
    }
    NoiseField field = build_noise_field(cal);
    SimulationSpec spec;
    nlohmann::json manifest;
    manifest["scenes"] = nlohmann::json::array();
    for (int s = 0; s < 10; ++s) {
        RandomStream stream = root.substream(s);
        SceneRaster clean =
            make_clean_raster(opt.rows, opt.cols, CleanStyle::FlatOcean,
                              stream.substream(0));
        SceneRaster scaled = rescale_to_snr(clean, field, 3.0);
        Vec5 k_true;
        for (int a = 0; a < 5; ++a)
            k_true[a] = stream.uniform(spec.k_ranges[a].first, spec.k_ranges[a].second);
        SceneRaster noisy = inject_noise(scaled, field, k_true);
        std::string name = "scene_" + std::to_string(s) + ".f32";
        save_raster(noisy, dir + "/" + name);
        manifest["scenes"].push_back(
            {{"sceneId", "s" + std::to_string(s)},
             {"rasterPath", name},
             {"calibrationPath", "calibration.json"},
             {"polarization", "HV"},
             {"ipfClass", "le_2_91"},
             {"oceanStrip",
              {{"firstRow", 12},
               {"lastRow", opt.rows - 13},
               {"firstCol", 0},
               {"lastCol", opt.cols - 1}}}});
    }
    {
        std::ofstream out(dir + "/manifest.json", std::ios::binary);
        out << manifest.dump(2);
    }

    EvaluationOptions options;
    options.params.epsilon = 6;
    EvaluationResult result =
        run_evaluation(load_manifest(dir + "/manifest.json"), options);
    c.require(result.failures.empty(), "unexpected per-scene failures");

    double mean_esa = 0, mean_static = 0, mean_dynamic = 0;
    for (const MethodAggregate& agg : result.aggregates) {
        if (agg.method == DenoiseMode::Esa) mean_esa = agg.mean;
        if (agg.method == DenoiseMode::Static) mean_static = agg.mean;
        if (agg.method == DenoiseMode::Dynamic) mean_dynamic = agg.mean;
    }
    c.require(mean_dynamic < mean_static,
              "dynamic " + std::to_string(mean_dynamic) + " !< static " +
                  std::to_string(mean_static));
    c.require(mean_static < mean_esa, "static " + std::to_string(mean_static) +
                                          " !< esa " + std::to_string(mean_esa));
    c.require(result.p_dynamic_vs_esa && *result.p_dynamic_vs_esa < 0.05,
              "p (dynamic vs esa) = " +
                  (result.p_dynamic_vs_esa ? std::to_string(*result.p_dynamic_vs_esa)
                                           : std::string("unset")));
    c.finish();
}

// 6. Fuzzed parser totality: 10,000 mutated documents, typed errors only.
void criterion_parser_fuzz() {
    Criterion c("6 parser totality over 10,000 mutated documents");
    RandomStream root(6006);
    CalibrationSet seed_cal = fixtures::random_cal(root, 32, 80);
    const std::string xml_seed = emit_calibration_xml(seed_cal);
    const std::string json_seed = emit_calibration_json(seed_cal);
    const char* tokens[] = {"<", ">", "&", "\"", "]]>", "<!--", "{", "}", "[", ",",
                            "1e999", "-", "NaN", "<swath>EW9</swath>", "count=\"7\""};

    long parsed_ok = 0, typed_errors = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        RandomStream stream = root.substream(7000 + trial);
        std::string doc = trial % 2 == 0 ? xml_seed : json_seed;
        int edits = 1 + static_cast<int>(stream.uniform(0, 12));
        for (int e = 0; e < edits && !doc.empty(); ++e) {
            size_t at = static_cast<size_t>(stream.uniform(0, doc.size()));
            switch (static_cast<int>(stream.uniform(0, 5))) {
            case 0: doc[at] = static_cast<char>(stream.uniform(1, 255)); break;
            case 1: doc.erase(at, 1 + static_cast<size_t>(stream.uniform(0, 16))); break;
            case 2: doc.insert(at, 1, static_cast<char>(stream.uniform(1, 255))); break;
            case 3:
                doc.insert(at, tokens[static_cast<int>(
                                   stream.uniform(0, std::size(tokens)))]);
                break;
            default: {
                // splice a random slice elsewhere
                size_t len = 1 + static_cast<size_t>(stream.uniform(0, 40));
                size_t from = static_cast<size_t>(stream.uniform(0, doc.size()));
                std::string slice = doc.substr(from, len);
                doc.insert(at, slice);
            }
            }
        }
        if (stream.next_double() < 0.1) doc.resize(doc.size() / 2); // truncate
        for (CalibrationFormat format :
             {CalibrationFormat::Xml, CalibrationFormat::Json}) {
            try {
                (void)parse_calibration(doc, format);
                ++parsed_ok;
            } catch (const Error&) {
                ++typed_errors;
            } catch (const std::exception& e) {
                c.require(false, std::string("untyped exception: ") + e.what());
            }
        }
        if (c.problems.size() > 3) break;
    }
    c.require(parsed_ok + typed_errors > 0, "no documents processed");
    std::printf("      (fuzz: %ld parsed, %ld typed errors)\n", parsed_ok, typed_errors);
    c.finish();
}

// 7. Metric implementations match independent references to 1e-8.
void criterion_metric_crosschecks() {
    Criterion c("7 metric cross-checks against independent references (1e-8)");

    SceneRaster ref(4, 4), pred(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            ref.at(i, j) = static_cast<float>(1.0 + 0.25 * ((i * 4 + j) % 7));
            pred.at(i, j) =
                ref.at(i, j) + static_cast<float>(0.125 * ((i + 2 * j) % 5 - 2));
        }
    c.require(std::abs(psnr(pred, ref) - reference::kPsnr4x4Db) < 1e-8,
              "psnr: " + std::to_string(psnr(pred, ref)));

    SceneRaster sref(16, 16), spred(16, 16);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) {
            sref.at(i, j) = static_cast<float>(0.125 * ((i * 5 + j * 3) % 23) +
                                               0.5 * ((i / 4 + j / 4) % 2));
            spred.at(i, j) = sref.at(i, j) + 0.25f;
        }
    double ssim_value = ssim(spred, sref, 7, reference::kSsim16x16Range);
    c.require(std::abs(ssim_value - reference::kSsim16x16Shifted) < 1e-8,
              "ssim shifted: " + std::to_string(ssim_value));

    SceneRaster ca(16, 16), cb(16, 16);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) {
            ca.at(i, j) = static_cast<float>((i + j) % 2);
            cb.at(i, j) = 1.0f - ca.at(i, j);
        }
    double checker = ssim(ca, cb, 7, 1.0);
    c.require(std::abs(checker - reference::kSsimCheckerboard) < 1e-8,
              "ssim checkerboard: " + std::to_string(checker));

    std::vector<double> seq_ref{0.0, 2.0, 4.0, 6.0, 8.0, 10.0};
    std::vector<double> seq_pred(seq_ref);
    for (double& v : seq_pred) v += 1.0;
    c.require(std::abs(nrmse(seq_pred, seq_ref) - 0.1) < 1e-12, "nrmse shifted ramp");

    SceneRaster flat(4, 16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 16; ++j)
            flat.at(i, j) = static_cast<float>(2.0 + 0.5 * j + (j == 7 ? 3.0 : 0.0));
    double spike = ocean_flatness_nrmse(flat, {0, 3, 0, 15});
    c.require(std::abs(spike - reference::kFlatnessSpike) < 1e-6,
              "flatness spike: " + std::to_string(spike));

    std::vector<double> a{0.5, 0.75, 0.25, 1.0, 0.625, 0.875, 0.375, 0.125, 0.9375,
                          0.5625};
    std::vector<double> b{0.625, 0.8125, 0.5, 1.125, 0.625, 1.0, 0.5625, 0.25, 1.0,
                          0.75};
    TTestResult t = paired_t_test_one_tailed(a, b);
    c.require(std::abs(t.t - reference::kTTestStatistic) < 1e-8,
              "t statistic: " + std::to_string(t.t));
    c.require(std::abs(t.p - reference::kTTestPValue) < 1e-8,
              "t p-value: " + std::to_string(t.p));
    c.finish();
}

// 8. Re-running any command with identical inputs is bit-identical.
void criterion_determinism() {
    Criterion c("8 bit-identical outputs across reruns and --jobs settings");
    std::string base = fixtures::temp_dir("acceptance_determinism");

    auto run = [&](const std::vector<std::string>& args) {
        int code = cli::run(args);
        c.require(code == 0, "command failed with exit " + std::to_string(code));
    };

    run({"make-fixtures", "--out-dir", base + "/fx", "--rows", "64", "--cols", "160",
         "--scenes", "2", "--seed", "11"});
    run({"make-fixtures", "--out-dir", base + "/fx2", "--rows", "64", "--cols", "160",
         "--scenes", "2", "--seed", "11"});
    for (const char* name :
         {"/calibration.xml", "/calibration.json", "/scene_0.f32", "/manifest.json"})
        c.require(slurp(base + "/fx" + name) == slurp(base + "/fx2" + name),
                  std::string("make-fixtures differs: ") + name);

    std::vector<std::string> sim{"simulate", "--images", "2", "--replicates", "2",
                                 "--rows",   "64",       "--cols", "160",
                                 "--seed",   "3",        "--epsilon", "6"};
    std::vector<std::string> sim_a = sim;
    sim_a.insert(sim_a.end(), {"--out-dir", base + "/sim_a", "--jobs", "1"});
    std::vector<std::string> sim_b = sim;
    sim_b.insert(sim_b.end(), {"--out-dir", base + "/sim_b", "--jobs", "4"});
    run(sim_a);
    run(sim_b);
    c.require(slurp(base + "/sim_a/records.csv") == slurp(base + "/sim_b/records.csv"),
              "simulate records differ across --jobs");
    c.require(slurp(base + "/sim_a/summary.json") == slurp(base + "/sim_b/summary.json"),
              "simulate summaries differ across --jobs");

    run({"estimate", "--raster", base + "/fx/scene_0.f32", "--calibration",
         base + "/fx/calibration.xml", "--epsilon", "6", "--out", base + "/r1.json"});
    run({"estimate", "--raster", base + "/fx/scene_0.f32", "--calibration",
         base + "/fx/calibration.xml", "--epsilon", "6", "--out", base + "/r2.json"});
    c.require(slurp(base + "/r1.json") == slurp(base + "/r2.json"),
              "estimate reports differ");

    run({"evaluate", "--manifest", base + "/fx/manifest.json", "--out-dir",
         base + "/ev1", "--epsilon", "6", "--jobs", "1"});
    run({"evaluate", "--manifest", base + "/fx/manifest.json", "--out-dir",
         base + "/ev2", "--epsilon", "6", "--jobs", "3"});
    for (const char* name : {"/scenes.csv", "/summary.json", "/profiles.csv"})
        c.require(slurp(base + "/ev1" + name) == slurp(base + "/ev2" + name),
                  std::string("evaluate outputs differ: ") + name);
    c.finish();
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_equivalence();
    criterion_solver_oracle();
    criterion_exact_recovery();
    criterion_simulation_ordering();
    criterion_flatness_ordering();
    criterion_parser_fuzz();
    criterion_metric_crosschecks();
    criterion_determinism();
    if (failures == 0) std::printf("all criteria passed\n");
    else std::printf("%d criteria failed\n", failures);
    return failures;
}
