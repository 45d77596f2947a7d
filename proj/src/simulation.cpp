#include "ewnoise/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "ewnoise/error.hpp"
#include "ewnoise/metrics.hpp"
#include "ewnoise/rng.hpp"
#include "ewnoise/solver.hpp"

namespace ewnoise {

SceneRaster inject_noise(const SceneRaster& clean, const NoiseField& field,
                         const Vec5& k_true) {
    if (clean.rows != field.rows || clean.cols != field.cols)
        throw Error(ErrorKind::GeometryMismatch,
                    "clean raster " + std::to_string(clean.rows) + "x" +
                        std::to_string(clean.cols) + " vs field " +
                        std::to_string(field.rows) + "x" + std::to_string(field.cols));
    SceneRaster noisy = clean;
    for (int i = 0; i < clean.rows; ++i) {
        for (const SubswathMap::Span& span : field.map.row_spans(i)) {
            const double ka = k_true[span.swath];
            for (int j = span.begin; j < span.end; ++j)
                noisy.at(i, j) = static_cast<float>(
                    static_cast<double>(clean.at(i, j)) + ka * field.at(i, j));
        }
    }
    return noisy;
}

SceneRaster rescale_to_snr(const SceneRaster& clean, const NoiseField& field,
                           double snr_target) {
    double field_sum = 0.0;
    long field_count = 0;
    for (int i = 0; i < field.rows; ++i) {
        for (const SubswathMap::Span& span : field.map.row_spans(i)) {
            for (int j = span.begin; j < span.end; ++j) {
                field_sum += field.at(i, j);
                ++field_count;
            }
        }
    }
    if (field_count == 0 || field_sum == 0.0)
        throw Error(ErrorKind::DegenerateField, "noise field mean is zero");
    const double field_mean = field_sum / field_count;

    double clean_sum = 0.0;
    long clean_count = 0;
    for (size_t idx = 0; idx < clean.values.size(); ++idx) {
        if (!clean.valid[idx]) continue;
        clean_sum += clean.values[idx];
        ++clean_count;
    }
    if (clean_count == 0 || clean_sum == 0.0)
        throw Error(ErrorKind::DegenerateField, "clean raster mean is zero");
    const double scale = snr_target * field_mean / (clean_sum / clean_count);

    SceneRaster out = clean;
    for (float& v : out.values) v = static_cast<float>(v * scale);
    return out;
}

namespace {

MethodMetrics score(const SceneRaster& candidate, const SceneRaster& truth,
                    double peak, double dynamic_range) {
    MethodMetrics m;
    m.nrmse = nrmse(candidate, truth);
    m.psnr = psnr(candidate, truth, peak);
    m.ssim = ssim(candidate, truth, 7, dynamic_range);
    return m;
}

SimulationSummary::Stats stats_of(const std::vector<double>& xs) {
    SimulationSummary::Stats s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    return s;
}

} // namespace

SimulationResult run_simulation(const std::vector<SceneRaster>& clean_set,
                                const NoiseField& field, const CalibrationSet& cal,
                                const SimulationSpec& spec, const ObjectiveParams& params,
                                int jobs) {
    if (spec.replicates < 1)
        throw Error(ErrorKind::InvariantViolation, "replicates must be >= 1");
    for (const auto& [lo, hi] : spec.k_ranges)
        if (lo > hi)
            throw Error(ErrorKind::InvariantViolation, "k interval with low > high");

    const int n_images = static_cast<int>(clean_set.size());
    const int n_tasks = n_images * spec.replicates;
    SimulationResult result;
    result.records.resize(n_tasks);

    // SNR rescale once per clean image; the rescaled image is the ground
    // truth the metrics compare against.
    std::vector<SceneRaster> truth;
    truth.reserve(clean_set.size());
    for (const SceneRaster& clean : clean_set)
        truth.push_back(rescale_to_snr(clean, field, spec.snr_target));

    const RandomStream root(spec.seed);
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto run_task = [&](int task) {
        const int image = task / spec.replicates;
        const int replicate = task % spec.replicates;
        RandomStream stream = root.substream(static_cast<uint64_t>(image),
                                             static_cast<uint64_t>(replicate));
        SimulationRecord rec;
        rec.image_id = image;
        rec.replicate = replicate;
        for (int a = 0; a < 5; ++a)
            rec.k_true[a] = stream.uniform(spec.k_ranges[a].first, spec.k_ranges[a].second);

        const SceneRaster& clean = truth[image];
        SceneRaster noisy = inject_noise(clean, field, rec.k_true);

        LinearSystem system = build_system(noisy, field, cal, params);
        rec.k_hat = solve(system).k;

        DenoiseConfig config;
        config.negative_policy = NegativePolicy::Keep;
        config.output_units = OutputUnits::Dn2;
        SceneRaster denoised_baseline = apply_denoise(noisy, field, spec.baseline_k, config);
        SceneRaster denoised_proposed = apply_denoise(noisy, field, rec.k_hat, config);

        const double peak = *std::max_element(clean.values.begin(), clean.values.end());
        const double lo = *std::min_element(clean.values.begin(), clean.values.end());
        const double range = peak - lo;
        rec.noisy = score(noisy, clean, peak, range);
        rec.baseline = score(denoised_baseline, clean, peak, range);
        rec.proposed = score(denoised_proposed, clean, peak, range);
        result.records[task] = std::move(rec);
    };

    jobs = std::max(1, jobs);
    if (jobs == 1) {
        for (int task = 0; task < n_tasks; ++task) run_task(task);
    } else {
        std::atomic<int> next{0};
        auto worker = [&] {
            while (true) {
                int task = next.fetch_add(1);
                if (task >= n_tasks) break;
                try {
                    run_task(task);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < std::min(jobs, n_tasks); ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    // Summary statistics and paired tests in deterministic record order.
    std::array<std::vector<double>, 3> nrmse_by, psnr_by, ssim_by;
    for (const SimulationRecord& rec : result.records) {
        const MethodMetrics* methods[3] = {&rec.noisy, &rec.baseline, &rec.proposed};
        for (int m = 0; m < 3; ++m) {
            nrmse_by[m].push_back(methods[m]->nrmse);
            psnr_by[m].push_back(methods[m]->psnr);
            ssim_by[m].push_back(methods[m]->ssim);
        }
    }
    for (int m = 0; m < 3; ++m) {
        result.summary.stats[m][0] = stats_of(nrmse_by[m]);
        result.summary.stats[m][1] = stats_of(psnr_by[m]);
        result.summary.stats[m][2] = stats_of(ssim_by[m]);
    }
    if (n_tasks >= 2) {
        result.summary.p_nrmse_vs_baseline =
            paired_t_test_one_tailed(nrmse_by[2], nrmse_by[1]).p;
        result.summary.p_nrmse_vs_noisy =
            paired_t_test_one_tailed(nrmse_by[2], nrmse_by[0]).p;
        // Higher-is-better metrics: test baseline - proposed < 0.
        result.summary.p_psnr_vs_baseline =
            paired_t_test_one_tailed(psnr_by[1], psnr_by[2]).p;
        result.summary.p_ssim_vs_baseline =
            paired_t_test_one_tailed(ssim_by[1], ssim_by[2]).p;
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

std::string simulation_records_csv(const SimulationResult& result) {
    std::string out = "image_id,replicate";
    for (int a = 0; a < 5; ++a) out += ",k_true_ew" + std::to_string(a + 1);
    for (int a = 0; a < 5; ++a) out += ",k_hat_ew" + std::to_string(a + 1);
    out += ",method,nrmse,psnr,ssim\n";
    for (const SimulationRecord& rec : result.records) {
        const char* names[3] = {"noisy", "baseline", "proposed"};
        const MethodMetrics* methods[3] = {&rec.noisy, &rec.baseline, &rec.proposed};
        for (int m = 0; m < 3; ++m) {
            out += std::to_string(rec.image_id) + "," + std::to_string(rec.replicate);
            for (int a = 0; a < 5; ++a) {
                out += ',';
                append_double(out, rec.k_true[a]);
            }
            for (int a = 0; a < 5; ++a) {
                out += ',';
                append_double(out, rec.k_hat[a]);
            }
            out += ',';
            out += names[m];
            out += ',';
            append_double(out, methods[m]->nrmse);
            out += ',';
            append_double(out, methods[m]->psnr);
            out += ',';
            append_double(out, methods[m]->ssim);
            out += '\n';
        }
    }
    return out;
}

std::string simulation_summary_json(const SimulationResult& result,
                                    const SimulationSpec& spec) {
    nlohmann::json doc;
    const char* names[3] = {"noisy", "baseline", "proposed"};
    const char* metrics[3] = {"nrmse", "psnr", "ssim"};
    for (int m = 0; m < 3; ++m)
        for (int metric = 0; metric < 3; ++metric)
            doc["methods"][names[m]][metrics[metric]] = {
                {"mean", result.summary.stats[m][metric].mean},
                {"std", result.summary.stats[m][metric].stddev}};
    doc["pValues"] = {{"proposed_vs_baseline",
                       {{"nrmse", result.summary.p_nrmse_vs_baseline},
                        {"psnr", result.summary.p_psnr_vs_baseline},
                        {"ssim", result.summary.p_ssim_vs_baseline}}},
                      {"proposed_vs_noisy", {{"nrmse", result.summary.p_nrmse_vs_noisy}}}};
    doc["replicates"] = spec.replicates;
    doc["seed"] = spec.seed;
    doc["snrTarget"] = spec.snr_target;
    doc["baselineK"] = spec.baseline_k;
    nlohmann::json ranges = nlohmann::json::array();
    for (const auto& [lo, hi] : spec.k_ranges) ranges.push_back({lo, hi});
    doc["kRanges"] = ranges;
    return doc.dump(2) + "\n";
}

} // namespace ewnoise
