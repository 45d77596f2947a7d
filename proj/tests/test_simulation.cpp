#include <doctest.h>

#include <cmath>

#include "ewnoise/error.hpp"
#include "ewnoise/simulation.hpp"

#include "fixtures.hpp"

using namespace ewnoise;

TEST_SUITE_BEGIN("simulation");

TEST_CASE("zero scale injects nothing") {
    RandomStream stream(201);
    CalibrationSet cal = fixtures::random_cal(stream);
    NoiseField field = build_noise_field(cal);
    SceneRaster clean = make_clean_raster(64, 160, CleanStyle::Textured, stream);
    SceneRaster noisy = inject_noise(clean, field, {0, 0, 0, 0, 0});
    CHECK(noisy.values == clean.values);
}

TEST_CASE("unit scale then unit subtraction recovers a dyadic scene exactly") {
    // Dyadic gains and values make the float add/subtract pair exact.
    CalibrationSet cal =
        fixtures::line_gain_cal(5, 8, Swath::EW1, {0, 4}, {1.25, 2.5}, 1, 2.0);
    NoiseField field = build_noise_field(cal);
    SceneRaster clean(5, 8);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 8; ++j)
            clean.at(i, j) = static_cast<float>(1.0 + 0.25 * ((i * 8 + j) % 9));

    SceneRaster noisy = inject_noise(clean, field, {1, 1, 1, 1, 1});
    DenoiseConfig config;
    config.negative_policy = NegativePolicy::Keep;
    SceneRaster recovered = apply_denoise(noisy, field, {1, 1, 1, 1, 1}, config);
    CHECK(recovered.values == clean.values);
}

TEST_CASE("injection applies one scale per subswath") {
    RandomStream stream(203);
    CalibrationSet cal = fixtures::random_cal(stream);
    NoiseField field = build_noise_field(cal);
    SceneRaster clean = make_clean_raster(64, 160, CleanStyle::FlatOcean, stream);
    const Vec5 k{1.55, 0.833, 1.01, 1.01, 1.01};
    SceneRaster noisy = inject_noise(clean, field, k);
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 160; ++j) {
            int a = field.map.swath_of(i, j);
            if (a < 0) continue;
            double delta = static_cast<double>(noisy.at(i, j)) - clean.at(i, j);
            CHECK(delta ==
                  doctest::Approx(k[a] * field.at(i, j)).epsilon(1e-4));
        }
}

TEST_CASE("snr rescaling scales by the ratio of means") {
    CalibrationSet cal =
        fixtures::line_gain_cal(4, 4, Swath::EW1, {0, 3}, {1.0, 1.0}, 1, 2.0);
    NoiseField field = build_noise_field(cal); // mean 2
    SceneRaster clean(4, 4, 10.0f);            // mean 10

    SceneRaster scaled = rescale_to_snr(clean, field, 1.0);
    for (float v : scaled.values) CHECK(v == doctest::Approx(2.0f)); // scale 0.2

    SceneRaster at5 = rescale_to_snr(clean, field, 5.0);
    double mean = 0.0;
    for (float v : at5.values) mean += v;
    mean /= at5.values.size();
    CHECK(mean / 2.0 == doctest::Approx(5.0).epsilon(1e-12));

    // Matching means and snr 1 leave the raster untouched.
    SceneRaster matched(4, 4, 2.0f);
    SceneRaster same = rescale_to_snr(matched, field, 1.0);
    CHECK(same.values == matched.values);
}

TEST_CASE("zero-mean field is degenerate for snr rescaling") {
    CalibrationSet cal =
        fixtures::line_gain_cal(4, 4, Swath::EW1, {0, 3}, {0.0, 0.0}, 1, 0.0);
    NoiseField field = build_noise_field(cal);
    SceneRaster clean(4, 4, 1.0f);
    CHECK_THROWS_AS(rescale_to_snr(clean, field, 1.0), Error);
}

TEST_CASE("small run: determinism, parallel equivalence, recovery") {
    RandomStream stream(207);
    CalibrationSet cal = fixtures::random_cal(stream);
    NoiseField field = build_noise_field(cal);
    std::vector<SceneRaster> clean_set;
    for (int i = 0; i < 2; ++i)
        clean_set.push_back(
            make_clean_raster(64, 160, CleanStyle::FlatOcean, stream.substream(500 + i)));

    SimulationSpec spec;
    spec.replicates = 3;
    spec.seed = 42;
    ObjectiveParams params;
    params.epsilon = 6;

    SimulationResult first = run_simulation(clean_set, field, cal, spec, params, 1);
    SimulationResult second = run_simulation(clean_set, field, cal, spec, params, 1);
    SimulationResult parallel = run_simulation(clean_set, field, cal, spec, params, 4);
    CHECK(simulation_records_csv(first) == simulation_records_csv(second));
    CHECK(simulation_records_csv(first) == simulation_records_csv(parallel));

    REQUIRE(first.records.size() == 6);
    for (const SimulationRecord& rec : first.records) {
        for (int a = 0; a < 5; ++a) {
            CHECK(rec.k_true[a] >= spec.k_ranges[a].first);
            CHECK(rec.k_true[a] <= spec.k_ranges[a].second);
            CHECK(std::abs(rec.k_hat[a] - rec.k_true[a]) < 0.02);
        }
        CHECK(rec.proposed.nrmse <= rec.noisy.nrmse);
    }

    std::string csv = simulation_records_csv(first);
    CHECK(csv.find("image_id,replicate") == 0);
    std::string summary = simulation_summary_json(first, spec);
    CHECK(summary.find("proposed") != std::string::npos);
    CHECK(summary.find("pValues") != std::string::npos);
}

TEST_CASE("spec validation") {
    RandomStream stream(211);
    CalibrationSet cal = fixtures::random_cal(stream);
    NoiseField field = build_noise_field(cal);
    std::vector<SceneRaster> clean{make_clean_raster(64, 160, CleanStyle::FlatOcean,
                                                     stream)};
    SimulationSpec spec;
    spec.replicates = 0;
    CHECK_THROWS_AS(run_simulation(clean, field, cal, spec, ObjectiveParams{}, 1), Error);
    spec.replicates = 1;
    spec.k_ranges[0] = {1.5, 1.2};
    CHECK_THROWS_AS(run_simulation(clean, field, cal, spec, ObjectiveParams{}, 1), Error);
}

TEST_SUITE_END();
