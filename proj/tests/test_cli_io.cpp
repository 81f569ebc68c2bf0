#include "whsid/campaign_io.hpp"
#include "whsid/config.hpp"
#include "whsid/errors.hpp"
#include "whsid/pipeline.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace whsid;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* name) {
    const auto dir = fs::temp_directory_path() / "whsid_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

CampaignConfig desk_config(std::size_t n, std::size_t m, std::size_t p) {
    auto cfg = default_config();
    cfg.excitation.n = n;
    cfg.excitation.grid = full_grid(n);
    cfg.excitation.envelope = default_trapezoid_envelope(
        n, matched_trapezoid_peak(n, cfg.excitation.grid.size(), cfg.excitation.amplitude));
    cfg.campaign.experiments = m;
    cfg.campaign.periods = p;
    cfg.detector.bins = 4;
    return cfg;
}

} // namespace

TEST_CASE("default config carries the stock setup") {
    const auto cfg = default_config();
    CHECK(cfg.excitation.n == 16384);
    CHECK(cfg.campaign.experiments == 100);
    CHECK(cfg.campaign.periods == 100);
    CHECK(cfg.campaign.sample_rate_hz == 78125.0);
    CHECK(cfg.system.r.numerator() == std::vector<double>{0.1, 0.2, -0.3});
    CHECK(cfg.system.r.denominator() == std::vector<double>{0.95, -1.4, 0.9});
    CHECK(cfg.system.s.numerator() == std::vector<double>{0.0, 1.0, 0.5});
    CHECK(cfg.system.process.snr_db == 26.0);
    CHECK(cfg.system.measurement.snr_db == 20.0);
    CHECK(cfg.system.location == NoiseLocation::Before);
    CHECK(*polynomial_coefficients(cfg.system.f) ==
          std::vector<double>{0.0, 0.01, 0.02, -0.008});
    CHECK(cfg.excitation.grid.size() == 16384 / 2 - 1);
}

TEST_CASE("minimal configs inherit defaults; locations flip the stock SNRs") {
    const auto cfg = config_from_json(nlohmann::json::parse(R"({
        "system": {"noise": {"location": "after"}}
    })"));
    CHECK(cfg.system.location == NoiseLocation::After);
    CHECK(cfg.system.process.snr_db == 20.0);
    CHECK(cfg.system.measurement.snr_db == 26.0);
    CHECK(cfg.excitation.n == 16384);
}

TEST_CASE("config validation names the offending field") {
    SUBCASE("empty grid") {
        CHECK_THROWS_WITH_AS(
            config_from_json(nlohmann::json::parse(R"({"excitation": {"grid": []}})")),
            doctest::Contains("excitation.grid"), Error);
    }
    SUBCASE("unstable filter names the block") {
        CHECK_THROWS_WITH_AS(
            config_from_json(nlohmann::json::parse(
                R"({"system": {"R": {"num": [1.0], "den": [1.0, -2.0]}}})")),
            doctest::Contains("system.R"), Error);
    }
    SUBCASE("bad nonlinearity type") {
        CHECK_THROWS_WITH_AS(
            config_from_json(nlohmann::json::parse(
                R"({"system": {"nonlinearity": {"type": "cubic-spline"}}})")),
            doctest::Contains("system.nonlinearity"), Error);
    }
    SUBCASE("periods below the estimator minimum") {
        CHECK_THROWS_WITH_AS(
            config_from_json(nlohmann::json::parse(R"({"campaign": {"periods": 1}})")),
            doctest::Contains("campaign.periods"), Error);
    }
    SUBCASE("n must be a power of two") {
        CHECK_THROWS_WITH_AS(
            config_from_json(nlohmann::json::parse(R"({"excitation": {"n": 6000}})")),
            doctest::Contains("excitation.n"), Error);
    }
}

TEST_CASE("config json round-trip preserves the setup") {
    auto cfg = desk_config(256, 3, 4);
    cfg.system.location = NoiseLocation::After;
    cfg.system.process.snr_db = 18.0;
    cfg.detector.thresholds.ratio_min = 2.5;
    const auto j = config_to_json(cfg);
    const auto back = config_from_json(j);
    CHECK(back.excitation.n == cfg.excitation.n);
    CHECK(back.campaign.experiments == cfg.campaign.experiments);
    CHECK(back.system.location == NoiseLocation::After);
    CHECK(back.system.process.snr_db == 18.0);
    CHECK(back.detector.thresholds.ratio_min == 2.5);
    CHECK(back.excitation.envelope.rms == cfg.excitation.envelope.rms);
}

TEST_CASE("campaign round-trip: write then ingest is the identity") {
    const auto dir = temp_dir("roundtrip");
    auto cfg = desk_config(64, 2, 3);
    const auto rec = run_campaign(cfg.system, cfg.excitation.plan(), 2, 3, 5, 78125.0);
    write_campaign(dir, rec);

    const auto back = ingest_measurements(dir);
    CHECK(back.n == rec.n);
    CHECK(back.experiment_count == rec.experiment_count);
    CHECK(back.period_count == rec.period_count);
    CHECK(back.envelope == rec.envelope);
    REQUIRE(back.experiments.size() == rec.experiments.size());
    for (std::size_t m = 0; m < rec.experiments.size(); ++m) {
        CHECK(back.experiments[m].input == rec.experiments[m].input);
        CHECK(back.experiments[m].periods == rec.experiments[m].periods);
    }
}

TEST_CASE("ingest applies the declared discard and validates the data") {
    const auto dir = temp_dir("ingest");

    // hand-written external measurement set: 2 experiments, 4 raw periods
    const std::size_t n = 64;
    for (int m = 1; m <= 2; ++m) {
        std::ofstream out(dir / ("meas_" + std::to_string(m) + ".csv"));
        out << "t,period_1,period_2,period_3,period_4\n";
        for (std::size_t t = 0; t < n; ++t) {
            out << t;
            for (int p = 1; p <= 4; ++p) out << ',' << (0.001 * t + m + 10 * p);
            out << '\n';
        }
    }
    nlohmann::json manifest{
        {"n", n},
        {"experiments", 2},
        {"periods", 4},
        {"discard_periods", 1},
        {"envelope", std::vector<double>(n, 1.0)},
        {"files", nlohmann::json::array({{{"output", "meas_1.csv"}}, {{"output", "meas_2.csv"}}})}};
    {
        std::ofstream out(dir / "manifest.json");
        out << manifest.dump(2);
    }

    const auto rec = ingest_measurements(dir / "manifest.json");
    CHECK(rec.period_count == 3);
    CHECK(rec.experiments[0].periods.size() == 3);
    // the first raw period (offset 10) was discarded
    CHECK(rec.experiments[0].periods[0][0] == doctest::Approx(1.0 + 20.0));

    SUBCASE("NaN cells are diagnosed with their location") {
        {
            std::ofstream out(dir / "meas_2.csv");
            out << "t,period_1,period_2,period_3,period_4\n";
            for (std::size_t t = 0; t < n; ++t)
                out << t << ",1,2," << (t == 10 ? "nan" : "3") << ",4\n";
        }
        CHECK_THROWS_WITH_AS(ingest_measurements(dir / "manifest.json"),
                             doctest::Contains("meas_2.csv"), Error);
    }
    SUBCASE("discarding everything is rejected") {
        manifest["discard_periods"] = 4;
        std::ofstream out(dir / "manifest.json");
        out << manifest.dump(2);
        out.close();
        CHECK_THROWS_AS(ingest_measurements(dir / "manifest.json"), Error);
    }
}

TEST_CASE("one-period-after-discard records are rejected by the estimator") {
    const auto dir = temp_dir("oneperiod");
    auto cfg = desk_config(64, 2, 2);
    const auto rec = run_campaign(cfg.system, cfg.excitation.plan(), 2, 2, 5, 78125.0);
    write_campaign(dir, rec);

    auto manifest = nlohmann::json::parse(std::ifstream(dir / "campaign.json"));
    manifest["discard_periods"] = 1;
    {
        std::ofstream out(dir / "campaign.json");
        out << manifest.dump(2);
    }
    const auto back = ingest_measurements(dir);
    CHECK(back.period_count == 1);
    CHECK_THROWS_AS(variance_profile(back), Error);
}

TEST_CASE("pipeline writes a complete artifact set and is byte-reproducible") {
    const auto out1 = temp_dir("pipeline1");
    const auto out2 = temp_dir("pipeline2");
    auto cfg = desk_config(64, 2, 4);

    const auto r1 = run_pipeline(cfg, out1, 1);
    const auto r2 = run_pipeline(cfg, out2, 2);

    for (const char* f : {"campaign/campaign.json", "profile.csv", "bins.csv", "report.json",
                          "summary.txt"})
        CHECK(fs::exists(out1 / f));

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    CHECK(slurp(out1 / "report.json") == slurp(out2 / "report.json"));
    CHECK(slurp(out1 / "profile.csv") == slurp(out2 / "profile.csv"));
    CHECK(verdict_name(r1.verdict) == verdict_name(r2.verdict));

    SUBCASE("detect on the stored campaign reproduces the pipeline report") {
        const auto out3 = temp_dir("pipeline3");
        const auto r3 = detect_campaign(out1 / "campaign", cfg.detector, out3);
        CHECK(slurp(out3 / "report.json") == slurp(out1 / "report.json"));
        (void)r3;
    }
}
