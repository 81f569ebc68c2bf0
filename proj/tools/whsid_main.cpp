#include "whsid/campaign_io.hpp"
#include "whsid/config.hpp"
#include "whsid/errors.hpp"
#include "whsid/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

namespace {

namespace fs = std::filesystem;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_out) {
    cmd->add_option("--config", opts.config_path, "JSON configuration file (defaults when omitted)")
        ->check(CLI::ExistingFile);
    auto* out = cmd->add_option("--out", opts.out_dir,
                                "output directory (default: $WHSID_OUT or ./whsid-out)");
    if (needs_out) out->required(false);
    cmd->add_option("--seed", opts.seed, "override campaign.base_seed");
    cmd->add_option("--threads", opts.threads, "worker threads, 0 = all cores")->default_val(1u);
}

fs::path resolve_out(const CommonOpts& opts) {
    if (!opts.out_dir.empty()) return opts.out_dir;
    if (const char* env = std::getenv("WHSID_OUT"); env && *env) return env;
    return "whsid-out";
}

whsid::CampaignConfig resolve_config(const CommonOpts& opts) {
    auto cfg = opts.config_path.empty() ? whsid::default_config()
                                        : whsid::load_config(opts.config_path);
    if (opts.seed) cfg.campaign.base_seed = *opts.seed;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wiener-Hammerstein process-noise structure detection"};
    app.require_subcommand(1);

    CommonOpts design_opts, sim_opts, run_opts, detect_opts, ingest_opts, cal_opts;
    std::string campaign_path, manifest_path;

    auto* design = app.add_subcommand(
        "design-input", "design one period of the nonstationary multisine excitation");
    add_common(design, design_opts, true);

    auto* simulate = app.add_subcommand("simulate", "simulate a campaign and write it as CSV");
    add_common(simulate, sim_opts, true);

    auto* detect = app.add_subcommand(
        "detect", "estimate the variance profile of a stored campaign and decide the structure");
    detect->add_option("--campaign", campaign_path,
                       "campaign directory or manifest (simulated or ingested)")
        ->required();
    add_common(detect, detect_opts, true);

    auto* ingest = app.add_subcommand(
        "ingest", "normalize externally measured CSV data into a campaign directory");
    ingest->add_option("--manifest", manifest_path, "measurement manifest JSON")->required();
    add_common(ingest, ingest_opts, true);

    auto* run = app.add_subcommand("run", "design, simulate, detect, and classify in one pass");
    add_common(run, run_opts, true);

    auto* calibrate =
        app.add_subcommand("calibrate", "report the calibrated noise gains for a configuration");
    add_common(calibrate, cal_opts, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (design->parsed()) {
            const auto cfg = resolve_config(design_opts);
            const auto& e = cfg.excitation;
            const auto outcome = whsid::design_nonstationary_multisine(
                e.envelope, e.grid, e.amplitude,
                whsid::derive_seed(cfg.campaign.base_seed, 1, whsid::Stream::Phases), e.max_iter,
                e.tol, e.segments);
            const auto out = resolve_out(design_opts);
            whsid::write_design(out, outcome);
            std::printf("designed %zu-sample period: envelope error %.4g after %zu iterations%s\n",
                        outcome.signal.n, outcome.envelope_error, outcome.iterations,
                        outcome.converged ? "" : " (iteration budget reached)");
            std::printf("wrote %s and %s\n", (out / "u0.csv").string().c_str(),
                        (out / "design.json").string().c_str());
        } else if (simulate->parsed()) {
            const auto cfg = resolve_config(sim_opts);
            const auto out = resolve_out(sim_opts);
            whsid::simulate_to_dir(cfg, out, sim_opts.threads);
            std::printf("campaign written to %s (M=%zu, P=%zu, N=%zu)\n", out.string().c_str(),
                        cfg.campaign.experiments, cfg.campaign.periods, cfg.excitation.n);
        } else if (detect->parsed()) {
            const auto cfg = resolve_config(detect_opts);
            const auto out = resolve_out(detect_opts);
            const auto report = whsid::detect_campaign(campaign_path, cfg.detector, out);
            std::fputs(whsid::summarize(report).c_str(), stdout);
            std::printf("report written to %s\n", (out / "report.json").string().c_str());
        } else if (ingest->parsed()) {
            const auto out = resolve_out(ingest_opts);
            const auto record = whsid::ingest_measurements(manifest_path);
            whsid::write_campaign(out, record);
            std::printf("ingested %zu experiments x %zu periods x %zu samples into %s\n",
                        record.experiment_count, record.period_count, record.n,
                        out.string().c_str());
        } else if (run->parsed()) {
            const auto cfg = resolve_config(run_opts);
            const auto out = resolve_out(run_opts);
            const auto report = whsid::run_pipeline(cfg, out, run_opts.threads);
            std::fputs(whsid::summarize(report).c_str(), stdout);
            std::printf("artifacts written to %s\n", out.string().c_str());
        } else if (calibrate->parsed()) {
            const auto cfg = resolve_config(cal_opts);
            const auto gains = whsid::calibrate_campaign_gains(cfg.system, cfg.excitation.plan(),
                                                               cfg.campaign.base_seed);
            nlohmann::json j{{"process_gain", gains.process},
                             {"measurement_gain", gains.measurement},
                             {"process_snr_db", cfg.system.process.snr_db},
                             {"measurement_snr_db", cfg.system.measurement.snr_db}};
            std::cout << j.dump(2) << '\n';
        }
    } catch (const whsid::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
