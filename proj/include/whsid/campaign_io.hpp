#pragma once

#include "whsid/structure_detector.hpp"
#include "whsid/wh_simulator.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace whsid {

/**
 * On-disk campaign layout:
 *
 *   <dir>/campaign.json          manifest (written last, atomically)
 *   <dir>/input_001.csv          "t,u0" per experiment
 *   <dir>/experiment_001.csv     "t,period_1,...,period_P" per experiment
 *
 * A manifest's presence implies the campaign directory is complete.
 */
class CampaignWriter {
public:
    CampaignWriter(std::filesystem::path dir, std::size_t n, std::size_t m, std::size_t p,
                   double sample_rate_hz, std::uint64_t base_seed, std::vector<double> envelope);

    void write_experiment(std::size_t index, const Experiment& exp);

    /// Write the manifest; `extra` is merged into it (e.g. the config used).
    void finalize(const nlohmann::json& extra = nlohmann::json::object());

    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::filesystem::path dir_;
    std::size_t n_, m_, p_;
    double fs_;
    std::uint64_t base_seed_;
    std::vector<double> envelope_;
    nlohmann::json files_ = nlohmann::json::array();
};

void write_campaign(const std::filesystem::path& dir, const CampaignRecord& record,
                    const nlohmann::json& extra = nlohmann::json::object());

/**
 * Assemble a CampaignRecord from a manifest plus per-experiment CSV files.
 * The manifest's `discard_periods` leading periods of every output file are
 * dropped (the transient-suppression protocol for externally measured data);
 * campaigns written by this tool carry discard_periods = 0 because their
 * warmup was already removed during simulation. Dimensions and finiteness
 * are validated. If the manifest lacks an envelope, it is estimated from the
 * input files' average instantaneous RMS.
 */
CampaignRecord ingest_measurements(const std::filesystem::path& manifest_path);

/// Streaming variant: experiments are handed to `sink` one at a time and the
/// returned record contains everything but the per-experiment data.
CampaignRecord ingest_measurements_streaming(
    const std::filesystem::path& manifest_path,
    const std::function<void(std::size_t, Experiment&&)>& sink);

void write_profile_csv(const std::filesystem::path& path, const VarianceProfile& profile);
void write_bins_csv(const std::filesystem::path& path, const BinnedProfile& bins);
void write_report_json(const std::filesystem::path& path, const DetectionReport& report);
nlohmann::json report_to_json(const DetectionReport& report);

/// One period as "t,u0" plus a JSON sidecar describing the design.
void write_design(const std::filesystem::path& out_dir, const DesignOutcome& design);

} // namespace whsid
