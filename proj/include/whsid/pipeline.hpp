#pragma once

#include "whsid/campaign_io.hpp"
#include "whsid/config.hpp"

#include <filesystem>

namespace whsid {

/**
 * Full pipeline: design inputs, simulate the campaign, estimate the variance
 * profile, decide the noise location, and classify the nonlinearity
 * signature. Writes the campaign directory plus profile.csv, bins.csv,
 * report.json, and summary.txt under `out_dir`. The verdict never affects
 * the exit path; only tool failures throw.
 */
DetectionReport run_pipeline(const CampaignConfig& cfg, const std::filesystem::path& out_dir,
                             unsigned threads = 1);

/// Simulate and persist a campaign without analysing it.
void simulate_to_dir(const CampaignConfig& cfg, const std::filesystem::path& out_dir,
                     unsigned threads = 1);

/// Analyse an existing campaign directory (simulated or ingested): streams
/// experiments from disk, writes profile.csv / bins.csv / report.json into
/// `out_dir`, and returns the report.
DetectionReport detect_campaign(const std::filesystem::path& campaign, const DetectorConfig& det,
                                const std::filesystem::path& out_dir);

/// Human-readable one-page summary of a detection run.
std::string summarize(const DetectionReport& report);

} // namespace whsid
