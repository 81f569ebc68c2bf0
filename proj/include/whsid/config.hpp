#pragma once

#include "whsid/structure_detector.hpp"
#include "whsid/wh_simulator.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace whsid {

struct ExcitationConfig {
    std::size_t n = 16384;
    double amplitude = 1.0;
    std::vector<std::size_t> grid;  // excited bins
    EnvelopeTarget envelope;
    std::size_t segments = 0;
    std::size_t max_iter = 100;
    double tol = 1e-3;

    ExcitationPlan plan() const {
        return ExcitationPlan{envelope, grid, amplitude, max_iter, tol, segments};
    }
};

struct CampaignParams {
    std::size_t experiments = 100;  // M
    std::size_t periods = 100;      // P
    std::uint64_t base_seed = 1;
    double sample_rate_hz = 78125.0;
};

struct DetectorConfig {
    std::size_t bins = 32;
    DetectorThresholds thresholds{};
};

/// Fully validated tool configuration with defaults filled in.
struct CampaignConfig {
    WhSystem system;
    ExcitationConfig excitation;
    CampaignParams campaign;
    DetectorConfig detector;
};

/// The stock simulated setup: resonant 2nd-order R and S, degree-3
/// polynomial nonlinearity, colored process/measurement noise, process noise
/// entering before the nonlinearity at 26 dB with 20 dB measurement noise.
CampaignConfig default_config();

CampaignConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const CampaignConfig& cfg);

/// Parse + validate a JSON config file; missing fields take defaults.
CampaignConfig load_config(const std::filesystem::path& path);

} // namespace whsid
