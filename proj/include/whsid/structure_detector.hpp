#pragma once

#include "whsid/wh_simulator.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace whsid {

/// Time-resolved variance of the output disturbance: per-experiment sample
/// variance across periods (divisor P-1), averaged over experiments.
struct VarianceProfile {
    std::vector<double> sigma2;                        // length N
    std::vector<std::vector<double>> per_experiment;   // M x N
    std::size_t dof_per_sample = 0;                    // M * (P - 1)
};

struct BinnedProfile {
    std::vector<double> sigma2_mean;       // per-bin mean of sigma2_e
    std::vector<double> envelope_sq_mean;  // per-bin mean of envelope^2
    std::vector<std::size_t> bin_start;    // first sample index of each bin
};

enum class Verdict { ProcessNoiseBeforeNL, ProcessNoiseAfterNLorAbsent };

enum class Signature { SaturationLike, DeadZoneLike, SmoothLike, NotApplicable };

const char* verdict_name(Verdict v);
const char* signature_name(Signature s);

struct DetectorThresholds {
    // location decision
    double rho_min = 0.5;    // |Pearson(sigma2 bins, envelope^2 bins)|
    double ratio_min = 2.0;  // max/min bin mean of sigma2
    // signature classification
    double plateau_frac = 0.15;  // fraction of bins counted as envelope edge
    double floor_tol = 1.25;     // edge bins within this factor of the floor
    double peak_dip = 0.9;       // saturation: peak-bin mean vs rest
    double dz_conc_max = 1.8;    // dead-zone: max rise concentration at peak
};

struct LocationDecision {
    Verdict verdict = Verdict::ProcessNoiseAfterNLorAbsent;
    double rho = 0.0;          // signed correlation (|rho| drives the verdict)
    double ratio = 1.0;        // max/min bin mean
    bool rho_degenerate = false;
};

struct SignatureScores {
    double peak_ratio = 0.0;          // mean over peak bins / mean over rest
    double edge_floor_ratio = 0.0;    // mean over edge bins / floor
    double rise_concentration = 0.0;  // normalized rise at peak bins vs average
    bool argmax_in_peak_bins = false;
};

struct DetectionReport {
    Verdict verdict;
    LocationDecision location;
    Signature signature;
    SignatureScores signature_scores;
    DetectorThresholds thresholds;
    BinnedProfile bins;
    std::size_t dof_per_sample = 0;
};

VarianceProfile variance_profile(const CampaignRecord& record);

/// Per-experiment variance profiles may be accumulated one experiment at a
/// time so campaigns never need to be fully resident.
class VarianceAccumulator {
public:
    explicit VarianceAccumulator(std::size_t n) : sum_(n, 0.0), n_(n) {}

    void add_experiment(const std::vector<std::vector<double>>& periods);
    VarianceProfile finish() const;
    std::size_t experiments() const noexcept { return m_; }

private:
    std::vector<double> sum_;
    std::vector<std::vector<double>> per_experiment_;
    std::size_t n_;
    std::size_t m_ = 0;
    std::size_t p_ = 0;
};

BinnedProfile bin_profile(const VarianceProfile& profile, std::span<const double> envelope,
                          std::size_t bins);

LocationDecision decide_location(const BinnedProfile& bins, const DetectorThresholds& thresholds);

/// Shape classification of the variance profile, meaningful only when the
/// process noise precedes the nonlinearity (returns NotApplicable otherwise):
///  - saturation suppresses noise transmission at maximal drive, so the
///    variance dips over the envelope-peak bins;
///  - a dead zone passes nothing at small drive, so the variance hugs the
///    measurement floor at the period edges and its rise is spread over a
///    broad mid-envelope hump;
///  - a smooth polynomial's transmission grows with even powers of the
///    envelope, so the rise concentrates sharply at the envelope peak.
Signature classify_signature(const BinnedProfile& bins, Verdict verdict,
                             const DetectorThresholds& thresholds,
                             SignatureScores* scores = nullptr);

DetectionReport detect(const VarianceProfile& profile, std::span<const double> envelope,
                       std::size_t bins, const DetectorThresholds& thresholds);

} // namespace whsid
