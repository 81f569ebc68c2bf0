#pragma once

#include "whsid/excitation_design.hpp"
#include "whsid/lti_filter.hpp"
#include "whsid/rng.hpp"
#include "whsid/static_nonlinearity.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace whsid {

/// Where the process noise e_x enters relative to the static nonlinearity.
enum class NoiseLocation { Before, After, None };

/// Reference node for SNR calibration.
enum class ReferenceNode { X, FofX, Y0 };

struct NoiseModel {
    TransferFunction shaping;  // colored-noise shaping filter
    double snr_db = 0.0;       // target SNR against the reference node
    double gain = 0.0;         // calibrated white-noise gain; 0 disables the source
};

/// The system under test: u -> R -> f -> S -> y, with e_x injected before or
/// after f and e_y added at the output.
struct WhSystem {
    TransferFunction r;
    TransferFunction s;
    StaticNonlinearity f;
    NoiseLocation location = NoiseLocation::None;
    NoiseModel process;
    NoiseModel measurement;
    double input_noise_gain = 0.0;  // white noise on the recorded input only
};

struct ExperimentSeeds {
    std::uint64_t process = 0;
    std::uint64_t measurement = 0;
};

/// One experiment of a campaign: the designed input period and P output
/// periods with the leading warmup periods already discarded.
struct Experiment {
    std::vector<double> input;
    std::vector<std::vector<double>> periods;
    std::uint64_t phase_seed = 0;
    double envelope_error = 0.0;
};

struct CampaignRecord {
    std::size_t n = 0;
    std::size_t experiment_count = 0;  // M
    std::size_t period_count = 0;      // P
    double sample_rate_hz = 0.0;
    std::uint64_t base_seed = 0;
    std::vector<double> envelope;  // designed target RMS, length n
    std::vector<Experiment> experiments;
};

/// Excitation design parameters shared by every experiment of a campaign.
struct ExcitationPlan {
    EnvelopeTarget target;
    std::vector<std::size_t> grid;
    double amplitude = 1.0;
    std::size_t max_iter = 100;
    double tol = 1e-3;
    std::size_t segments = 0;  // 0 = default_segment_count
};

struct CalibratedGains {
    double process = 0.0;
    double measurement = 0.0;
};

/// u0 repeated `count` times.
std::vector<double> tile_periods(std::span<const double> u0, std::size_t count);

/// gain * H(white Gaussian), streamed from a zero filter state.
std::vector<double> filtered_noise(const TransferFunction& shaping, std::size_t count, double gain,
                                   Rng& rng);

/// Zero-state response y = S(f(R u + ex)) + ey over explicit aligned streams.
std::vector<double> case1_response(const TransferFunction& r, const TransferFunction& s,
                                   const StaticNonlinearity& f, std::span<const double> u,
                                   std::span<const double> ex, std::span<const double> ey);

/// Zero-state response y = S(f(R u) + ex) + ey over explicit aligned streams.
std::vector<double> case2_response(const TransferFunction& r, const TransferFunction& s,
                                   const StaticNonlinearity& f, std::span<const double> u,
                                   std::span<const double> ex, std::span<const double> ey);

/// Simulate `periods` periods of the case-I system (process noise before f),
/// discarding `warmup` leading periods. Noise streams are drawn continuously
/// across periods from the given seeds at the calibrated gains.
std::vector<std::vector<double>> simulate_case1(const WhSystem& sys, std::span<const double> u0,
                                                std::size_t periods, const ExperimentSeeds& seeds,
                                                std::size_t warmup = 1);

/// Case-II counterpart (process noise after f); also covers the no-process-
/// noise configuration via a zero process gain.
std::vector<std::vector<double>> simulate_case2(const WhSystem& sys, std::span<const double> u0,
                                                std::size_t periods, const ExperimentSeeds& seeds,
                                                std::size_t warmup = 1);

/// Dispatch on sys.location.
std::vector<std::vector<double>> simulate(const WhSystem& sys, std::span<const double> u0,
                                          std::size_t periods, const ExperimentSeeds& seeds,
                                          std::size_t warmup = 1);

/**
 * Analytic output disturbance for case I with a polynomial nonlinearity and
 * a known process-noise realization:
 *
 *   e_p = S{ sum_{i=1..n} sum_{j=0..i-1} a_i C(i,j) x^j ex^(i-j) },  x = R u.
 *
 * Equals case1_response(u, ex, 0) - case1_response(u, 0, 0) up to rounding.
 */
std::vector<double> ep_oracle_case1(const TransferFunction& r, const TransferFunction& s,
                                    std::span<const double> poly_coeffs, std::span<const double> u,
                                    std::span<const double> ex);

/// White-noise gain that realizes `snr_db` between the reference-node signal
/// (measured from a noise-free steady-state period of u0) and the shaped
/// noise (measured over 10*N unit-gain samples).
double calibrate_noise_gain(const WhSystem& sys, std::span<const double> u0, ReferenceNode node,
                            double snr_db, const TransferFunction& shaping, std::uint64_t seed);

/// Calibrate both noise sources of `sys` against a dedicated calibration
/// multisine (experiment index 0 of the seed schedule). The process-noise
/// reference follows the location convention: x for Before, f(x) for After.
CalibratedGains calibrate_campaign_gains(const WhSystem& sys, const ExcitationPlan& plan,
                                         std::uint64_t base_seed);

/// Design the experiment-m input (phase seed derive(base_seed, m, Phases)),
/// simulate P+1 periods and discard the first.
Experiment run_experiment(const WhSystem& sys, const ExcitationPlan& plan, std::size_t periods,
                          std::uint64_t base_seed, std::size_t experiment_index);

/// Run all experiments, emitting them in ascending index order. Experiments
/// are independent and may be computed on `threads` workers; the emission
/// order (and every sample) is identical regardless of thread count.
void run_campaign_streaming(const WhSystem& sys, const ExcitationPlan& plan, std::size_t m_count,
                            std::size_t p_count, std::uint64_t base_seed, unsigned threads,
                            const std::function<void(std::size_t, Experiment&&)>& sink);

CampaignRecord run_campaign(const WhSystem& sys, const ExcitationPlan& plan, std::size_t m_count,
                            std::size_t p_count, std::uint64_t base_seed, double sample_rate_hz,
                            unsigned threads = 1);

} // namespace whsid
