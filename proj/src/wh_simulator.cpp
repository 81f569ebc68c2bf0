#include "whsid/wh_simulator.hpp"

#include "whsid/errors.hpp"

#include <cmath>
#include <mutex>
#include <thread>

namespace whsid {

namespace {

void check_finite(std::span<const double> y, const char* what) {
    for (std::size_t i = 0; i < y.size(); ++i)
        if (!std::isfinite(y[i]))
            throw Error(Errc::NonFiniteSample,
                        std::string(what) + " sample " + std::to_string(i) + " is not finite");
}

std::vector<std::vector<double>> split_periods(std::vector<double> y, std::size_t n,
                                               std::size_t periods, std::size_t warmup) {
    std::vector<std::vector<double>> out(periods);
    for (std::size_t p = 0; p < periods; ++p) {
        const auto begin = y.begin() + static_cast<std::ptrdiff_t>((warmup + p) * n);
        out[p].assign(begin, begin + static_cast<std::ptrdiff_t>(n));
    }
    return out;
}

std::vector<std::vector<double>> simulate_impl(const WhSystem& sys, std::span<const double> u0,
                                               std::size_t periods, const ExperimentSeeds& seeds,
                                               std::size_t warmup, bool before) {
    if (periods == 0) throw Error(Errc::TooFewPeriods, "need at least one period");
    const std::size_t n = u0.size();
    const std::size_t total = (periods + warmup) * n;

    const auto u = tile_periods(u0, periods + warmup);
    Rng rng_p(seeds.process);
    Rng rng_m(seeds.measurement);
    const auto ex = filtered_noise(sys.process.shaping, total, sys.process.gain, rng_p);
    const auto ey = filtered_noise(sys.measurement.shaping, total, sys.measurement.gain, rng_m);

    auto y = before ? case1_response(sys.r, sys.s, sys.f, u, ex, ey)
                    : case2_response(sys.r, sys.s, sys.f, u, ex, ey);
    check_finite(y, "output");
    return split_periods(std::move(y), n, periods, warmup);
}

std::vector<std::uint64_t> binomial_row(std::size_t i) {
    std::vector<std::uint64_t> row{1};
    for (std::size_t k = 1; k <= i; ++k) {
        std::vector<std::uint64_t> next(k + 1, 1);
        for (std::size_t j = 1; j < k; ++j) next[j] = row[j - 1] + row[j];
        row = std::move(next);
    }
    return row;
}

} // namespace

std::vector<double> tile_periods(std::span<const double> u0, std::size_t count) {
    std::vector<double> out;
    out.reserve(u0.size() * count);
    for (std::size_t c = 0; c < count; ++c) out.insert(out.end(), u0.begin(), u0.end());
    return out;
}

std::vector<double> filtered_noise(const TransferFunction& shaping, std::size_t count, double gain,
                                   Rng& rng) {
    if (gain == 0.0) return std::vector<double>(count, 0.0);
    std::vector<double> w(count);
    for (auto& v : w) v = rng.gaussian();
    auto shaped = filter_all(shaping, w);
    for (auto& v : shaped) v *= gain;
    return shaped;
}

std::vector<double> case1_response(const TransferFunction& r, const TransferFunction& s,
                                   const StaticNonlinearity& f, std::span<const double> u,
                                   std::span<const double> ex, std::span<const double> ey) {
    if (ex.size() != u.size() || ey.size() != u.size())
        throw Error(Errc::DimensionMismatch, "stream lengths differ");
    auto x = filter_all(r, u);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] = f(x[t] + ex[t]);
    auto y = filter_all(s, x);
    for (std::size_t t = 0; t < y.size(); ++t) y[t] += ey[t];
    return y;
}

std::vector<double> case2_response(const TransferFunction& r, const TransferFunction& s,
                                   const StaticNonlinearity& f, std::span<const double> u,
                                   std::span<const double> ex, std::span<const double> ey) {
    if (ex.size() != u.size() || ey.size() != u.size())
        throw Error(Errc::DimensionMismatch, "stream lengths differ");
    auto x = filter_all(r, u);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] = f(x[t]) + ex[t];
    auto y = filter_all(s, x);
    for (std::size_t t = 0; t < y.size(); ++t) y[t] += ey[t];
    return y;
}

std::vector<std::vector<double>> simulate_case1(const WhSystem& sys, std::span<const double> u0,
                                                std::size_t periods, const ExperimentSeeds& seeds,
                                                std::size_t warmup) {
    if (sys.location != NoiseLocation::Before)
        throw Error(Errc::ValidationError, "simulate_case1 requires process noise before f");
    return simulate_impl(sys, u0, periods, seeds, warmup, true);
}

std::vector<std::vector<double>> simulate_case2(const WhSystem& sys, std::span<const double> u0,
                                                std::size_t periods, const ExperimentSeeds& seeds,
                                                std::size_t warmup) {
    if (sys.location == NoiseLocation::Before)
        throw Error(Errc::ValidationError, "simulate_case2 requires process noise after f (or none)");
    return simulate_impl(sys, u0, periods, seeds, warmup, false);
}

std::vector<std::vector<double>> simulate(const WhSystem& sys, std::span<const double> u0,
                                          std::size_t periods, const ExperimentSeeds& seeds,
                                          std::size_t warmup) {
    return sys.location == NoiseLocation::Before ? simulate_case1(sys, u0, periods, seeds, warmup)
                                                 : simulate_case2(sys, u0, periods, seeds, warmup);
}

std::vector<double> ep_oracle_case1(const TransferFunction& r, const TransferFunction& s,
                                    std::span<const double> poly_coeffs, std::span<const double> u,
                                    std::span<const double> ex) {
    if (poly_coeffs.empty())
        throw Error(Errc::NonPolynomial, "oracle needs polynomial coefficients");
    if (ex.size() != u.size()) throw Error(Errc::DimensionMismatch, "stream lengths differ");
    const std::size_t nf = poly_coeffs.size() - 1;
    const auto x = filter_all(r, u);

    // sum_{i=1..nf} a_i sum_{j<i} C(i,j) x^j ex^(i-j), accumulated before the
    // single linear pass through S
    std::vector<double> acc(u.size(), 0.0);
    std::vector<double> expow(nf + 1);
    for (std::size_t i = 1; i <= nf; ++i) {
        const double ai = poly_coeffs[i];
        if (ai == 0.0) continue;
        const auto binom = binomial_row(i);
        for (std::size_t t = 0; t < u.size(); ++t) {
            expow[0] = 1.0;
            for (std::size_t e = 1; e <= i; ++e) expow[e] = expow[e - 1] * ex[t];
            double xpow = 1.0;
            double term = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                term += static_cast<double>(binom[j]) * xpow * expow[i - j];
                xpow *= x[t];
            }
            acc[t] += ai * term;
        }
    }
    return filter_all(s, acc);
}

double calibrate_noise_gain(const WhSystem& sys, std::span<const double> u0, ReferenceNode node,
                            double snr_db, const TransferFunction& shaping, std::uint64_t seed) {
    if (!std::isfinite(snr_db)) throw Error(Errc::ValidationError, "SNR must be finite");
    const std::size_t n = u0.size();

    // noise-free reference over one steady-state period
    const auto u = tile_periods(u0, 3);
    auto ref = filter_all(sys.r, u);
    if (node != ReferenceNode::X)
        for (auto& v : ref) v = sys.f(v);
    if (node == ReferenceNode::Y0) ref = filter_all(sys.s, ref);
    double mean = 0.0, var_ref = 0.0;
    for (std::size_t t = 2 * n; t < 3 * n; ++t) mean += ref[t];
    mean /= static_cast<double>(n);
    for (std::size_t t = 2 * n; t < 3 * n; ++t) var_ref += (ref[t] - mean) * (ref[t] - mean);
    var_ref /= static_cast<double>(n);
    if (var_ref <= 0.0)
        throw Error(Errc::ZeroReferenceVariance, "reference node carries no signal");

    // unit-gain shaped noise over 10*N steady samples
    Rng rng(seed);
    const auto noise = filtered_noise(shaping, 11 * n, 1.0, rng);
    double nmean = 0.0, var_noise = 0.0;
    for (std::size_t t = n; t < 11 * n; ++t) nmean += noise[t];
    nmean /= static_cast<double>(10 * n);
    for (std::size_t t = n; t < 11 * n; ++t) var_noise += (noise[t] - nmean) * (noise[t] - nmean);
    var_noise /= static_cast<double>(10 * n);

    return std::sqrt(var_ref / (var_noise * std::pow(10.0, snr_db / 10.0)));
}

CalibratedGains calibrate_campaign_gains(const WhSystem& sys, const ExcitationPlan& plan,
                                         std::uint64_t base_seed) {
    const auto design = design_nonstationary_multisine(plan.target, plan.grid, plan.amplitude,
                                                       derive_seed(base_seed, 0, Stream::Calibration),
                                                       plan.max_iter, plan.tol, plan.segments);
    const auto& u0 = design.signal.samples;
    CalibratedGains gains;
    if (sys.location != NoiseLocation::None) {
        const ReferenceNode node =
            sys.location == NoiseLocation::Before ? ReferenceNode::X : ReferenceNode::FofX;
        gains.process = calibrate_noise_gain(sys, u0, node, sys.process.snr_db, sys.process.shaping,
                                             derive_seed(base_seed, 0, Stream::CalibrationNoise));
    }
    gains.measurement =
        calibrate_noise_gain(sys, u0, ReferenceNode::Y0, sys.measurement.snr_db,
                             sys.measurement.shaping,
                             derive_seed(base_seed, 1, Stream::CalibrationNoise));
    return gains;
}

Experiment run_experiment(const WhSystem& sys, const ExcitationPlan& plan, std::size_t periods,
                          std::uint64_t base_seed, std::size_t experiment_index) {
    const std::uint64_t phase_seed = derive_seed(base_seed, experiment_index, Stream::Phases);
    auto design = design_nonstationary_multisine(plan.target, plan.grid, plan.amplitude, phase_seed,
                                                 plan.max_iter, plan.tol, plan.segments);
    Experiment exp;
    exp.phase_seed = phase_seed;
    exp.envelope_error = design.envelope_error;

    const ExperimentSeeds seeds{derive_seed(base_seed, experiment_index, Stream::ProcessNoise),
                                derive_seed(base_seed, experiment_index, Stream::MeasurementNoise)};
    exp.periods = simulate(sys, design.signal.samples, periods, seeds, 1);

    exp.input = std::move(design.signal.samples);
    if (sys.input_noise_gain != 0.0) {
        Rng rng(derive_seed(base_seed, experiment_index, Stream::InputNoise));
        for (auto& v : exp.input) v += sys.input_noise_gain * rng.gaussian();
    }
    return exp;
}

void run_campaign_streaming(const WhSystem& sys, const ExcitationPlan& plan, std::size_t m_count,
                            std::size_t p_count, std::uint64_t base_seed, unsigned threads,
                            const std::function<void(std::size_t, Experiment&&)>& sink) {
    if (m_count < 1) throw Error(Errc::ValidationError, "campaign needs at least one experiment");
    if (p_count < 2) throw Error(Errc::TooFewPeriods, "campaign needs at least two periods");

    WhSystem calibrated = sys;
    const auto gains = calibrate_campaign_gains(sys, plan, base_seed);
    calibrated.process.gain = sys.location == NoiseLocation::None ? 0.0 : gains.process;
    calibrated.measurement.gain = gains.measurement;

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, m_count));

    // experiments are computed in blocks of `threads` and emitted in order,
    // bounding memory to one block regardless of campaign size
    for (std::size_t block = 1; block <= m_count; block += threads) {
        const std::size_t hi = std::min(m_count + 1, block + threads);
        std::vector<Experiment> slot(hi - block);
        if (threads == 1) {
            for (std::size_t m = block; m < hi; ++m)
                slot[m - block] = run_experiment(calibrated, plan, p_count, base_seed, m);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(hi - block);
            std::exception_ptr first_error;
            std::mutex err_mutex;
            for (std::size_t m = block; m < hi; ++m) {
                pool.emplace_back([&, m] {
                    try {
                        slot[m - block] = run_experiment(calibrated, plan, p_count, base_seed, m);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(err_mutex);
                        if (!first_error) first_error = std::current_exception();
                    }
                });
            }
            for (auto& t : pool) t.join();
            if (first_error) std::rethrow_exception(first_error);
        }
        for (std::size_t m = block; m < hi; ++m) sink(m, std::move(slot[m - block]));
    }
}

CampaignRecord run_campaign(const WhSystem& sys, const ExcitationPlan& plan, std::size_t m_count,
                            std::size_t p_count, std::uint64_t base_seed, double sample_rate_hz,
                            unsigned threads) {
    CampaignRecord rec;
    rec.n = plan.target.rms.size();
    rec.experiment_count = m_count;
    rec.period_count = p_count;
    rec.sample_rate_hz = sample_rate_hz;
    rec.base_seed = base_seed;
    rec.envelope = plan.target.rms;
    rec.experiments.reserve(m_count);
    run_campaign_streaming(sys, plan, m_count, p_count, base_seed, threads,
                           [&](std::size_t, Experiment&& e) { rec.experiments.push_back(std::move(e)); });
    return rec;
}

} // namespace whsid
