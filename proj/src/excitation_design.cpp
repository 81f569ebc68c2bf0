#include "whsid/excitation_design.hpp"

#include "whsid/errors.hpp"
#include "whsid/fft.hpp"
#include "whsid/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace whsid {

namespace {

void validate_grid(std::size_t n, const std::vector<std::size_t>& grid) {
    if (!is_power_of_two(n) || n < 4)
        throw Error(Errc::BadLength, "period length must be a power of two >= 4, got " +
                                         std::to_string(n));
    if (grid.empty()) throw Error(Errc::EmptyGrid, "excited grid is empty");
    for (std::size_t k : grid)
        if (k < 1 || k > n / 2 - 1)
            throw Error(Errc::GridOutOfRange,
                        "bin " + std::to_string(k) + " outside 1.." + std::to_string(n / 2 - 1));
}

/// Synthesize one real period from grid phases under the 1/sqrt(N) convention.
std::vector<double> synthesize(std::size_t n, const std::vector<std::size_t>& grid,
                               double amplitude, const std::vector<double>& phases) {
    std::vector<std::complex<double>> spec(n, 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::size_t k = grid[i];
        const std::complex<double> v = std::polar(amplitude, phases[i]);
        spec[k] = v;
        spec[n - k] = std::conj(v);
    }
    return idft_unitary_real(std::move(spec));
}

double relative_l2_error(const std::vector<double>& measured, const std::vector<double>& target) {
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < target.size(); ++t) {
        const double d = measured[t] - target[t];
        num += d * d;
        den += target[t] * target[t];
    }
    return std::sqrt(num / den);
}

} // namespace

EnvelopeTarget default_trapezoid_envelope(std::size_t n, double peak_rms) {
    if (n < 4 || n % 2 != 0)
        throw Error(Errc::BadLength, "envelope length must be even and >= 4, got " +
                                         std::to_string(n));
    if (!(peak_rms > 0.0)) throw Error(Errc::BadLength, "peak RMS must be positive");
    EnvelopeTarget env;
    env.shape = "trapezoid";
    env.rms.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i + 1);  // profile over t = 1..N
        const double rise = std::min(t, static_cast<double>(n) + 1.0 - t);
        env.rms[i] = peak_rms * 2.0 * rise / static_cast<double>(n);
    }
    return env;
}

EnvelopeTarget flat_envelope(std::size_t n, double rms) {
    if (n < 4) throw Error(Errc::BadLength, "envelope length must be >= 4");
    if (!(rms > 0.0)) throw Error(Errc::BadLength, "RMS must be positive");
    return EnvelopeTarget{std::vector<double>(n, rms), "flat"};
}

double matched_trapezoid_peak(std::size_t n, std::size_t grid_size, double amplitude) {
    return std::sqrt(3.0) * amplitude *
           std::sqrt(2.0 * static_cast<double>(grid_size) / static_cast<double>(n));
}

std::vector<std::size_t> full_grid(std::size_t n) {
    std::vector<std::size_t> g(n / 2 - 1);
    std::iota(g.begin(), g.end(), std::size_t{1});
    return g;
}

MultisineSignal random_phase_multisine(std::size_t n, std::vector<std::size_t> grid,
                                       double amplitude, std::uint64_t seed) {
    validate_grid(n, grid);
    if (!(amplitude > 0.0)) throw Error(Errc::BadLength, "amplitude must be positive");
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    Rng rng(seed);
    MultisineSignal ms;
    ms.n = n;
    ms.amplitude = amplitude;
    ms.seed = seed;
    ms.phases.resize(grid.size());
    for (auto& p : ms.phases) p = rng.uniform_angle();
    ms.grid = std::move(grid);
    ms.samples = synthesize(n, ms.grid, amplitude, ms.phases);
    return ms;
}

std::vector<double> instantaneous_rms(std::span<const double> u, std::size_t segments) {
    const std::size_t n = u.size();
    if (segments < 2) throw Error(Errc::TooFewSegments, "need at least 2 segments");
    if (segments > n) throw Error(Errc::TooFewSegments, "more segments than samples");

    const std::size_t len = (n + segments - 1) / segments;
    std::vector<double> mids, vals;
    mids.reserve(segments);
    vals.reserve(segments);
    for (std::size_t s = 0; s < segments; ++s) {
        const std::size_t st = s * len;
        if (st >= n) break;
        const std::size_t en = std::min(n, st + len);
        double acc = 0.0;
        for (std::size_t t = st; t < en; ++t) acc += u[t] * u[t];
        mids.push_back(0.5 * static_cast<double>(st + en - 1));
        vals.push_back(std::sqrt(acc / static_cast<double>(en - st)));
    }

    std::vector<double> env(n);
    std::size_t seg = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double td = static_cast<double>(t);
        if (td <= mids.front()) {
            env[t] = vals.front();
        } else if (td >= mids.back()) {
            env[t] = vals.back();
        } else {
            while (mids[seg + 1] < td) ++seg;
            const double w = (td - mids[seg]) / (mids[seg + 1] - mids[seg]);
            env[t] = (1.0 - w) * vals[seg] + w * vals[seg + 1];
        }
    }
    const double peak = *std::max_element(env.begin(), env.end());
    const double floor = std::max(1e-12 * peak, 1e-300);
    for (auto& v : env) v = std::max(v, floor);
    return env;
}

std::size_t default_segment_count(std::size_t n) {
    return std::clamp<std::size_t>(n / 256, 16, std::max<std::size_t>(n / 4, 2));
}

DesignOutcome design_nonstationary_multisine(const EnvelopeTarget& target,
                                             std::vector<std::size_t> grid, double amplitude,
                                             std::uint64_t seed, std::size_t max_iter, double tol,
                                             std::size_t segments) {
    const std::size_t n = target.rms.size();
    if (!(tol > 0.0)) throw Error(Errc::BadLength, "tolerance must be positive");
    bool any_positive = false;
    for (double v : target.rms) {
        if (v < 0.0) throw Error(Errc::BadLength, "target RMS must be nonnegative");
        if (v > 0.0) any_positive = true;
    }
    if (!any_positive) throw Error(Errc::BadLength, "target RMS is identically zero");
    if (segments == 0) segments = default_segment_count(n);

    DesignOutcome out;
    out.signal = random_phase_multisine(n, std::move(grid), amplitude, seed);
    std::vector<double> u = out.signal.samples;
    std::vector<double> phases = out.signal.phases;

    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it <= max_iter; ++it) {
        const auto rms_i = instantaneous_rms(u, segments);
        const double err = relative_l2_error(rms_i, target.rms);
        out.error_trace.push_back(err);
        ++out.iterations;

        double improvement = 0.0;
        if (err < best_err) {
            improvement = std::isfinite(best_err) ? (best_err - err) / best_err : 1.0;
            best_err = err;
            out.signal.samples = u;
            out.signal.phases = phases;
        }
        // done when the target is already met, or the error stops improving
        if (err < tol || (it > 0 && improvement < tol)) {
            out.converged = true;
            break;
        }
        if (it == max_iter) break;

        // step 1: pull the period toward the target envelope
        std::vector<double> scaled(n);
        for (std::size_t t = 0; t < n; ++t)
            scaled[t] = target.rms[t] == 0.0 ? 0.0 : u[t] * (target.rms[t] / rms_i[t]);

        // step 2: re-impose the uniform amplitude on the grid, keep phases
        auto spec = dft_unitary(scaled);
        for (std::size_t i = 0; i < out.signal.grid.size(); ++i)
            phases[i] = std::arg(spec[out.signal.grid[i]]);

        // step 3: back to the time domain
        u = synthesize(n, out.signal.grid, amplitude, phases);
    }
    out.envelope_error = best_err;
    return out;
}

} // namespace whsid
