#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace whsid {

/// Per-sample target for the instantaneous RMS of one excitation period.
struct EnvelopeTarget {
    std::vector<double> rms;  // length N, all >= 0, not identically zero
    std::string shape;        // free-form description ("trapezoid", "flat", ...)
};

/**
 * One period of a random-phase multisine:
 *   u0(t) = (1/sqrt(N)) * sum_{k in +-grid} A0 e^{j(2 pi k t / N + phi_k)}
 * with phi_{-k} = -phi_k so the signal is real, and |U(k)| = A0 exactly on
 * the excited grid, 0 elsewhere (DC and Nyquist are never excited).
 */
struct MultisineSignal {
    std::vector<double> samples;     // one period, length N
    std::size_t n = 0;               // period length
    std::vector<std::size_t> grid;   // excited bins, subset of 1..N/2-1
    double amplitude = 0.0;          // uniform spectral amplitude A0
    std::vector<double> phases;      // phase per grid bin, final iterate
    std::uint64_t seed = 0;
};

/// Result of the iterative envelope-shaping design.
struct DesignOutcome {
    MultisineSignal signal;            // best iterate
    std::vector<double> error_trace;   // relative L2 envelope error per iterate
    double envelope_error = 0.0;       // error of the best iterate
    std::size_t iterations = 0;        // iterates evaluated (incl. the initial one)
    bool converged = false;            // stopped on the improvement criterion
};

/// Symmetric triangular RMS profile with slopes +-2*peak_rms/N, peaking at
/// mid-period. With peak_rms = sqrt(3) * mean-RMS the profile carries unit
/// normalized power and the slopes become +-2*sqrt(3)/N.
EnvelopeTarget default_trapezoid_envelope(std::size_t n, double peak_rms);

/// Constant profile (a stationary target).
EnvelopeTarget flat_envelope(std::size_t n, double rms);

/// Peak RMS that makes the triangular target's power equal the multisine's
/// fixed spectral power for a given grid size: sqrt(3) * A0 * sqrt(2*G/N).
double matched_trapezoid_peak(std::size_t n, std::size_t grid_size, double amplitude);

/// All bins 1..N/2-1.
std::vector<std::size_t> full_grid(std::size_t n);

MultisineSignal random_phase_multisine(std::size_t n, std::vector<std::size_t> grid,
                                       double amplitude, std::uint64_t seed);

/// Segment-RMS envelope, linearly interpolated between segment midpoints and
/// floored at 1e-12 of its maximum so it is strictly positive.
std::vector<double> instantaneous_rms(std::span<const double> u, std::size_t segments);

/// Segment count used by the designer when the caller passes 0: N/256,
/// clamped to at least 16 and at most N/4.
std::size_t default_segment_count(std::size_t n);

/**
 * Iterative design of a periodic, intra-period-nonstationary multisine.
 * Each pass rescales the current period by target/measured instantaneous
 * RMS, then re-imposes the uniform amplitude on the excited grid (keeping
 * phases) and re-synthesizes. Keeps the best iterate; stopping early on a
 * plateau is reported via `converged`, never as an error.
 */
DesignOutcome design_nonstationary_multisine(const EnvelopeTarget& target,
                                             std::vector<std::size_t> grid, double amplitude,
                                             std::uint64_t seed, std::size_t max_iter = 100,
                                             double tol = 1e-3, std::size_t segments = 0);

} // namespace whsid
