#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace whsid {

/**
 * Rational discrete-time filter in powers of z^-1:
 *
 *   H(z^-1) = (b0 + b1 z^-1 + ... + b_nb z^-nb) / (a0 + a1 z^-1 + ... + a_na z^-na)
 *
 * Construction validates a0 != 0 and that every pole lies strictly inside
 * the unit circle (magnitude < 1 - 1e-9). Instances are immutable and safe
 * to share across threads; streaming state lives in FilterState.
 */
class TransferFunction {
public:
    TransferFunction(std::vector<double> numerator, std::vector<double> denominator);

    const std::vector<double>& numerator() const noexcept { return num_; }
    const std::vector<double>& denominator() const noexcept { return den_; }

    /// Number of delay registers: max(nb, na).
    std::size_t order() const noexcept { return order_; }

    /// Coefficients normalized so a0 == 1, zero-padded to order()+1 entries.
    const std::vector<double>& normalized_numerator() const noexcept { return bnorm_; }
    const std::vector<double>& normalized_denominator() const noexcept { return anorm_; }

private:
    std::vector<double> num_, den_;
    std::vector<double> bnorm_, anorm_;
    std::size_t order_ = 0;
};

/// Delay line for one streaming filter instance. Single-owner; distinct
/// states may run in parallel against the same TransferFunction.
class FilterState {
public:
    explicit FilterState(const TransferFunction& tf) : regs_(tf.order(), 0.0) {}

    void reset() { std::fill(regs_.begin(), regs_.end(), 0.0); }
    std::size_t size() const noexcept { return regs_.size(); }

    std::vector<double>& registers() noexcept { return regs_; }

private:
    std::vector<double> regs_;
};

TransferFunction make_filter(std::vector<double> numerator, std::vector<double> denominator);

/// Magnitudes of the denominator roots (poles in z). Does not require the
/// coefficients to describe a stable filter.
std::vector<double> pole_magnitudes(const std::vector<double>& denominator);

/// Streaming direct-form-transposed filtering; appends nothing, returns the
/// filtered block and advances `state` so consecutive calls are seamless.
std::vector<double> filter_apply(const TransferFunction& tf, std::span<const double> x,
                                 FilterState& state);

/// One-shot convenience: filter from a fresh zero state.
std::vector<double> filter_all(const TransferFunction& tf, std::span<const double> x);

/// Roots of a real polynomial c0 z^n + c1 z^(n-1) + ... + cn (c0 != 0),
/// computed as companion-matrix eigenvalues (shifted Hessenberg QR).
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs);

} // namespace whsid
