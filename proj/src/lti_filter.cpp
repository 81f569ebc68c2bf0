#include "whsid/lti_filter.hpp"

#include "whsid/errors.hpp"

#include <algorithm>
#include <cmath>

namespace whsid {

namespace {

constexpr double kStabilityMargin = 1e-9;

using Cplx = std::complex<double>;

// Complex Hessenberg matrix in row-major storage; the companion matrix of a
// monic polynomial is already upper Hessenberg, so a shifted QR iteration
// with Givens rotations converges without a reduction step.
class HessenbergQr {
public:
    explicit HessenbergQr(std::vector<Cplx> h, std::size_t n) : h_(std::move(h)), n_(n) {}

    std::vector<Cplx> eigenvalues() {
        std::vector<Cplx> eig(n_);
        std::size_t hi = n_;
        int stall = 0;
        while (hi > 0) {
            if (hi == 1) {
                eig[0] = at(0, 0);
                break;
            }
            const std::size_t lo = deflation_point(hi);
            if (lo == hi - 1) {
                eig[hi - 1] = at(hi - 1, hi - 1);
                --hi;
                stall = 0;
                continue;
            }
            Cplx shift = wilkinson_shift(hi);
            if (++stall % 24 == 0) // rare cycling escape
                shift = at(hi - 1, hi - 1) + std::abs(at(hi - 1, hi - 2));
            qr_step(lo, hi, shift);
            if (stall > 4000)
                throw Error(Errc::Internal, "eigenvalue iteration failed to converge");
        }
        return eig;
    }

private:
    Cplx& at(std::size_t r, std::size_t c) { return h_[r * n_ + c]; }

    std::size_t deflation_point(std::size_t hi) {
        for (std::size_t k = hi - 1; k > 0; --k) {
            const double sub = std::abs(at(k, k - 1));
            const double diag = std::abs(at(k - 1, k - 1)) + std::abs(at(k, k));
            if (sub <= 1e-15 * (diag > 0.0 ? diag : 1.0)) {
                at(k, k - 1) = 0.0;
                return k;
            }
        }
        return 0;
    }

    Cplx wilkinson_shift(std::size_t hi) {
        const Cplx a = at(hi - 2, hi - 2);
        const Cplx b = at(hi - 2, hi - 1);
        const Cplx c = at(hi - 1, hi - 2);
        const Cplx d = at(hi - 1, hi - 1);
        const Cplx tr = a + d;
        const Cplx disc = std::sqrt(tr * tr - 4.0 * (a * d - b * c));
        const Cplx mu1 = 0.5 * (tr + disc);
        const Cplx mu2 = 0.5 * (tr - disc);
        return std::abs(mu1 - d) < std::abs(mu2 - d) ? mu1 : mu2;
    }

    // One implicit-shift QR sweep on the active window [lo, hi).
    void qr_step(std::size_t lo, std::size_t hi, Cplx shift) {
        const std::size_t m = hi - lo;
        std::vector<double> cs(m - 1);
        std::vector<Cplx> sn(m - 1);

        for (std::size_t k = lo; k < hi; ++k) at(k, k) -= shift;

        for (std::size_t k = lo; k + 1 < hi; ++k) {
            // Givens to annihilate at(k+1, k)
            const Cplx f = at(k, k);
            const Cplx g = at(k + 1, k);
            const double norm = std::hypot(std::abs(f), std::abs(g));
            double c;
            Cplx s;
            if (norm == 0.0) {
                c = 1.0;
                s = 0.0;
            } else {
                c = std::abs(f) / norm;
                const Cplx fsign = (std::abs(f) == 0.0) ? Cplx(1.0, 0.0) : f / std::abs(f);
                s = fsign * std::conj(g) / norm;
            }
            cs[k - lo] = c;
            sn[k - lo] = s;
            for (std::size_t j = k; j < hi; ++j) {
                const Cplx t1 = at(k, j);
                const Cplx t2 = at(k + 1, j);
                at(k, j) = c * t1 + s * t2;
                at(k + 1, j) = -std::conj(s) * t1 + c * t2;
            }
        }
        for (std::size_t k = lo; k + 1 < hi; ++k) {
            const double c = cs[k - lo];
            const Cplx s = sn[k - lo];
            const std::size_t rmax = std::min(hi, k + 3);
            for (std::size_t i = lo; i < rmax; ++i) {
                const Cplx t1 = at(i, k);
                const Cplx t2 = at(i, k + 1);
                at(i, k) = c * t1 + std::conj(s) * t2;
                at(i, k + 1) = -s * t1 + c * t2;
            }
        }
        for (std::size_t k = lo; k < hi; ++k) at(k, k) += shift;
    }

    std::vector<Cplx> h_;
    std::size_t n_;
};

} // namespace

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs) {
    if (coeffs.empty() || coeffs[0] == 0.0)
        throw Error(Errc::EmptyDenominator, "leading polynomial coefficient must be nonzero");
    const std::size_t n = coeffs.size() - 1;
    if (n == 0) return {};
    if (n == 1) return {Cplx(-coeffs[1] / coeffs[0], 0.0)};

    std::vector<Cplx> h(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) h[j] = Cplx(-coeffs[j + 1] / coeffs[0], 0.0);
    for (std::size_t i = 1; i < n; ++i) h[i * n + (i - 1)] = 1.0;
    return HessenbergQr(std::move(h), n).eigenvalues();
}

std::vector<double> pole_magnitudes(const std::vector<double>& denominator) {
    if (denominator.empty())
        throw Error(Errc::EmptyDenominator, "denominator has no coefficients");
    if (denominator[0] == 0.0)
        throw Error(Errc::EmptyDenominator, "a0 must be nonzero");
    const auto roots = polynomial_roots(denominator);
    std::vector<double> mags(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) mags[i] = std::abs(roots[i]);
    std::sort(mags.begin(), mags.end());
    return mags;
}

TransferFunction::TransferFunction(std::vector<double> numerator, std::vector<double> denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
    if (den_.empty()) throw Error(Errc::EmptyDenominator, "denominator has no coefficients");
    if (den_[0] == 0.0) throw Error(Errc::EmptyDenominator, "a0 must be nonzero");
    if (num_.empty()) num_ = {0.0};
    for (double v : num_)
        if (!std::isfinite(v)) throw Error(Errc::NonFiniteInput, "non-finite numerator coefficient");
    for (double v : den_)
        if (!std::isfinite(v)) throw Error(Errc::NonFiniteInput, "non-finite denominator coefficient");

    const auto mags = pole_magnitudes(den_);
    if (!mags.empty() && mags.back() >= 1.0 - kStabilityMargin)
        throw Error(Errc::UnstableFilter,
                    "pole magnitude " + std::to_string(mags.back()) + " outside stability margin");

    order_ = std::max(num_.size(), den_.size()) - 1;
    bnorm_.assign(order_ + 1, 0.0);
    anorm_.assign(order_ + 1, 0.0);
    for (std::size_t i = 0; i < num_.size(); ++i) bnorm_[i] = num_[i] / den_[0];
    for (std::size_t i = 0; i < den_.size(); ++i) anorm_[i] = den_[i] / den_[0];
}

TransferFunction make_filter(std::vector<double> numerator, std::vector<double> denominator) {
    return TransferFunction(std::move(numerator), std::move(denominator));
}

std::vector<double> filter_apply(const TransferFunction& tf, std::span<const double> x,
                                 FilterState& state) {
    if (state.size() != tf.order())
        throw Error(Errc::StateSizeMismatch, "state has " + std::to_string(state.size()) +
                                                 " registers, filter needs " +
                                                 std::to_string(tf.order()));
    const auto& b = tf.normalized_numerator();
    const auto& a = tf.normalized_denominator();
    const std::size_t k = tf.order();
    auto& s = state.registers();

    std::vector<double> y(x.size());
    if (k == 0) {
        for (std::size_t t = 0; t < x.size(); ++t) y[t] = b[0] * x[t];
        return y;
    }
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double xt = x[t];
        const double yt = b[0] * xt + s[0];
        for (std::size_t i = 0; i + 1 < k; ++i) s[i] = b[i + 1] * xt + s[i + 1] - a[i + 1] * yt;
        s[k - 1] = b[k] * xt - a[k] * yt;
        y[t] = yt;
    }
    return y;
}

std::vector<double> filter_all(const TransferFunction& tf, std::span<const double> x) {
    FilterState state(tf);
    return filter_apply(tf, x, state);
}

} // namespace whsid
