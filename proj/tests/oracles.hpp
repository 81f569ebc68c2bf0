#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

// Independent reference implementations used only to cross-check the
// library. Deliberately naive: clarity over speed.
namespace oracles {

/// O(N^2) DFT, X(k) = sum_t x(t) e^{-j2pi kt/N}.
inline std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(t) /
                               static_cast<double>(n);
            acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

/// Durand-Kerner root finder for a real polynomial c0 z^n + ... + cn.
inline std::vector<std::complex<double>> durand_kerner_roots(const std::vector<double>& coeffs,
                                                             int iterations = 200) {
    const std::size_t n = coeffs.size() - 1;
    std::vector<std::complex<double>> monic(n);
    for (std::size_t i = 0; i < n; ++i) monic[i] = coeffs[i + 1] / coeffs[0];

    auto eval = [&](std::complex<double> z) {
        std::complex<double> acc = 1.0;
        for (std::size_t i = 0; i < n; ++i) acc = acc * z + monic[i];
        return acc;
    };

    std::vector<std::complex<double>> roots(n);
    const std::complex<double> seed(0.4, 0.9);
    std::complex<double> p = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        p *= seed;
        roots[i] = p;
    }
    for (int it = 0; it < iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> denom = 1.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) denom *= roots[i] - roots[j];
            roots[i] -= eval(roots[i]) / denom;
        }
    }
    return roots;
}

/// Roots of a z^2 + b z + c by the numerically careful closed form.
inline std::vector<std::complex<double>> quadratic_roots(double a, double b, double c) {
    const std::complex<double> disc = std::sqrt(std::complex<double>(b * b - 4.0 * a * c, 0.0));
    const std::complex<double> q = -0.5 * (b + (b >= 0 ? disc : -disc));
    if (std::abs(q) == 0.0) return {0.0, 0.0};
    return {q / a, c / q};
}

/// Expand a polynomial (z - r1)(z - r2)... into monic coefficients 1, c1..cn.
inline std::vector<double> poly_from_roots(const std::vector<std::complex<double>>& roots) {
    std::vector<std::complex<double>> c{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i] += c[i];
            next[i + 1] -= c[i] * r;
        }
        c = std::move(next);
    }
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
    return out;
}

inline std::vector<double> sorted_magnitudes(std::vector<std::complex<double>> roots) {
    std::vector<double> m(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) m[i] = std::abs(roots[i]);
    std::sort(m.begin(), m.end());
    return m;
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean(a), mb = mean(b);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

} // namespace oracles
