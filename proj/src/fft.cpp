#include "whsid/fft.hpp"

#include "whsid/errors.hpp"

#include <cmath>

namespace whsid {

void fft_inplace(std::vector<std::complex<double>>& data, bool inverse) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n))
        throw Error(Errc::BadLength, "FFT size must be a power of two, got " + std::to_string(n));
    if (n == 1) return;

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> a = data[i + k];
                const std::complex<double> b = data[i + k + len / 2] * w;
                data[i + k] = a + b;
                data[i + k + len / 2] = a - b;
                w *= wlen;
            }
        }
    }
}

std::vector<std::complex<double>> dft_unitary(const std::vector<double>& u) {
    const std::size_t n = u.size();
    std::vector<std::complex<double>> spec(n);
    for (std::size_t t = 0; t < n; ++t) spec[t] = u[t];
    fft_inplace(spec, false);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : spec) v *= scale;
    return spec;
}

std::vector<double> idft_unitary_real(std::vector<std::complex<double>> spectrum) {
    const std::size_t n = spectrum.size();
    fft_inplace(spectrum, true);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> u(n);
    for (std::size_t t = 0; t < n; ++t) u[t] = spectrum[t].real() * scale;
    return u;
}

} // namespace whsid
