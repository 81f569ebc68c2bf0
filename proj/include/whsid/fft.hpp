#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace whsid {

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// In-place radix-2 FFT. Size must be a power of two.
/// Computes X(k) = sum_t x(t) e^{-j 2 pi k t / N}; the inverse transform
/// computes the conjugate sum and does NOT divide by N.
void fft_inplace(std::vector<std::complex<double>>& data, bool inverse);

/// Unitary forward transform of a real signal: U(k) = (1/sqrt(N)) sum_t u(t) e^{-j2pi kt/N}.
std::vector<std::complex<double>> dft_unitary(const std::vector<double>& u);

/// Unitary inverse of a Hermitian spectrum; returns the real signal
/// u(t) = (1/sqrt(N)) sum_k U(k) e^{+j2pi kt/N}.
std::vector<double> idft_unitary_real(std::vector<std::complex<double>> spectrum);

} // namespace whsid
