#include "whsid/errors.hpp"
#include "whsid/fft.hpp"
#include "whsid/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace whsid;

TEST_CASE("fft matches the naive DFT") {
    Rng rng(7);
    std::vector<std::complex<double>> x(64);
    for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};

    auto fast = x;
    fft_inplace(fast, false);
    const auto slow = oracles::naive_dft(x);
    for (std::size_t k = 0; k < x.size(); ++k) CHECK(std::abs(fast[k] - slow[k]) < 1e-10);
}

TEST_CASE("inverse fft undoes the forward transform") {
    Rng rng(11);
    std::vector<std::complex<double>> x(256);
    for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};

    auto y = x;
    fft_inplace(y, false);
    fft_inplace(y, true);
    for (std::size_t t = 0; t < x.size(); ++t)
        CHECK(std::abs(y[t] / 256.0 - x[t]) < 1e-12);
}

TEST_CASE("fft rejects non-power-of-two sizes") {
    std::vector<std::complex<double>> x(48);
    CHECK_THROWS_AS(fft_inplace(x, false), whsid::Error);
}

TEST_CASE("unitary transforms satisfy Parseval") {
    Rng rng(3);
    std::vector<double> u(512);
    for (auto& v : u) v = rng.gaussian();

    const auto spec = dft_unitary(u);
    double pt = 0.0, pf = 0.0;
    for (double v : u) pt += v * v;
    for (const auto& v : spec) pf += std::norm(v);
    CHECK(pt == doctest::Approx(pf).epsilon(1e-12));
}

TEST_CASE("rng streams are deterministic and distinct") {
    Rng a(42), b(42), c(43);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        all_equal = all_equal && va == b.next_u64();
        any_diff = any_diff || va != c.next_u64();
    }
    CHECK(all_equal);
    CHECK(any_diff);

    CHECK(derive_seed(1, 2, Stream::Phases) != derive_seed(1, 3, Stream::Phases));
    CHECK(derive_seed(1, 2, Stream::Phases) != derive_seed(1, 2, Stream::ProcessNoise));
    CHECK(derive_seed(1, 2, Stream::Phases) == derive_seed(1, 2, Stream::Phases));
}

TEST_CASE("gaussian sampler has the right first moments") {
    Rng rng(1234);
    const std::size_t n = 200000;
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        sum += g;
        sq += g * g;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}
