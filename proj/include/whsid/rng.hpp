#pragma once

#include <cmath>
#include <cstdint>

namespace whsid {

/// splitmix64 finalizer; used for seed expansion and derivation.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Noise/phase stream identifiers for per-experiment seed derivation.
/// run_campaign derives one independent stream per (base_seed, experiment,
/// stream) triple so that enabling or disabling one noise source never
/// shifts the draws of another.
enum class Stream : std::uint64_t {
    Phases = 1,
    ProcessNoise = 2,
    MeasurementNoise = 3,
    InputNoise = 4,
    Calibration = 5,
    CalibrationNoise = 6,
};

/// Deterministic, platform-independent seed for (base, experiment, stream).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t experiment, Stream stream) {
    std::uint64_t s = base;
    splitmix64_next(s);
    s ^= 0xA0761D6478BD642FULL * (experiment + 1);
    splitmix64_next(s);
    s ^= 0xE7037ED1A0B428DBULL * static_cast<std::uint64_t>(stream);
    return splitmix64_next(s);
}

/**
 * xoshiro256++ generator with Box-Muller Gaussian sampling.
 *
 * Hand-rolled rather than <random> so that sequences are bit-identical
 * across standard libraries and platforms; campaign reproducibility is
 * keyed on these draws.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64_next(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, 2*pi).
    double uniform_angle() { return uniform01() * 6.283185307179586476925286766559; }

    /// Standard normal via Box-Muller (pairs cached).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4]{};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace whsid
