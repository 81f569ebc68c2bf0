#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace whsid {

/// f(x) = c0 + c1 x + ... + cn x^n
struct Polynomial {
    std::vector<double> coeffs;
};

/// Clamp to [lo, hi].
struct Saturation {
    double lo, hi;
};

/// Zero on (lo, hi), shifted identity outside: x-lo below, x-hi above.
struct DeadZone {
    double lo, hi;
};

/**
 * Memoryless nonlinear block. Immutable value type; construction validates
 * the variant (finite coefficients, lo < hi, non-empty polynomial).
 */
class StaticNonlinearity {
public:
    explicit StaticNonlinearity(Polynomial p);
    explicit StaticNonlinearity(Saturation s);
    explicit StaticNonlinearity(DeadZone d);

    double operator()(double x) const;

    bool is_polynomial() const noexcept { return std::holds_alternative<Polynomial>(v_); }
    const std::variant<Polynomial, Saturation, DeadZone>& variant() const noexcept { return v_; }

private:
    std::variant<Polynomial, Saturation, DeadZone> v_;
};

/// Pointwise evaluation; rejects non-finite inputs.
std::vector<double> eval_nl(const StaticNonlinearity& f, std::span<const double> x);

/// Power-series coefficients c0..cn for the polynomial variant, or nullopt
/// for saturation / dead-zone, which have no finite power expansion here.
std::optional<std::vector<double>> polynomial_coefficients(const StaticNonlinearity& f);

} // namespace whsid
