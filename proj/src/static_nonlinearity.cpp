#include "whsid/static_nonlinearity.hpp"

#include "whsid/errors.hpp"

#include <cmath>

namespace whsid {

StaticNonlinearity::StaticNonlinearity(Polynomial p) : v_(std::move(p)) {
    const auto& c = std::get<Polynomial>(v_).coeffs;
    if (c.empty()) throw Error(Errc::BadNonlinearity, "polynomial needs at least one coefficient");
    for (double v : c)
        if (!std::isfinite(v)) throw Error(Errc::BadNonlinearity, "non-finite polynomial coefficient");
}

StaticNonlinearity::StaticNonlinearity(Saturation s) : v_(s) {
    if (!(s.lo < s.hi)) throw Error(Errc::BadNonlinearity, "saturation requires lo < hi");
}

StaticNonlinearity::StaticNonlinearity(DeadZone d) : v_(d) {
    if (!(d.lo < d.hi)) throw Error(Errc::BadNonlinearity, "dead-zone requires lo < hi");
}

double StaticNonlinearity::operator()(double x) const {
    if (const auto* p = std::get_if<Polynomial>(&v_)) {
        const auto& c = p->coeffs;
        double acc = c.back();
        for (std::size_t i = c.size() - 1; i-- > 0;) acc = acc * x + c[i];
        return acc;
    }
    if (const auto* s = std::get_if<Saturation>(&v_)) {
        if (x <= s->lo) return s->lo;
        if (x >= s->hi) return s->hi;
        return x;
    }
    const auto& d = std::get<DeadZone>(v_);
    if (x <= d.lo) return x - d.lo;
    if (x >= d.hi) return x - d.hi;
    return 0.0;
}

std::vector<double> eval_nl(const StaticNonlinearity& f, std::span<const double> x) {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]))
            throw Error(Errc::NonFiniteInput, "non-finite sample at index " + std::to_string(i));
        y[i] = f(x[i]);
    }
    return y;
}

std::optional<std::vector<double>> polynomial_coefficients(const StaticNonlinearity& f) {
    if (const auto* p = std::get_if<Polynomial>(&f.variant())) return p->coeffs;
    return std::nullopt;
}

} // namespace whsid
