#include "whsid/structure_detector.hpp"

#include "whsid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace whsid {

const char* verdict_name(Verdict v) {
    return v == Verdict::ProcessNoiseBeforeNL ? "process-noise-before-nonlinearity"
                                              : "process-noise-after-or-absent";
}

const char* signature_name(Signature s) {
    switch (s) {
        case Signature::SaturationLike: return "saturation-like";
        case Signature::DeadZoneLike: return "dead-zone-like";
        case Signature::SmoothLike: return "smooth-like";
        case Signature::NotApplicable: return "not-applicable";
    }
    return "unknown";
}

void VarianceAccumulator::add_experiment(const std::vector<std::vector<double>>& periods) {
    const std::size_t p = periods.size();
    if (p < 2) throw Error(Errc::TooFewPeriods, "variance needs at least 2 periods");
    if (m_ == 0) p_ = p;
    if (p != p_) throw Error(Errc::DimensionMismatch, "period count differs between experiments");
    for (const auto& period : periods)
        if (period.size() != n_)
            throw Error(Errc::DimensionMismatch, "period length differs from record length");

    std::vector<double> profile(n_);
    for (std::size_t t = 0; t < n_; ++t) {
        double mean = 0.0;
        for (std::size_t q = 0; q < p; ++q) mean += periods[q][t];
        mean /= static_cast<double>(p);
        double ss = 0.0;
        for (std::size_t q = 0; q < p; ++q) {
            const double d = periods[q][t] - mean;
            ss += d * d;
        }
        profile[t] = ss / static_cast<double>(p - 1);
        sum_[t] += profile[t];
    }
    per_experiment_.push_back(std::move(profile));
    ++m_;
}

VarianceProfile VarianceAccumulator::finish() const {
    if (m_ == 0) throw Error(Errc::DimensionMismatch, "no experiments accumulated");
    VarianceProfile out;
    out.sigma2.resize(n_);
    for (std::size_t t = 0; t < n_; ++t) out.sigma2[t] = sum_[t] / static_cast<double>(m_);
    out.per_experiment = per_experiment_;
    out.dof_per_sample = m_ * (p_ - 1);
    return out;
}

VarianceProfile variance_profile(const CampaignRecord& record) {
    VarianceAccumulator acc(record.n);
    for (const auto& exp : record.experiments) acc.add_experiment(exp.periods);
    return acc.finish();
}

BinnedProfile bin_profile(const VarianceProfile& profile, std::span<const double> envelope,
                          std::size_t bins) {
    const std::size_t n = profile.sigma2.size();
    if (envelope.size() != n)
        throw Error(Errc::DimensionMismatch, "envelope length differs from profile length");
    if (bins < 4 || bins > n / 16)
        throw Error(Errc::BadBinCount, "bin count must satisfy 4 <= B <= N/16, got " +
                                           std::to_string(bins));
    BinnedProfile out;
    out.sigma2_mean.resize(bins);
    out.envelope_sq_mean.resize(bins);
    out.bin_start.resize(bins);
    // contiguous bins, widths equal up to one sample when B does not divide N
    std::size_t start = 0;
    for (std::size_t b = 0; b < bins; ++b) {
        const std::size_t end = ((b + 1) * n) / bins;
        out.bin_start[b] = start;
        double sv = 0.0, se = 0.0;
        for (std::size_t t = start; t < end; ++t) {
            sv += profile.sigma2[t];
            se += envelope[t] * envelope[t];
        }
        const double w = static_cast<double>(end - start);
        out.sigma2_mean[b] = sv / w;
        out.envelope_sq_mean[b] = se / w;
        start = end;
    }
    return out;
}

namespace {

double pearson(const std::vector<double>& a, const std::vector<double>& b, bool& degenerate) {
    const std::size_t n = a.size();
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa <= 0.0 || sbb <= 0.0) {
        degenerate = true;
        return 0.0;
    }
    degenerate = false;
    return sab / std::sqrt(saa * sbb);
}

/// Indices of the k largest (or smallest) values of v.
std::vector<std::size_t> ranked_indices(const std::vector<double>& v, std::size_t k, bool largest) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        return largest ? v[i] > v[j] : v[i] < v[j];
    });
    idx.resize(std::min(k, idx.size()));
    return idx;
}

double mean_at(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (std::size_t i : idx) s += v[i];
    return s / static_cast<double>(idx.size());
}

} // namespace

LocationDecision decide_location(const BinnedProfile& bins, const DetectorThresholds& th) {
    LocationDecision d;
    d.rho = pearson(bins.sigma2_mean, bins.envelope_sq_mean, d.rho_degenerate);
    const double vmax = *std::max_element(bins.sigma2_mean.begin(), bins.sigma2_mean.end());
    const double vmin = *std::min_element(bins.sigma2_mean.begin(), bins.sigma2_mean.end());
    if (vmax <= 0.0)
        d.ratio = 1.0;  // identically zero profile carries no evidence
    else if (vmin <= 0.0)
        d.ratio = std::numeric_limits<double>::infinity();
    else
        d.ratio = vmax / vmin;
    const bool rho_hit = !d.rho_degenerate && std::abs(d.rho) >= th.rho_min;
    d.verdict = (rho_hit || d.ratio >= th.ratio_min) ? Verdict::ProcessNoiseBeforeNL
                                                     : Verdict::ProcessNoiseAfterNLorAbsent;
    return d;
}

Signature classify_signature(const BinnedProfile& bins, Verdict verdict,
                             const DetectorThresholds& th, SignatureScores* scores) {
    if (scores) *scores = SignatureScores{};
    if (verdict != Verdict::ProcessNoiseBeforeNL) return Signature::NotApplicable;

    const auto& v = bins.sigma2_mean;
    const auto& e = bins.envelope_sq_mean;
    const std::size_t b = v.size();

    const std::size_t k_peak = (b + 3) / 4;  // top envelope quartile
    const std::size_t k_edge = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                            std::floor(th.plateau_frac * b)));
    const auto peak_bins = ranked_indices(e, k_peak, true);
    const auto edge_bins = ranked_indices(e, k_edge, false);

    std::vector<std::size_t> rest;
    {
        std::vector<bool> is_peak(b, false);
        for (std::size_t i : peak_bins) is_peak[i] = true;
        for (std::size_t i = 0; i < b; ++i)
            if (!is_peak[i]) rest.push_back(i);
    }

    const double peak_mean = mean_at(v, peak_bins);
    const double rest_mean = mean_at(v, rest);
    const double edge_mean = mean_at(v, edge_bins);
    const double floor = *std::min_element(v.begin(), v.end());
    const double vmax = *std::max_element(v.begin(), v.end());
    const std::size_t argmax =
        static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    const bool argmax_in_peak =
        std::find(peak_bins.begin(), peak_bins.end(), argmax) != peak_bins.end();

    // normalized rise above the floor; concentration compares its mass over
    // the envelope-peak bins with the all-bin average
    double concentration = 0.0;
    if (vmax > floor) {
        double peak_rise = 0.0, all_rise = 0.0;
        for (std::size_t i : peak_bins) peak_rise += (v[i] - floor) / (vmax - floor);
        peak_rise /= static_cast<double>(peak_bins.size());
        for (double x : v) all_rise += (x - floor) / (vmax - floor);
        all_rise /= static_cast<double>(b);
        concentration = all_rise > 0.0 ? peak_rise / all_rise : 0.0;
    }

    if (scores) {
        scores->peak_ratio = rest_mean > 0.0 ? peak_mean / rest_mean : 1.0;
        scores->edge_floor_ratio = floor > 0.0 ? edge_mean / floor : 1.0;
        scores->rise_concentration = concentration;
        scores->argmax_in_peak_bins = argmax_in_peak;
    }

    if (rest_mean > 0.0 && peak_mean <= th.peak_dip * rest_mean) return Signature::SaturationLike;
    // the dead-zone hump is flat-topped, so its literal argmax bin wanders;
    // asking the peak bins to sit at or above the rest-average is the stable
    // form of "the variance maximum tracks the envelope maximum"
    if (floor > 0.0 && edge_mean <= th.floor_tol * floor && peak_mean >= rest_mean &&
        concentration <= th.dz_conc_max)
        return Signature::DeadZoneLike;
    return Signature::SmoothLike;
}

DetectionReport detect(const VarianceProfile& profile, std::span<const double> envelope,
                       std::size_t bins, const DetectorThresholds& thresholds) {
    DetectionReport report{.verdict = Verdict::ProcessNoiseAfterNLorAbsent,
                           .location = {},
                           .signature = Signature::NotApplicable,
                           .signature_scores = {},
                           .thresholds = thresholds,
                           .bins = bin_profile(profile, envelope, bins),
                           .dof_per_sample = profile.dof_per_sample};
    report.location = decide_location(report.bins, thresholds);
    report.verdict = report.location.verdict;
    report.signature =
        classify_signature(report.bins, report.verdict, thresholds, &report.signature_scores);
    return report;
}

} // namespace whsid
