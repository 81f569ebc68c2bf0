#include "whsid/config.hpp"

#include "whsid/errors.hpp"
#include "whsid/fft.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace whsid {

using nlohmann::json;

namespace {

const json* find(const json& j, const char* key) {
    if (!j.is_object()) return nullptr;
    const auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

double require_number(const json& j, const std::string& path) {
    if (!j.is_number())
        throw Error(Errc::ValidationError, path + ": expected a number");
    return j.get<double>();
}

double number_or(const json& parent, const char* key, const std::string& path, double fallback) {
    const json* v = find(parent, key);
    return v ? require_number(*v, path + "." + key) : fallback;
}

std::size_t index_or(const json& parent, const char* key, const std::string& path,
                     std::size_t fallback) {
    const json* v = find(parent, key);
    if (!v) return fallback;
    const double d = require_number(*v, path + "." + key);
    if (d < 0 || d != std::floor(d))
        throw Error(Errc::ValidationError, path + "." + key + ": expected a nonnegative integer");
    return static_cast<std::size_t>(d);
}

std::vector<double> require_array(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty())
        throw Error(Errc::ValidationError, path + ": expected a non-empty array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(require_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

TransferFunction parse_filter(const json& j, const std::string& path) {
    const json* num = find(j, "num");
    const json* den = find(j, "den");
    if (!num || !den)
        throw Error(Errc::ValidationError, path + ": filter needs 'num' and 'den' arrays");
    try {
        return make_filter(require_array(*num, path + ".num"), require_array(*den, path + ".den"));
    } catch (const Error& e) {
        if (e.code() == Errc::ValidationError) throw;
        throw Error(Errc::ValidationError, path + ": " + e.what());
    }
}

json filter_to_json(const TransferFunction& tf) {
    return json{{"num", tf.numerator()}, {"den", tf.denominator()}};
}

StaticNonlinearity parse_nonlinearity(const json& j, const std::string& path) {
    const json* type = find(j, "type");
    if (!type || !type->is_string())
        throw Error(Errc::ValidationError, path + ".type: expected a string");
    const std::string t = type->get<std::string>();
    try {
        if (t == "polynomial") {
            const json* coeffs = find(j, "coeffs");
            if (!coeffs) throw Error(Errc::ValidationError, path + ".coeffs: required");
            return StaticNonlinearity(Polynomial{require_array(*coeffs, path + ".coeffs")});
        }
        if (t == "saturation")
            return StaticNonlinearity(Saturation{number_or(j, "lo", path, -3.0),
                                                 number_or(j, "hi", path, 3.0)});
        if (t == "deadzone")
            return StaticNonlinearity(DeadZone{number_or(j, "lo", path, -1.0),
                                               number_or(j, "hi", path, 1.0)});
    } catch (const Error& e) {
        if (e.code() == Errc::ValidationError) throw;
        throw Error(Errc::ValidationError, path + ": " + e.what());
    }
    throw Error(Errc::ValidationError,
                path + ".type: must be polynomial, saturation, or deadzone");
}

json nonlinearity_to_json(const StaticNonlinearity& f) {
    if (const auto c = polynomial_coefficients(f)) return json{{"type", "polynomial"}, {"coeffs", *c}};
    if (const auto* s = std::get_if<Saturation>(&f.variant()))
        return json{{"type", "saturation"}, {"lo", s->lo}, {"hi", s->hi}};
    const auto& d = std::get<DeadZone>(f.variant());
    return json{{"type", "deadzone"}, {"lo", d.lo}, {"hi", d.hi}};
}

NoiseLocation parse_location(const json& j, const std::string& path) {
    if (!j.is_string()) throw Error(Errc::ValidationError, path + ": expected a string");
    const std::string s = j.get<std::string>();
    if (s == "before") return NoiseLocation::Before;
    if (s == "after") return NoiseLocation::After;
    if (s == "none") return NoiseLocation::None;
    throw Error(Errc::ValidationError, path + ": must be before, after, or none");
}

std::vector<std::size_t> parse_grid(const json* g, std::size_t n, const std::string& path) {
    if (!g || (g->is_string() && g->get<std::string>() == "full")) return full_grid(n);
    std::vector<std::size_t> grid;
    if (g->is_object()) {
        const std::size_t lo = index_or(*g, "lo", path, 1);
        const std::size_t hi = index_or(*g, "hi", path, n / 2 - 1);
        if (lo > hi) throw Error(Errc::ValidationError, path + ": lo > hi");
        for (std::size_t k = lo; k <= hi; ++k) grid.push_back(k);
    } else if (g->is_array()) {
        for (std::size_t i = 0; i < g->size(); ++i) {
            const double d = require_number((*g)[i], path + "[" + std::to_string(i) + "]");
            if (d < 1 || d != std::floor(d))
                throw Error(Errc::ValidationError, path + ": bins must be positive integers");
            grid.push_back(static_cast<std::size_t>(d));
        }
    } else {
        throw Error(Errc::ValidationError, path + ": expected \"full\", {lo,hi}, or an array");
    }
    if (grid.empty())
        throw Error(Errc::ValidationError, path + ": excited grid must not be empty");
    for (std::size_t k : grid)
        if (k < 1 || k > n / 2 - 1)
            throw Error(Errc::ValidationError,
                        path + ": bin " + std::to_string(k) + " outside 1..N/2-1");
    return grid;
}

} // namespace

CampaignConfig default_config() {
    CampaignConfig cfg{
        .system =
            WhSystem{
                .r = make_filter({0.1, 0.2, -0.3}, {0.95, -1.4, 0.9}),
                .s = make_filter({0.0, 1.0, 0.5}, {0.95, -0.9, 0.9}),
                .f = StaticNonlinearity(Polynomial{{0.0, 0.01, 0.02, -0.008}}),
                .location = NoiseLocation::Before,
                .process = NoiseModel{make_filter({1.0, 1.8}, {1.0, -1.4, 0.9}), 26.0, 0.0},
                .measurement = NoiseModel{make_filter({1.0, 2.0, 5.0}, {1.0, -0.94, 0.88}), 20.0,
                                          0.0},
                .input_noise_gain = 0.0,
            },
        .excitation = {},
        .campaign = {},
        .detector = {},
    };
    cfg.excitation.grid = full_grid(cfg.excitation.n);
    cfg.excitation.envelope = default_trapezoid_envelope(
        cfg.excitation.n, matched_trapezoid_peak(cfg.excitation.n, cfg.excitation.grid.size(),
                                                 cfg.excitation.amplitude));
    return cfg;
}

CampaignConfig config_from_json(const json& j) {
    if (!j.is_object()) throw Error(Errc::ValidationError, "config root must be an object");
    CampaignConfig cfg = default_config();

    // excitation first: the grid and envelope depend on n and amplitude
    const json* exc = find(j, "excitation");
    if (exc) {
        cfg.excitation.n = index_or(*exc, "n", "excitation", cfg.excitation.n);
        cfg.excitation.amplitude =
            number_or(*exc, "amplitude", "excitation", cfg.excitation.amplitude);
        cfg.excitation.segments = index_or(*exc, "segments", "excitation", cfg.excitation.segments);
        cfg.excitation.max_iter = index_or(*exc, "max_iter", "excitation", cfg.excitation.max_iter);
        cfg.excitation.tol = number_or(*exc, "tol", "excitation", cfg.excitation.tol);
    }
    const std::size_t n = cfg.excitation.n;
    if (!is_power_of_two(n) || n < 64)
        throw Error(Errc::ValidationError,
                    "excitation.n: must be a power of two >= 64, got " + std::to_string(n));
    if (!(cfg.excitation.amplitude > 0.0))
        throw Error(Errc::ValidationError, "excitation.amplitude: must be positive");
    cfg.excitation.grid = parse_grid(exc ? find(*exc, "grid") : nullptr, n, "excitation.grid");

    const json* env = exc ? find(*exc, "envelope") : nullptr;
    std::string env_type = "trapezoid";
    if (env) {
        const json* t = find(*env, "type");
        if (t && t->is_string()) env_type = t->get<std::string>();
    }
    if (env_type == "trapezoid") {
        const double peak = number_or(
            env ? *env : json::object(), "peak_rms", "excitation.envelope",
            matched_trapezoid_peak(n, cfg.excitation.grid.size(), cfg.excitation.amplitude));
        cfg.excitation.envelope = default_trapezoid_envelope(n, peak);
    } else if (env_type == "flat") {
        const double rms = number_or(
            env ? *env : json::object(), "rms", "excitation.envelope",
            cfg.excitation.amplitude *
                std::sqrt(2.0 * static_cast<double>(cfg.excitation.grid.size()) /
                          static_cast<double>(n)));
        cfg.excitation.envelope = flat_envelope(n, rms);
    } else if (env_type == "custom") {
        const json* rms = env ? find(*env, "rms") : nullptr;
        if (!rms) throw Error(Errc::ValidationError, "excitation.envelope.rms: required");
        auto values = require_array(*rms, "excitation.envelope.rms");
        if (values.size() != n)
            throw Error(Errc::ValidationError, "excitation.envelope.rms: expected " +
                                                   std::to_string(n) + " samples");
        for (double v : values)
            if (v < 0.0)
                throw Error(Errc::ValidationError, "excitation.envelope.rms: must be nonnegative");
        cfg.excitation.envelope = EnvelopeTarget{std::move(values), "custom"};
    } else {
        throw Error(Errc::ValidationError,
                    "excitation.envelope.type: must be trapezoid, flat, or custom");
    }

    const json* sys = find(j, "system");
    if (sys) {
        if (const json* r = find(*sys, "R")) cfg.system.r = parse_filter(*r, "system.R");
        if (const json* s = find(*sys, "S")) cfg.system.s = parse_filter(*s, "system.S");
        if (const json* nl = find(*sys, "nonlinearity"))
            cfg.system.f = parse_nonlinearity(*nl, "system.nonlinearity");
        if (const json* noise = find(*sys, "noise")) {
            if (const json* loc = find(*noise, "location"))
                cfg.system.location = parse_location(*loc, "system.noise.location");
            // stock SNRs depend on where the noise enters; explicit values win
            const bool before = cfg.system.location == NoiseLocation::Before;
            cfg.system.process.snr_db = before ? 26.0 : 20.0;
            cfg.system.measurement.snr_db = before ? 20.0 : 26.0;
            if (const json* p = find(*noise, "process")) {
                if (const json* f = find(*p, "filter"))
                    cfg.system.process.shaping = parse_filter(*f, "system.noise.process.filter");
                cfg.system.process.snr_db =
                    number_or(*p, "snr_db", "system.noise.process", cfg.system.process.snr_db);
            }
            if (const json* m = find(*noise, "measurement")) {
                if (const json* f = find(*m, "filter"))
                    cfg.system.measurement.shaping =
                        parse_filter(*f, "system.noise.measurement.filter");
                cfg.system.measurement.snr_db = number_or(*m, "snr_db", "system.noise.measurement",
                                                          cfg.system.measurement.snr_db);
            }
            cfg.system.input_noise_gain =
                number_or(*noise, "input_gain", "system.noise", cfg.system.input_noise_gain);
        }
    }

    const json* cam = find(j, "campaign");
    if (cam) {
        cfg.campaign.experiments =
            index_or(*cam, "experiments", "campaign", cfg.campaign.experiments);
        cfg.campaign.periods = index_or(*cam, "periods", "campaign", cfg.campaign.periods);
        cfg.campaign.base_seed = static_cast<std::uint64_t>(
            index_or(*cam, "base_seed", "campaign", static_cast<std::size_t>(cfg.campaign.base_seed)));
        cfg.campaign.sample_rate_hz =
            number_or(*cam, "sample_rate_hz", "campaign", cfg.campaign.sample_rate_hz);
    }
    if (cfg.campaign.experiments < 1)
        throw Error(Errc::ValidationError, "campaign.experiments: must be >= 1");
    if (cfg.campaign.periods < 2)
        throw Error(Errc::ValidationError, "campaign.periods: must be >= 2");
    if (!(cfg.campaign.sample_rate_hz > 0.0))
        throw Error(Errc::ValidationError, "campaign.sample_rate_hz: must be positive");

    const json* det = find(j, "detector");
    if (det) {
        cfg.detector.bins = index_or(*det, "bins", "detector", cfg.detector.bins);
        auto& th = cfg.detector.thresholds;
        th.rho_min = number_or(*det, "rho_min", "detector", th.rho_min);
        th.ratio_min = number_or(*det, "ratio_min", "detector", th.ratio_min);
        th.plateau_frac = number_or(*det, "plateau_frac", "detector", th.plateau_frac);
        th.floor_tol = number_or(*det, "floor_tol", "detector", th.floor_tol);
        th.peak_dip = number_or(*det, "peak_dip", "detector", th.peak_dip);
        th.dz_conc_max = number_or(*det, "dz_conc_max", "detector", th.dz_conc_max);
    }
    if (cfg.detector.bins < 4 || cfg.detector.bins > cfg.excitation.n / 16)
        throw Error(Errc::ValidationError, "detector.bins: must satisfy 4 <= bins <= N/16");
    return cfg;
}

json config_to_json(const CampaignConfig& cfg) {
    json envelope;
    if (cfg.excitation.envelope.shape == "trapezoid") {
        envelope = {{"type", "trapezoid"},
                    {"peak_rms", *std::max_element(cfg.excitation.envelope.rms.begin(),
                                                   cfg.excitation.envelope.rms.end())}};
    } else if (cfg.excitation.envelope.shape == "flat") {
        envelope = {{"type", "flat"}, {"rms", cfg.excitation.envelope.rms.front()}};
    } else {
        envelope = {{"type", "custom"}, {"rms", cfg.excitation.envelope.rms}};
    }
    const char* loc = cfg.system.location == NoiseLocation::Before  ? "before"
                      : cfg.system.location == NoiseLocation::After ? "after"
                                                                    : "none";
    json grid_json;
    {
        const auto& g = cfg.excitation.grid;
        const bool contiguous = g.back() - g.front() + 1 == g.size();
        if (g.size() == cfg.excitation.n / 2 - 1 && contiguous && g.front() == 1)
            grid_json = "full";
        else if (contiguous)
            grid_json = json{{"lo", g.front()}, {"hi", g.back()}};
        else
            grid_json = g;
    }
    return json{
        {"system",
         {{"R", filter_to_json(cfg.system.r)},
          {"S", filter_to_json(cfg.system.s)},
          {"nonlinearity", nonlinearity_to_json(cfg.system.f)},
          {"noise",
           {{"location", loc},
            {"process",
             {{"filter", filter_to_json(cfg.system.process.shaping)},
              {"snr_db", cfg.system.process.snr_db}}},
            {"measurement",
             {{"filter", filter_to_json(cfg.system.measurement.shaping)},
              {"snr_db", cfg.system.measurement.snr_db}}},
            {"input_gain", cfg.system.input_noise_gain}}}}},
        {"excitation",
         {{"n", cfg.excitation.n},
          {"amplitude", cfg.excitation.amplitude},
          {"grid", grid_json},
          {"envelope", envelope},
          {"segments", cfg.excitation.segments},
          {"max_iter", cfg.excitation.max_iter},
          {"tol", cfg.excitation.tol}}},
        {"campaign",
         {{"experiments", cfg.campaign.experiments},
          {"periods", cfg.campaign.periods},
          {"base_seed", cfg.campaign.base_seed},
          {"sample_rate_hz", cfg.campaign.sample_rate_hz}}},
        {"detector",
         {{"bins", cfg.detector.bins},
          {"rho_min", cfg.detector.thresholds.rho_min},
          {"ratio_min", cfg.detector.thresholds.ratio_min},
          {"plateau_frac", cfg.detector.thresholds.plateau_frac},
          {"floor_tol", cfg.detector.thresholds.floor_tol},
          {"peak_dip", cfg.detector.thresholds.peak_dip},
          {"dz_conc_max", cfg.detector.thresholds.dz_conc_max}}}};
}

CampaignConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

} // namespace whsid
