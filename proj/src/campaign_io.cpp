#include "whsid/campaign_io.hpp"

#include "whsid/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace whsid {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string experiment_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "experiment_%03zu.csv", index);
    return buf;
}

std::string input_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "input_%03zu.csv", index);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
    return out;
}

double parse_cell(const std::string& cell, const std::filesystem::path& file, std::size_t line,
                  std::size_t col) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument("trailing characters");
        if (!std::isfinite(v))
            throw Error(Errc::NonFiniteSample, file.string() + ":" + std::to_string(line) +
                                                   " column " + std::to_string(col + 1) +
                                                   " is not finite");
        return v;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw Error(Errc::ParseError, file.string() + ":" + std::to_string(line) +
                                          " column " + std::to_string(col + 1) +
                                          ": not a number: '" + cell + "'");
    }
}

/// Parse "t,v1,...,vk" rows; returns columns (without the t column).
std::vector<std::vector<double>> read_csv_columns(const std::filesystem::path& path,
                                                  std::size_t expect_rows) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw Error(Errc::ParseError, path.string() + ": empty file");

    std::vector<std::vector<double>> cols;
    std::string row;
    std::size_t line = 1;
    while (std::getline(in, row)) {
        ++line;
        if (row.empty()) continue;
        std::stringstream ss(row);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            if (col > 0) {
                if (cols.size() < col) cols.resize(col);
                cols[col - 1].push_back(parse_cell(cell, path, line, col));
            }
            ++col;
        }
    }
    for (const auto& c : cols)
        if (c.size() != expect_rows)
            throw Error(Errc::DimensionMismatch,
                        path.string() + ": expected " + std::to_string(expect_rows) +
                            " samples per column, found " + std::to_string(c.size()));
    return cols;
}

void atomic_write_json(const std::filesystem::path& path, const json& j) {
    const auto tmp = path.string() + ".tmp";
    {
        auto out = open_out(tmp);
        out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

} // namespace

CampaignWriter::CampaignWriter(std::filesystem::path dir, std::size_t n, std::size_t m,
                               std::size_t p, double sample_rate_hz, std::uint64_t base_seed,
                               std::vector<double> envelope)
    : dir_(std::move(dir)), n_(n), m_(m), p_(p), fs_(sample_rate_hz), base_seed_(base_seed),
      envelope_(std::move(envelope)) {
    std::filesystem::create_directories(dir_);
}

void CampaignWriter::write_experiment(std::size_t index, const Experiment& exp) {
    if (exp.input.size() != n_)
        throw Error(Errc::DimensionMismatch, "input length differs from campaign N");
    if (exp.periods.size() != p_)
        throw Error(Errc::DimensionMismatch, "period count differs from campaign P");

    {
        auto out = open_out(dir_ / input_name(index));
        out << "t,u0\n";
        for (std::size_t t = 0; t < n_; ++t) out << t << ',' << fmt(exp.input[t]) << '\n';
    }
    {
        auto out = open_out(dir_ / experiment_name(index));
        out << 't';
        for (std::size_t p = 1; p <= p_; ++p) out << ",period_" << p;
        out << '\n';
        for (std::size_t t = 0; t < n_; ++t) {
            out << t;
            for (std::size_t p = 0; p < p_; ++p) out << ',' << fmt(exp.periods[p][t]);
            out << '\n';
        }
    }
    files_.push_back(json{{"output", experiment_name(index)},
                          {"input", input_name(index)},
                          {"phase_seed", exp.phase_seed},
                          {"envelope_error", exp.envelope_error}});
}

void CampaignWriter::finalize(const json& extra) {
    json manifest{{"format", "whsid-campaign"},
                  {"n", n_},
                  {"experiments", m_},
                  {"periods", p_},
                  {"sample_rate_hz", fs_},
                  {"base_seed", base_seed_},
                  {"discard_periods", 0},
                  {"envelope", envelope_},
                  {"files", files_}};
    for (const auto& [k, v] : extra.items()) manifest[k] = v;
    atomic_write_json(dir_ / "campaign.json", manifest);
}

void write_campaign(const std::filesystem::path& dir, const CampaignRecord& record,
                    const json& extra) {
    CampaignWriter writer(dir, record.n, record.experiment_count, record.period_count,
                          record.sample_rate_hz, record.base_seed, record.envelope);
    for (std::size_t m = 0; m < record.experiments.size(); ++m)
        writer.write_experiment(m + 1, record.experiments[m]);
    writer.finalize(extra);
}

CampaignRecord ingest_measurements_streaming(
    const std::filesystem::path& manifest_path,
    const std::function<void(std::size_t, Experiment&&)>& sink) {
    std::filesystem::path path = manifest_path;
    if (std::filesystem::is_directory(path)) path /= "campaign.json";
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open manifest " + path.string());
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, path.string() + ": " + e.what());
    }
    const auto dir = path.parent_path();

    auto require = [&](const char* key) -> const json& {
        const auto it = manifest.find(key);
        if (it == manifest.end())
            throw Error(Errc::ValidationError, path.string() + ": manifest needs '" + key + "'");
        return *it;
    };

    CampaignRecord rec;
    rec.n = require("n").get<std::size_t>();
    rec.experiment_count = require("experiments").get<std::size_t>();
    const std::size_t p_raw = require("periods").get<std::size_t>();
    const std::size_t discard = manifest.value("discard_periods", std::size_t{0});
    if (p_raw <= discard)
        throw Error(Errc::ValidationError, "discard_periods leaves no data periods");
    rec.period_count = p_raw - discard;
    rec.sample_rate_hz = manifest.value("sample_rate_hz", 0.0);
    rec.base_seed = manifest.value("base_seed", std::uint64_t{0});

    const json& files = require("files");
    if (!files.is_array() || files.size() != rec.experiment_count)
        throw Error(Errc::DimensionMismatch, "manifest lists " + std::to_string(files.size()) +
                                                 " files for " +
                                                 std::to_string(rec.experiment_count) +
                                                 " experiments");

    const bool have_envelope = manifest.contains("envelope") && manifest["envelope"].is_array();
    if (have_envelope) {
        rec.envelope = manifest["envelope"].get<std::vector<double>>();
        if (rec.envelope.size() != rec.n)
            throw Error(Errc::DimensionMismatch, "manifest envelope length differs from n");
    }
    std::vector<double> env_acc(rec.n, 0.0);
    std::size_t env_inputs = 0;

    for (std::size_t m = 1; m <= rec.experiment_count; ++m) {
        const json& entry = files[m - 1];
        if (!entry.is_object() || !entry.contains("output") || !entry["output"].is_string())
            throw Error(Errc::ValidationError,
                        "manifest files[" + std::to_string(m - 1) + "] needs an 'output' path");
        Experiment exp;
        exp.phase_seed = entry.value("phase_seed", std::uint64_t{0});
        exp.envelope_error = entry.value("envelope_error", 0.0);

        if (entry.contains("input") && entry["input"].is_string()) {
            const auto cols = read_csv_columns(dir / entry["input"].get<std::string>(), rec.n);
            if (cols.size() != 1)
                throw Error(Errc::DimensionMismatch, "input file must have exactly one data column");
            exp.input = cols[0];
            if (!have_envelope) {
                const auto env = instantaneous_rms(exp.input, default_segment_count(rec.n));
                for (std::size_t t = 0; t < rec.n; ++t) env_acc[t] += env[t];
                ++env_inputs;
            }
        }

        auto cols = read_csv_columns(dir / entry["output"].get<std::string>(), rec.n);
        if (cols.size() != p_raw)
            throw Error(Errc::DimensionMismatch,
                        "expected " + std::to_string(p_raw) + " period columns, found " +
                            std::to_string(cols.size()));
        exp.periods.assign(std::make_move_iterator(cols.begin() + static_cast<std::ptrdiff_t>(discard)),
                           std::make_move_iterator(cols.end()));
        sink(m, std::move(exp));
    }

    if (!have_envelope) {
        if (env_inputs == 0)
            throw Error(Errc::ValidationError,
                        "manifest has neither an envelope nor input files to estimate one");
        rec.envelope = env_acc;
        for (auto& v : rec.envelope) v /= static_cast<double>(env_inputs);
    }
    return rec;
}

CampaignRecord ingest_measurements(const std::filesystem::path& manifest_path) {
    std::vector<Experiment> experiments;
    CampaignRecord rec = ingest_measurements_streaming(
        manifest_path, [&](std::size_t, Experiment&& e) { experiments.push_back(std::move(e)); });
    rec.experiments = std::move(experiments);
    return rec;
}

void write_profile_csv(const std::filesystem::path& path, const VarianceProfile& profile) {
    auto out = open_out(path);
    out << "t,sigma2_e\n";
    for (std::size_t t = 0; t < profile.sigma2.size(); ++t)
        out << t << ',' << fmt(profile.sigma2[t]) << '\n';
}

void write_bins_csv(const std::filesystem::path& path, const BinnedProfile& bins) {
    auto out = open_out(path);
    out << "bin,start_sample,sigma2_mean,envelope_sq_mean\n";
    for (std::size_t b = 0; b < bins.sigma2_mean.size(); ++b)
        out << b << ',' << bins.bin_start[b] << ',' << fmt(bins.sigma2_mean[b]) << ','
            << fmt(bins.envelope_sq_mean[b]) << '\n';
}

json report_to_json(const DetectionReport& report) {
    return json{
        {"verdict", verdict_name(report.verdict)},
        {"scores",
         {{"rho", report.location.rho},
          {"rho_abs", std::abs(report.location.rho)},
          {"ratio", report.location.ratio},
          {"rho_degenerate", report.location.rho_degenerate}}},
        {"signature", signature_name(report.signature)},
        {"signature_scores",
         {{"peak_ratio", report.signature_scores.peak_ratio},
          {"edge_floor_ratio", report.signature_scores.edge_floor_ratio},
          {"rise_concentration", report.signature_scores.rise_concentration},
          {"argmax_in_peak_bins", report.signature_scores.argmax_in_peak_bins}}},
        {"thresholds",
         {{"rho_min", report.thresholds.rho_min},
          {"ratio_min", report.thresholds.ratio_min},
          {"plateau_frac", report.thresholds.plateau_frac},
          {"floor_tol", report.thresholds.floor_tol},
          {"peak_dip", report.thresholds.peak_dip},
          {"dz_conc_max", report.thresholds.dz_conc_max}}},
        {"bins",
         {{"sigma2_mean", report.bins.sigma2_mean},
          {"envelope_sq_mean", report.bins.envelope_sq_mean},
          {"start_sample", report.bins.bin_start}}},
        {"dof_per_sample", report.dof_per_sample}};
}

void write_report_json(const std::filesystem::path& path, const DetectionReport& report) {
    atomic_write_json(path, report_to_json(report));
}

void write_design(const std::filesystem::path& out_dir, const DesignOutcome& design) {
    std::filesystem::create_directories(out_dir);
    {
        auto out = open_out(out_dir / "u0.csv");
        out << "t,u0\n";
        for (std::size_t t = 0; t < design.signal.samples.size(); ++t)
            out << t << ',' << fmt(design.signal.samples[t]) << '\n';
    }
    json j{{"n", design.signal.n},
           {"grid_lo", design.signal.grid.front()},
           {"grid_hi", design.signal.grid.back()},
           {"grid_size", design.signal.grid.size()},
           {"amplitude", design.signal.amplitude},
           {"seed", design.signal.seed},
           {"iterations", design.iterations},
           {"converged", design.converged},
           {"envelope_error", design.envelope_error},
           {"error_trace", design.error_trace}};
    atomic_write_json(out_dir / "design.json", j);
}

} // namespace whsid
