#include "driftdiff/pipeline.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "driftdiff/errors.hpp"
#include "driftdiff/ingest.hpp"
#include "driftdiff/table.hpp"
#include "driftdiff/version.hpp"

namespace driftdiff {

namespace {

using nlohmann::json;

json config_to_json(const PipelineConfig& cfg) {
    json j;
    j["input"] = cfg.input;
    j["date_column"] = cfg.date_column;
    j["price_column"] = cfg.price_column;
    j["date_format"] = cfg.date_format;
    j["clip_k"] = cfg.clip_k;
    j["lags"] = cfg.lags;
    j["ck_bins"] = cfg.ck_bins;
    j["stationarity_windows"] = cfg.stationarity_windows;
    j["km_bins"] = cfg.km_bins;
    j["km_min_count"] = cfg.km_min_count;
    j["diffusion_constant_term"] = cfg.diffusion_constant_term;
    j["rolling"] = {
        {"window_length", cfg.rolling.window_length},
        {"step", cfg.rolling.step},
        {"bin_counts", cfg.rolling.bin_counts},
        {"r2_threshold", cfg.rolling.r2_threshold},
        {"clip_k", cfg.rolling.clip_k},
        {"sigma_mode", cfg.rolling.sigma_mode == SigmaMode::Global ? "global" : "per-window"},
        {"min_count", cfg.rolling.min_count},
        {"diffusion_constant_term", cfg.rolling.diffusion_constant_term},
    };
    j["segmentation"] = {
        {"n_breakpoints", cfg.segmentation.n_breakpoints},
        {"min_segment", cfg.segmentation.min_segment},
        {"jump", cfg.segmentation.jump},
    };
    j["density_bin_months"] = cfg.density_bin_months;
    j["seed"] = cfg.seed;
    return j;
}

template <typename T>
void maybe_get(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void apply_config_file(PipelineConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("config " + path + ": " + e.what());
    }
    maybe_get(j, "input", cfg.input);
    maybe_get(j, "date_column", cfg.date_column);
    maybe_get(j, "price_column", cfg.price_column);
    maybe_get(j, "date_format", cfg.date_format);
    maybe_get(j, "out_dir", cfg.out_dir);
    maybe_get(j, "clip_k", cfg.clip_k);
    maybe_get(j, "lags", cfg.lags);
    maybe_get(j, "ck_bins", cfg.ck_bins);
    maybe_get(j, "stationarity_windows", cfg.stationarity_windows);
    maybe_get(j, "km_bins", cfg.km_bins);
    maybe_get(j, "km_min_count", cfg.km_min_count);
    maybe_get(j, "diffusion_constant_term", cfg.diffusion_constant_term);
    if (j.contains("rolling")) {
        const json& r = j.at("rolling");
        maybe_get(r, "window_length", cfg.rolling.window_length);
        maybe_get(r, "step", cfg.rolling.step);
        maybe_get(r, "bin_counts", cfg.rolling.bin_counts);
        maybe_get(r, "r2_threshold", cfg.rolling.r2_threshold);
        maybe_get(r, "clip_k", cfg.rolling.clip_k);
        maybe_get(r, "min_count", cfg.rolling.min_count);
        maybe_get(r, "diffusion_constant_term", cfg.rolling.diffusion_constant_term);
        if (r.contains("sigma_mode")) {
            const std::string mode = r.at("sigma_mode").get<std::string>();
            if (mode == "global") {
                cfg.rolling.sigma_mode = SigmaMode::Global;
            } else if (mode == "per-window") {
                cfg.rolling.sigma_mode = SigmaMode::PerWindow;
            } else {
                throw ParseError("config: unknown sigma_mode '" + mode + "'");
            }
        }
    }
    if (j.contains("segmentation")) {
        const json& s = j.at("segmentation");
        maybe_get(s, "n_breakpoints", cfg.segmentation.n_breakpoints);
        maybe_get(s, "min_segment", cfg.segmentation.min_segment);
        maybe_get(s, "jump", cfg.segmentation.jump);
    }
    maybe_get(j, "density_bin_months", cfg.density_bin_months);
    maybe_get(j, "seed", cfg.seed);
}

std::string content_hash(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

// Writes under out_dir and records (name, hash) in the stage.
void emit_file(const std::string& out_dir, StageRecord& stage, const std::string& name,
               const std::string& content) {
    write_text_file((std::filesystem::path(out_dir) / name).string(), content);
    stage.files.emplace_back(name, content_hash(content));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string returns_to_csv(const ReturnSeries& r) {
    std::ostringstream out;
    out << "date,return\n";
    for (std::size_t i = 0; i < r.size(); ++i) {
        out << format_date(r.dates[i]) << ',' << format_full(r.values[i]) << '\n';
    }
    return out.str();
}

}  // namespace

std::string stationarity_to_csv(const StationarityCurve& curve) {
    std::ostringstream out;
    out << "window_size,w\n";
    for (std::size_t i = 0; i < curve.window_sizes.size(); ++i) {
        out << curve.window_sizes[i] << ',' << format_full(curve.w_values[i]) << '\n';
    }
    return out.str();
}

std::string markov_to_csv(const MarkovTestResult& result) {
    std::ostringstream out;
    out << "lag,q\n";
    for (std::size_t i = 0; i < result.lags.size(); ++i) {
        out << result.lags[i] << ',' << format_full(result.q_values[i]) << '\n';
    }
    return out.str();
}

std::string diagnostics_json(const StationarityCurve& curve, const MarkovTestResult& markov) {
    json j;
    j["stationarity"] = {{"window_sizes", curve.window_sizes}, {"w_values", curve.w_values}};
    j["markov"] = {{"lags", markov.lags},
                   {"q_values", markov.q_values},
                   {"amplitude", markov.amplitude},
                   {"markov_length", markov.fit_ok ? json(markov.markov_length) : json()},
                   {"fit_residual", markov.fit_residual},
                   {"fit_ok", markov.fit_ok}};
    return j.dump(2) + "\n";
}

std::string km_fits_json(const KMProfile& profile, const DriftFit& drift,
                         const DiffusionFit& diffusion) {
    json j;
    j["convention"] = profile.convention;
    j["step"] = profile.step;
    j["min_count"] = profile.min_count;
    j["drift"] = {{"alpha", drift.alpha}, {"gamma", drift.gamma}, {"r_squared", drift.r_squared}};
    j["diffusion"] = {{"beta", diffusion.beta},
                      {"delta", diffusion.delta},
                      {"r_squared", diffusion.r_squared},
                      {"constant_term", diffusion.has_constant_term}};
    if (diffusion.has_constant_term) j["diffusion"]["epsilon"] = diffusion.epsilon;
    return j.dump(2) + "\n";
}

std::string sensitivity_json(const SensitivityReport& report) {
    json j;
    j["baseline_window"] = report.baseline_window;
    j["alt_windows"] = report.alt_windows;
    json times = json::array();
    for (Date d : report.times) times.push_back(format_date(d));
    j["times"] = times;
    for (std::size_t which = 0; which < SensitivityReport::names().size(); ++which) {
        const std::string& name = SensitivityReport::names()[which];
        json per_alt = json::array();
        for (std::size_t a = 0; a < report.alt_windows.size(); ++a) {
            per_alt.push_back({{"window", report.alt_windows[a]},
                               {"deviation_std", report.deviation_std[which][a]},
                               {"abs_deviation", report.deviation[which][a]}});
        }
        j["coefficients"][name] = {{"alternatives", per_alt},
                                   {"mean_deviation_std", report.mean_deviation_std[which]}};
    }
    return j.dump(2) + "\n";
}

std::string breaks_to_csv(const BreakpointReport& report) {
    std::ostringstream out;
    out << "series,index,date\n";
    for (std::size_t i = 0; i < report.alpha_breaks.size(); ++i) {
        out << "alpha," << report.alpha_breaks[i] << ',' << format_date(report.alpha_dates[i])
            << '\n';
    }
    for (std::size_t i = 0; i < report.beta_breaks.size(); ++i) {
        out << "beta," << report.beta_breaks[i] << ',' << format_date(report.beta_dates[i])
            << '\n';
    }
    return out.str();
}

std::string returns_metadata_json(const ReturnSeries& r, double clip_k) {
    std::size_t clipped = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!r.clip_mask.empty() && r.masked(i)) ++clipped;
    }
    json j;
    j["label"] = r.label;
    j["n_returns"] = r.size();
    j["sigma"] = r.sigma;
    j["clip_k"] = clip_k;
    j["clip_fraction"] = r.size() ? static_cast<double>(clipped) / r.size() : 0.0;
    j["step"] = r.step;
    return j.dump(2) + "\n";
}

std::string track_to_csv(const CoefficientTrack& track) {
    std::ostringstream out;
    out << "date,alpha,beta,gamma,delta,pass_fraction\n";
    for (std::size_t i = 0; i < track.size(); ++i) {
        out << format_date(track.times[i]) << ',' << format_full(track.alpha[i]) << ','
            << format_full(track.beta[i]) << ',' << format_full(track.gamma[i]) << ','
            << format_full(track.delta[i]) << ',' << format_full(track.pass_fraction[i])
            << '\n';
    }
    return out.str();
}

CoefficientTrack track_from_csv(const std::string& path) {
    const Table t = read_table(path);
    CoefficientTrack track;
    const std::size_t date_col = t.column("date");
    const std::size_t cols[5] = {t.column("alpha"), t.column("beta"), t.column("gamma"),
                                 t.column("delta"), t.column("pass_fraction")};
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const std::size_t line = i + 2;
        track.times.push_back(parse_date(t.rows[i][date_col]));
        track.right_edge_index.push_back(static_cast<int>(i));
        track.alpha.push_back(parse_double(t.rows[i][cols[0]], line));
        track.beta.push_back(parse_double(t.rows[i][cols[1]], line));
        track.gamma.push_back(parse_double(t.rows[i][cols[2]], line));
        track.delta.push_back(parse_double(t.rows[i][cols[3]], line));
        track.pass_fraction.push_back(parse_double(t.rows[i][cols[4]], line));
    }
    return track;
}

std::string km_profile_to_csv(const KMProfile& profile) {
    std::ostringstream out;
    out << "r_bin,count,d1,d2,d4,valid\n";
    for (std::size_t b = 0; b < profile.n_bins(); ++b) {
        out << format_full(profile.bin_centers[b]) << ',' << profile.counts[b] << ','
            << format_full(profile.d1[b]) << ',' << format_full(profile.d2[b]) << ','
            << format_full(profile.d4[b]) << ',' << int(profile.valid[b]) << '\n';
    }
    return out.str();
}

std::string breaks_report_json(const BreakpointReport& report) {
    json j;
    auto dates = [](const std::vector<Date>& ds) {
        json arr = json::array();
        for (Date d : ds) arr.push_back(format_date(d));
        return arr;
    };
    j["alpha"] = {{"indices", report.alpha_breaks}, {"dates", dates(report.alpha_dates)}};
    j["beta"] = {{"indices", report.beta_breaks}, {"dates", dates(report.beta_dates)}};
    j["union"] = {{"indices", report.union_breaks}, {"dates", dates(report.union_dates)}};
    j["bin_months"] = report.bin_months;
    json density = json::array();
    for (const auto& bin : report.density) {
        density.push_back({{"start", format_date(bin.start)},
                           {"end", format_date(bin.end)},
                           {"count", bin.count}});
    }
    j["density"] = density;
    return j.dump(2) + "\n";
}

std::string density_to_csv(const BreakpointReport& report) {
    std::ostringstream out;
    out << "bin_start_date,break_count\n";
    for (const auto& bin : report.density) {
        out << format_date(bin.start) << ',' << bin.count << '\n';
    }
    return out.str();
}

std::vector<std::pair<std::string, std::string>> emit_plot_data(const std::string& out_dir,
                                                                const StageData& data) {
    if (!data.returns) throw EstimationError("emit_plot_data: missing stage ingest");
    if (!data.profile) throw EstimationError("emit_plot_data: missing stage km");
    if (!data.track) throw EstimationError("emit_plot_data: missing stage rolling");
    if (!data.breaks) throw EstimationError("emit_plot_data: missing stage breaks");

    std::vector<std::pair<std::string, std::string>> files;
    auto emit = [&](const std::string& name, const std::string& content) {
        write_text_file((std::filesystem::path(out_dir) / name).string(), content);
        files.emplace_back(name, content_hash(content));
    };

    emit("fig1_returns.csv", returns_to_csv(*data.returns));

    {  // Return distribution, 100 equal-width bins over the full range.
        const ReturnSeries& r = *data.returns;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (double v : r.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const int nb = 100;
        std::vector<int> counts(nb, 0);
        const double width = (hi - lo) / nb;
        for (double v : r.values) {
            int b = width > 0.0 ? std::min(nb - 1, static_cast<int>((v - lo) / width)) : 0;
            counts[b < 0 ? 0 : b] += 1;
        }
        std::ostringstream out;
        out << "bin_center,count\n";
        for (int b = 0; b < nb; ++b) {
            out << format_full(lo + (b + 0.5) * width) << ',' << counts[b] << '\n';
        }
        emit("fig1_histogram.csv", out.str());
    }

    {  // Coefficient profile per bin.
        std::ostringstream out;
        out << "r_bin,d1,d2,d4,count\n";
        const KMProfile& p = *data.profile;
        for (std::size_t b = 0; b < p.n_bins(); ++b) {
            out << format_full(p.bin_centers[b]) << ',' << format_full(p.d1[b]) << ','
                << format_full(p.d2[b]) << ',' << format_full(p.d4[b]) << ',' << p.counts[b]
                << '\n';
        }
        emit("fig2_km.csv", out.str());
    }

    {  // Tracks overlaid on returns: one row per observation, coefficients at
       // window right edges.
        const ReturnSeries& r = *data.returns;
        const CoefficientTrack& track = *data.track;
        std::vector<double> alpha(r.size(), std::numeric_limits<double>::quiet_NaN());
        std::vector<double> beta(r.size(), std::numeric_limits<double>::quiet_NaN());
        for (std::size_t i = 0; i < track.size(); ++i) {
            const int idx = track.right_edge_index[i];
            if (idx >= 0 && static_cast<std::size_t>(idx) < r.size()) {
                alpha[idx] = track.alpha[i];
                beta[idx] = track.beta[i];
            }
        }
        std::ostringstream out;
        out << "date,return,alpha,beta\n";
        for (std::size_t i = 0; i < r.size(); ++i) {
            out << format_date(r.dates[i]) << ',' << format_full(r.values[i]) << ','
                << format_full(alpha[i]) << ',' << format_full(beta[i]) << '\n';
        }
        emit("fig3_track.csv", out.str());
    }

    emit("fig4_density.csv", density_to_csv(*data.breaks));
    return files;
}

std::string manifest_to_json(const RunManifest& manifest) {
    json j;
    j["version"] = manifest.version;
    j["config"] = json::parse(manifest.config_json);
    j["input_hash"] = manifest.input_hash;
    json stages = json::array();
    for (const auto& stage : manifest.stages) {
        json files = json::array();
        for (const auto& [name, hash] : stage.files) {
            files.push_back({{"name", name}, {"fnv1a64", hash}});
        }
        stages.push_back({{"name", stage.name}, {"files", files}});
    }
    j["stages"] = stages;
    if (!manifest.failed_stage.empty()) j["failed_stage"] = manifest.failed_stage;
    return j.dump(2) + "\n";
}

RunManifest run_full(const PipelineConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    RunManifest manifest;
    manifest.version = kVersion;
    manifest.config_json = config_to_json(cfg).dump();
    manifest.input_hash = content_hash(read_file(cfg.input));

    std::string current_stage;
    try {
        // Stage 1: ingest.
        current_stage = "ingest";
        StageRecord ingest_stage{"ingest", {}};
        const PriceSeries prices = load_prices(
            cfg.input, ColumnSpec{cfg.date_column, cfg.price_column, cfg.date_format});
        ReturnSeries returns = clip_returns(log_returns(prices), cfg.clip_k);
        emit_file(cfg.out_dir, ingest_stage, "returns.csv", returns_to_csv(returns));
        emit_file(cfg.out_dir, ingest_stage, "returns.meta.json",
                  returns_metadata_json(returns, cfg.clip_k));
        manifest.stages.push_back(ingest_stage);

        // Stage 2: diagnostics.
        current_stage = "diagnostics";
        StageRecord diag_stage{"diagnostics", {}};
        std::vector<int> windows;
        for (int s : cfg.stationarity_windows) {
            if (s >= 2 && static_cast<std::size_t>(s) <= returns.size()) windows.push_back(s);
        }
        const StationarityCurve curve = sliding_variance(returns, windows);
        std::vector<int> lags;
        std::vector<double> q_values;
        for (int lag : cfg.lags) {
            if (2 * static_cast<std::size_t>(lag) >= returns.size()) continue;
            lags.push_back(lag);
            q_values.push_back(ck_deviation(returns, lag, cfg.ck_bins));
        }
        const MarkovTestResult markov = fit_markov_length(lags, q_values);
        emit_file(cfg.out_dir, diag_stage, "diagnostics.json", diagnostics_json(curve, markov));
        emit_file(cfg.out_dir, diag_stage, "stationarity.csv", stationarity_to_csv(curve));
        emit_file(cfg.out_dir, diag_stage, "markov.csv", markov_to_csv(markov));
        manifest.stages.push_back(diag_stage);

        // Stage 3: whole-series KM estimation.
        current_stage = "km";
        StageRecord km_stage{"km", {}};
        const KMProfile profile = estimate_km(returns, cfg.km_bins, cfg.km_min_count);
        const DriftFit drift = fit_drift(profile);
        const DiffusionFit diffusion = fit_diffusion(profile, cfg.diffusion_constant_term);
        emit_file(cfg.out_dir, km_stage, "km_profile.csv", km_profile_to_csv(profile));
        emit_file(cfg.out_dir, km_stage, "km_fits.json", km_fits_json(profile, drift, diffusion));
        manifest.stages.push_back(km_stage);

        // Stage 4: rolling coefficient tracks.
        current_stage = "rolling";
        StageRecord rolling_stage{"rolling", {}};
        const CoefficientTrack track = rolling_estimate(returns, cfg.rolling);
        emit_file(cfg.out_dir, rolling_stage, "track.csv", track_to_csv(track));
        manifest.stages.push_back(rolling_stage);

        // Stage 5: breakpoints on the imputed alpha/beta tracks.
        current_stage = "breaks";
        StageRecord breaks_stage{"breaks", {}};
        const Signal alpha_signal = impute_undefined(Signal{track.alpha, track.times});
        const Signal beta_signal = impute_undefined(Signal{track.beta, track.times});
        const BinsegResult alpha_breaks = binseg(alpha_signal.values, cfg.segmentation);
        const BinsegResult beta_breaks = binseg(beta_signal.values, cfg.segmentation);
        const BreakpointReport report = union_and_density(
            alpha_breaks.breakpoints, beta_breaks.breakpoints, track.times,
            cfg.density_bin_months);
        emit_file(cfg.out_dir, breaks_stage, "breaks.json", breaks_report_json(report));
        emit_file(cfg.out_dir, breaks_stage, "breaks.csv", breaks_to_csv(report));
        emit_file(cfg.out_dir, breaks_stage, "density.csv", density_to_csv(report));
        manifest.stages.push_back(breaks_stage);

        // Plot-ready panels, attached to their source stages.
        current_stage = "plots";
        StageData data{&returns, &profile, &track, &report};
        auto plot_files = emit_plot_data(cfg.out_dir, data);
        for (auto& f : plot_files) {
            if (f.first.rfind("fig1", 0) == 0) manifest.stages[0].files.push_back(f);
            else if (f.first.rfind("fig2", 0) == 0) manifest.stages[2].files.push_back(f);
            else if (f.first.rfind("fig3", 0) == 0) manifest.stages[3].files.push_back(f);
            else manifest.stages[4].files.push_back(f);
        }
    } catch (const std::exception& e) {
        manifest.failed_stage = current_stage;
        write_text_file((std::filesystem::path(cfg.out_dir) / "manifest.json").string(),
                        manifest_to_json(manifest));
        throw std::runtime_error("stage " + current_stage + ": " + e.what());
    }

    write_text_file((std::filesystem::path(cfg.out_dir) / "manifest.json").string(),
                    manifest_to_json(manifest));
    return manifest;
}

}  // namespace driftdiff
