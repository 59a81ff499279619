// driftdiff: reconstruct drift/diffusion dynamics from time series, track
// coefficients through rolling windows, and detect regime breakpoints.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "driftdiff/changepoint.hpp"
#include "driftdiff/dates.hpp"
#include "driftdiff/diagnostics.hpp"
#include "driftdiff/errors.hpp"
#include "driftdiff/ingest.hpp"
#include "driftdiff/km.hpp"
#include "driftdiff/langevin.hpp"
#include "driftdiff/pipeline.hpp"
#include "driftdiff/rolling.hpp"
#include "driftdiff/table.hpp"
#include "driftdiff/version.hpp"

namespace {

using namespace driftdiff;

// "1..10" (inclusive range), "30:100:5" (range with step) or "1,2,5".
std::vector<int> parse_int_spec(const std::string& spec) {
    std::vector<int> out;
    const auto dots = spec.find("..");
    if (dots != std::string::npos) {
        const int lo = std::stoi(spec.substr(0, dots));
        const int hi = std::stoi(spec.substr(dots + 2));
        for (int v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    if (std::count(spec.begin(), spec.end(), ':') == 2) {
        const auto c1 = spec.find(':');
        const auto c2 = spec.find(':', c1 + 1);
        const int lo = std::stoi(spec.substr(0, c1));
        const int hi = std::stoi(spec.substr(c1 + 1, c2 - c1 - 1));
        const int step = std::stoi(spec.substr(c2 + 1));
        if (step < 1) throw CLI::ValidationError("step must be positive in '" + spec + "'");
        for (int v = lo; v <= hi; v += step) out.push_back(v);
        return out;
    }
    std::stringstream ss(spec);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) out.push_back(std::stoi(token));
    }
    if (out.empty()) throw CLI::ValidationError("empty integer list '" + spec + "'");
    return out;
}

std::vector<double> parse_double_list(const std::string& spec, std::size_t expected) {
    std::vector<double> out;
    std::stringstream ss(spec);
    std::string token;
    while (std::getline(ss, token, ',')) out.push_back(std::stod(token));
    if (out.size() != expected) {
        throw CLI::ValidationError("expected " + std::to_string(expected) + " values in '" +
                                   spec + "'");
    }
    return out;
}

void write_artifact(const std::string& dir, const std::string& name,
                    const std::string& content) {
    std::filesystem::create_directories(dir);
    write_text_file((std::filesystem::path(dir) / name).string(), content);
}

// The config file seeds defaults before CLI11 parses, so flags override it.
std::string find_config_arg(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") return argv[i + 1];
    }
    return {};
}

ReturnSeries load_and_clip(const std::string& path, double clip_k, bool no_clip) {
    ReturnSeries r = read_returns(path);
    if (!no_clip) r = clip_returns(r, clip_k);
    return r;
}

int run_cli(int argc, char** argv) {
    PipelineConfig cfg;
    const std::string config_path = find_config_arg(argc, argv);
    if (!config_path.empty()) apply_config_file(cfg, config_path);

    CLI::App app{"drift/diffusion reconstruction and regime tracking for time series"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    std::string config_dummy;
    app.add_option("--config", config_dummy, "JSON config file (flags override it)");

    std::string lag_spec, bin_spec, window_spec, alt_spec;
    bool no_clip = false;

    // ingest
    auto* ingest = app.add_subcommand("ingest", "price file -> canonical returns file");
    std::string out_file;
    ingest->add_option("--input", cfg.input, "delimited price file")->required();
    ingest->add_option("--date-col", cfg.date_column, "date column name");
    ingest->add_option("--price-col", cfg.price_column, "price column name");
    ingest->add_option("--date-format", cfg.date_format, "date pattern, e.g. %Y-%m-%d");
    ingest->add_option("--clip-k", cfg.clip_k, "clip threshold in sigmas");
    ingest->add_option("--out", out_file, "output returns file")->required();
    ingest->add_option("--config", config_dummy, "JSON config file");
    ingest->callback([&] {
        const PriceSeries prices =
            load_prices(cfg.input, ColumnSpec{cfg.date_column, cfg.price_column, cfg.date_format});
        const ReturnSeries returns = clip_returns(log_returns(prices), cfg.clip_k);
        write_returns(out_file, returns);
        write_text_file(out_file + ".meta.json", returns_metadata_json(returns, cfg.clip_k));
        std::cout << "wrote " << out_file << " (" << returns.size() << " returns, sigma "
                  << returns.sigma << ")\n";
    });

    // diagnose
    auto* diagnose = app.add_subcommand("diagnose", "stationarity curve and Markov-length test");
    std::string returns_path, out_dir = ".";
    diagnose->add_option("--returns", returns_path, "returns file")->required();
    diagnose->add_option("--lags", lag_spec, "lag grid, e.g. 1..10");
    diagnose->add_option("--bins", cfg.ck_bins, "bins for the transition matrices");
    diagnose->add_option("--window-sizes", window_spec, "stationarity window sizes");
    diagnose->add_option("--clip-k", cfg.clip_k, "clip threshold in sigmas");
    diagnose->add_flag("--no-clip", no_clip, "skip the |r| <= k*sigma restriction");
    diagnose->add_option("--out", out_dir, "output directory");
    diagnose->add_option("--config", config_dummy, "JSON config file");
    diagnose->callback([&] {
        if (!lag_spec.empty()) cfg.lags = parse_int_spec(lag_spec);
        if (!window_spec.empty()) cfg.stationarity_windows = parse_int_spec(window_spec);
        const ReturnSeries returns = load_and_clip(returns_path, cfg.clip_k, no_clip);
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
        write_artifact(out_dir, "diagnostics.json", diagnostics_json(curve, markov));
        write_artifact(out_dir, "stationarity.csv", stationarity_to_csv(curve));
        write_artifact(out_dir, "markov.csv", markov_to_csv(markov));
        if (markov.fit_ok) {
            std::cout << "markov length " << markov.markov_length << " steps (A = "
                      << markov.amplitude << ")\n";
        } else {
            std::cout << "markov-length fit failed (non-decaying Q)\n";
        }
    });

    // km
    auto* km = app.add_subcommand("km", "whole-series coefficient profile and fits");
    std::string orders_spec = "1,2,4";
    km->add_option("--returns", returns_path, "returns file")->required();
    km->add_option("--bins", cfg.km_bins, "number of bins");
    km->add_option("--min-count", cfg.km_min_count, "minimum samples per valid bin");
    km->add_option("--orders", orders_spec, "coefficient orders, subset of 1,2,4");
    km->add_flag("--diffusion-constant-term", cfg.diffusion_constant_term,
                 "allow a constant term in the diffusion fit");
    km->add_option("--clip-k", cfg.clip_k, "clip threshold in sigmas");
    km->add_flag("--no-clip", no_clip, "skip the |r| <= k*sigma restriction");
    km->add_option("--out", out_dir, "output directory");
    km->add_option("--config", config_dummy, "JSON config file");
    km->callback([&] {
        KMOrders orders{false, false, false};
        for (int o : parse_int_spec(orders_spec)) {
            if (o == 1) orders.first = true;
            else if (o == 2) orders.second = true;
            else if (o == 4) orders.fourth = true;
            else throw CLI::ValidationError("orders must be a subset of 1,2,4");
        }
        const ReturnSeries returns = load_and_clip(returns_path, cfg.clip_k, no_clip);
        const KMProfile profile = estimate_km(returns, cfg.km_bins, cfg.km_min_count, orders);
        write_artifact(out_dir, "km_profile.csv", km_profile_to_csv(profile));
        if (orders.first && orders.second) {
            const DriftFit drift = fit_drift(profile);
            const DiffusionFit diffusion = fit_diffusion(profile, cfg.diffusion_constant_term);
            write_artifact(out_dir, "km_fits.json", km_fits_json(profile, drift, diffusion));
            std::cout << "alpha " << drift.alpha << " (R2 " << drift.r_squared << "), beta "
                      << diffusion.beta << " delta " << diffusion.delta << " (R2 "
                      << diffusion.r_squared << ")\n";
        }
    });

    // rolling
    auto* rolling = app.add_subcommand("rolling", "rolling-window coefficient tracks");
    rolling->add_option("--returns", returns_path, "returns file")->required();
    rolling->add_option("--window", cfg.rolling.window_length, "window length (observations)");
    rolling->add_option("--step", cfg.rolling.step, "stride between window starts");
    rolling->add_option("--bins", bin_spec, "bin-count sweep, e.g. 30:100:5");
    rolling->add_option("--r2", cfg.rolling.r2_threshold, "R^2 gate for both fits");
    std::string sigma_mode =
        cfg.rolling.sigma_mode == SigmaMode::Global ? "global" : "per-window";
    rolling->add_option("--sigma", sigma_mode, "clip sigma mode: per-window or global");
    rolling->add_option("--min-count", cfg.rolling.min_count, "minimum samples per valid bin");
    rolling->add_flag("--diffusion-constant-term", cfg.rolling.diffusion_constant_term,
                      "allow a constant term in the diffusion fit");
    rolling->add_option("--clip-k", cfg.rolling.clip_k, "clip threshold in sigmas");
    rolling->add_option("--alt-windows", alt_spec,
                        "window sizes for the sensitivity report, e.g. 700:1300:100");
    rolling->add_option("--out", out_dir, "output directory");
    rolling->add_option("--config", config_dummy, "JSON config file");
    rolling->callback([&] {
        if (!bin_spec.empty()) cfg.rolling.bin_counts = parse_int_spec(bin_spec);
        if (sigma_mode == "global") cfg.rolling.sigma_mode = SigmaMode::Global;
        else if (sigma_mode == "per-window") cfg.rolling.sigma_mode = SigmaMode::PerWindow;
        else throw CLI::ValidationError("--sigma must be per-window or global");
        const ReturnSeries returns = read_returns(returns_path);
        const CoefficientTrack track = rolling_estimate(returns, cfg.rolling);
        write_artifact(out_dir, "track.csv", track_to_csv(track));
        std::size_t defined = 0;
        for (std::size_t i = 0; i < track.size(); ++i) defined += track.defined(i) ? 1 : 0;
        std::cout << track.size() << " windows, " << defined << " defined\n";
        if (!alt_spec.empty()) {
            const SensitivityReport report =
                sensitivity(returns, cfg.rolling, parse_int_spec(alt_spec));
            write_artifact(out_dir, "sensitivity.json", sensitivity_json(report));
        }
    });

    // breaks
    auto* breaks = app.add_subcommand("breaks", "breakpoints on a coefficient track");
    std::string track_path;
    breaks->add_option("--track", track_path, "track file from the rolling stage")->required();
    breaks->add_option("--n-bkps", cfg.segmentation.n_breakpoints, "breakpoints per series");
    breaks->add_option("--min-segment", cfg.segmentation.min_segment, "minimum segment length");
    breaks->add_option("--jump", cfg.segmentation.jump, "candidate-index stride");
    breaks->add_option("--bin-months", cfg.density_bin_months, "density bin width in months");
    breaks->add_option("--out", out_dir, "output directory");
    breaks->add_option("--config", config_dummy, "JSON config file");
    breaks->callback([&] {
        const CoefficientTrack track = track_from_csv(track_path);
        const Signal alpha = impute_undefined(Signal{track.alpha, track.times});
        const Signal beta = impute_undefined(Signal{track.beta, track.times});
        const BinsegResult ra = binseg(alpha.values, cfg.segmentation);
        const BinsegResult rb = binseg(beta.values, cfg.segmentation);
        const BreakpointReport report = union_and_density(ra.breakpoints, rb.breakpoints,
                                                          track.times, cfg.density_bin_months);
        write_artifact(out_dir, "breaks.json", breaks_report_json(report));
        write_artifact(out_dir, "breaks.csv", breaks_to_csv(report));
        write_artifact(out_dir, "density.csv", density_to_csv(report));
        std::cout << report.union_breaks.size() << " union breakpoints\n";
    });

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Langevin path -> synthetic price file");
    std::string drift_spec = "0,0,0", d2_spec = "0.125,0,0", domain_spec, start_date = "2000-01-01";
    double price0 = 100.0;
    std::uint64_t steps = 1000;
    LangevinModel model;
    simulate->add_option("--drift", drift_spec, "drift polynomial a0,a1,a2");
    simulate->add_option("--d2", d2_spec, "diffusion polynomial eps,delta,beta (D2 = eps + delta x + beta x^2)");
    simulate->add_option("--dt", model.dt, "time step");
    simulate->add_option("--steps", steps, "number of steps");
    simulate->add_option("--seed", cfg.seed, "RNG seed");
    simulate->add_option("--x0", model.x0, "initial state");
    simulate->add_option("--domain", domain_spec, "reflecting bounds lo:hi");
    simulate->add_option("--start-date", start_date, "date of the first synthetic observation");
    simulate->add_option("--price0", price0, "first synthetic price");
    simulate->add_option("--out", out_file, "output price file")->required();
    simulate->add_option("--config", config_dummy, "JSON config file");
    simulate->callback([&] {
        const auto a = parse_double_list(drift_spec, 3);
        const auto d = parse_double_list(d2_spec, 3);
        for (int i = 0; i < 3; ++i) {
            model.drift[i] = a[i];
            model.d2[i] = d[i];
        }
        if (!domain_spec.empty()) {
            const auto colon = domain_spec.find(':');
            if (colon == std::string::npos) throw CLI::ValidationError("--domain expects lo:hi");
            model.domain = {std::stod(domain_spec.substr(0, colon)),
                            std::stod(domain_spec.substr(colon + 1))};
        }
        const SimulatedPath path = euler_maruyama(model, steps, cfg.seed);

        // The path values are the returns; integrate them into a price file
        // that `ingest` consumes and inverts exactly.
        std::ostringstream out;
        out << "date,price\n";
        const Date first = parse_date(start_date);
        double cumulative = 0.0;
        out << format_date(first) << ',' << format_full(price0) << '\n';
        for (std::size_t i = 0; i < path.values.size(); ++i) {
            cumulative += path.values[i];
            if (std::fabs(cumulative) > 600.0) {
                throw SimulationError("cumulative return exceeds price range at step " +
                                      std::to_string(i));
            }
            out << format_date(Date{first.serial + static_cast<std::int32_t>(i) + 1}) << ','
                << format_full(price0 * std::exp(cumulative)) << '\n';
        }
        write_text_file(out_file, out.str());
        std::cout << "wrote " << out_file << " (" << path.values.size() + 1 << " prices)\n";
    });

    // run
    auto* run = app.add_subcommand("run", "full pipeline: ingest through breakpoints");
    run->add_option("--input", cfg.input, "delimited price file");
    run->add_option("--out-dir", cfg.out_dir, "output directory");
    run->add_option("--date-col", cfg.date_column, "date column name");
    run->add_option("--price-col", cfg.price_column, "price column name");
    run->add_option("--date-format", cfg.date_format, "date pattern");
    run->add_option("--clip-k", cfg.clip_k, "clip threshold in sigmas");
    run->add_option("--km-bins", cfg.km_bins, "bins for the whole-series profile");
    run->add_option("--window", cfg.rolling.window_length, "rolling window length");
    run->add_option("--step", cfg.rolling.step, "rolling stride");
    run->add_option("--r2", cfg.rolling.r2_threshold, "rolling R^2 gate");
    run->add_option("--n-bkps", cfg.segmentation.n_breakpoints, "breakpoints per series");
    run->add_option("--bin-months", cfg.density_bin_months, "density bin width in months");
    run->add_option("--seed", cfg.seed, "seed recorded in the manifest");
    run->add_option("--config", config_dummy, "JSON config file");
    run->callback([&] {
        if (cfg.input.empty()) throw CLI::ValidationError("run: --input (or config) required");
        const RunManifest manifest = run_full(cfg);
        std::cout << "wrote " << manifest.stages.size() << " stages under " << cfg.out_dir
                  << "\n";
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
