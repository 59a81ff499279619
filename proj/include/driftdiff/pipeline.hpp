#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "driftdiff/changepoint.hpp"
#include "driftdiff/diagnostics.hpp"
#include "driftdiff/km.hpp"
#include "driftdiff/rolling.hpp"
#include "driftdiff/series.hpp"

namespace driftdiff {

// One declarative description of a full run; every CLI flag overrides one
// field. out_dir is excluded from the manifest snapshot so runs into
// different directories stay byte-comparable.
struct PipelineConfig {
    std::string input;
    std::string date_column = "date";
    std::string price_column = "price";
    std::string date_format = "%Y-%m-%d";
    std::string out_dir = ".";
    double clip_k = 1.5;
    std::vector<int> lags = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    int ck_bins = 100;
    std::vector<int> stationarity_windows = {10, 20, 50, 100, 200, 500, 1000};
    int km_bins = 50;
    int km_min_count = 10;
    bool diffusion_constant_term = false;
    RollingConfig rolling;
    SegmentationConfig segmentation;
    int density_bin_months = 6;
    std::uint64_t seed = 0;
};

// Loads overrides from a JSON config file; fields absent from the file keep
// their current values.
void apply_config_file(PipelineConfig& cfg, const std::string& path);

struct StageRecord {
    std::string name;
    std::vector<std::pair<std::string, std::string>> files;  // (file name, content hash)
};

struct RunManifest {
    std::string version;
    std::string config_json;  // snapshot (out_dir excluded), serialized
    std::string input_hash;
    std::vector<StageRecord> stages;
    std::string failed_stage;  // empty on success
};

// ingest -> diagnostics -> whole-series KM -> rolling -> breakpoints.
// Every intermediate artifact is written under cfg.out_dir; the manifest is
// written last (manifest.json). A stage failure writes a partial manifest
// and rethrows with the stage name prefixed.
RunManifest run_full(const PipelineConfig& cfg);

// In-memory stage outputs handed to the plot emitter.
struct StageData {
    const ReturnSeries* returns = nullptr;
    const KMProfile* profile = nullptr;
    const CoefficientTrack* track = nullptr;
    const BreakpointReport* breaks = nullptr;
};

// One tidy file per figure panel: returns + histogram, coefficient profile,
// coefficient tracks over returns, breakpoint density. Returns (file name,
// content hash) pairs; throws naming the first missing stage.
std::vector<std::pair<std::string, std::string>> emit_plot_data(const std::string& out_dir,
                                                                const StageData& data);

// FNV-1a 64-bit content hash as a 16-digit hex string.
std::string content_hash(const std::string& bytes);

std::string manifest_to_json(const RunManifest& manifest);

// Serialization used by both the run stages and the standalone subcommands,
// so re-running one stage from cached artifacts reproduces identical bytes.
std::string returns_metadata_json(const ReturnSeries& r, double clip_k);
std::string stationarity_to_csv(const StationarityCurve& curve);
std::string markov_to_csv(const MarkovTestResult& result);
std::string diagnostics_json(const StationarityCurve& curve, const MarkovTestResult& markov);
std::string km_profile_to_csv(const KMProfile& profile);
std::string km_fits_json(const KMProfile& profile, const DriftFit& drift,
                         const DiffusionFit& diffusion);
std::string track_to_csv(const CoefficientTrack& track);
CoefficientTrack track_from_csv(const std::string& path);
std::string sensitivity_json(const SensitivityReport& report);
std::string breaks_report_json(const BreakpointReport& report);
std::string breaks_to_csv(const BreakpointReport& report);
std::string density_to_csv(const BreakpointReport& report);

}  // namespace driftdiff
