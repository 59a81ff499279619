#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "driftdiff/errors.hpp"
#include "driftdiff/ingest.hpp"
#include "driftdiff/table.hpp"
#include "driftdiff/langevin.hpp"
#include "driftdiff/pipeline.hpp"
#include "helpers.hpp"

using namespace driftdiff;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Two-regime synthetic price file: an OU return process integrated into
// strictly positive prices that ingest inverts exactly.
std::string write_two_regime_prices(const fs::path& path, std::size_t* change_index) {
    LangevinModel m1, m2;
    m1.drift[1] = -1.0;
    m2.drift[1] = -3.0;
    m1.d2[0] = m2.d2[0] = 5e-5;
    m1.dt = m2.dt = 0.5;
    const RegimePath regime = synthetic_regime_series({{m1, 4000}, {m2, 4000}}, 99);
    if (change_index) *change_index = regime.change_indices[0];

    std::ostringstream out;
    out << "date,price\n";
    const Date start = Date::from_ymd(1995, 1, 1);
    double cumulative = 0.0;
    out << format_date(start) << ",100\n";
    for (std::size_t i = 0; i < regime.path.values.size(); ++i) {
        cumulative += regime.path.values[i];
        out << format_date(Date{start.serial + static_cast<int>(i) + 1}) << ','
            << format_full(100.0 * std::exp(cumulative)) << '\n';
    }
    write_text_file(path.string(), out.str());
    return path.string();
}

PipelineConfig two_regime_config(const std::string& input, const std::string& out_dir) {
    PipelineConfig cfg;
    cfg.input = input;
    cfg.out_dir = out_dir;
    cfg.km_bins = 30;
    cfg.rolling.window_length = 1000;
    cfg.rolling.step = 20;
    cfg.rolling.bin_counts = {30, 40, 50};
    cfg.rolling.r2_threshold = 0.2;
    cfg.rolling.diffusion_constant_term = true;
    cfg.segmentation.n_breakpoints = 2;
    cfg.density_bin_months = 60;
    return cfg;
}

int run_cli(const std::string& args) {
    const char* bin = std::getenv("DRIFTDIFF_BIN");
    REQUIRE(bin != nullptr);
    const std::string command = std::string(bin) + " " + args + " >/dev/null 2>&1";
    return std::system(command.c_str());
}

}  // namespace

TEST_SUITE("cli_pipeline") {

TEST_CASE("config file values load and keep defaults elsewhere") {
    const fs::path path = fs::temp_directory_path() / "dd_config.json";
    write_text_file(path.string(),
                    R"({"clip_k": 2.0, "rolling": {"window_length": 1234, "sigma_mode": "global"},
                        "segmentation": {"n_breakpoints": 7}})");
    PipelineConfig cfg;
    apply_config_file(cfg, path.string());
    CHECK(cfg.clip_k == 2.0);
    CHECK(cfg.rolling.window_length == 1234);
    CHECK(cfg.rolling.sigma_mode == SigmaMode::Global);
    CHECK(cfg.segmentation.n_breakpoints == 7);
    CHECK(cfg.rolling.step == 10);        // untouched default
    CHECK(cfg.km_bins == 50);             // untouched default
}

TEST_CASE("run_full writes five stages and is byte-reproducible") {
    const fs::path base = fs::temp_directory_path() / "dd_run";
    fs::remove_all(base);
    fs::create_directories(base);
    std::size_t change = 0;
    const std::string input = write_two_regime_prices(base / "prices.csv", &change);

    PipelineConfig cfg = two_regime_config(input, (base / "out_a").string());
    const RunManifest a = run_full(cfg);
    REQUIRE(a.stages.size() == 5);
    CHECK(a.stages[0].name == "ingest");
    CHECK(a.stages[1].name == "diagnostics");
    CHECK(a.stages[2].name == "km");
    CHECK(a.stages[3].name == "rolling");
    CHECK(a.stages[4].name == "breaks");
    for (const auto& stage : a.stages) {
        for (const auto& [name, hash] : stage.files) {
            const fs::path file = base / "out_a" / name;
            REQUIRE_MESSAGE(fs::exists(file), name);
            CHECK(content_hash(slurp(file)) == hash);
        }
    }

    cfg.out_dir = (base / "out_b").string();
    const RunManifest b = run_full(cfg);
    CHECK(manifest_to_json(a) == manifest_to_json(b));
    CHECK(slurp(base / "out_a" / "manifest.json") == slurp(base / "out_b" / "manifest.json"));

    SUBCASE("plot panels carry the documented columns") {
        auto header_of = [&](const char* name) {
            const std::string content = slurp(base / "out_a" / name);
            return content.substr(0, content.find('\n'));
        };
        CHECK(header_of("fig1_returns.csv") == "date,return");
        CHECK(header_of("fig1_histogram.csv") == "bin_center,count");
        CHECK(header_of("fig2_km.csv") == "r_bin,d1,d2,d4,count");
        CHECK(header_of("fig3_track.csv") == "date,return,alpha,beta");
        CHECK(header_of("fig4_density.csv") == "bin_start_date,break_count");
    }

    SUBCASE("breakpoint density peaks in the bin containing the true change") {
        const std::string density = slurp(base / "out_a" / "density.csv");
        // Right-edge timestamps put detected breaks within a window length
        // after the change; 60-month bins absorb that lag here.
        const Date change_date{Date::from_ymd(1995, 1, 1).serial + static_cast<int>(change) + 1};
        std::istringstream in(density);
        std::string line;
        std::getline(in, line);  // header
        int best_count = -1;
        std::string best_start;
        std::vector<std::pair<std::string, int>> bins;
        while (std::getline(in, line)) {
            const auto comma = line.find(',');
            const int count = std::stoi(line.substr(comma + 1));
            bins.emplace_back(line.substr(0, comma), count);
            if (count > best_count) {
                best_count = count;
                best_start = line.substr(0, comma);
            }
        }
        REQUIRE(best_count >= 1);
        const Date best_bin_start = parse_date(best_start);
        CHECK(best_bin_start <= Date{change_date.serial + 1100});
        CHECK(Date{best_bin_start.serial + 5 * 366} >= change_date);
    }
}

TEST_CASE("track csv round trips including undefined entries") {
    CoefficientTrack track;
    track.times = {Date::from_ymd(2001, 5, 5), Date::from_ymd(2001, 5, 6)};
    track.right_edge_index = {0, 1};
    track.alpha = {-1.25, std::numeric_limits<double>::quiet_NaN()};
    track.beta = {0.5, 0.25};
    track.gamma = {0.0, 1e-17};
    track.delta = {-0.125, 3.0};
    track.pass_fraction = {1.0, 0.0};
    const fs::path path = fs::temp_directory_path() / "dd_track.csv";
    write_text_file(path.string(), track_to_csv(track));
    const CoefficientTrack back = track_from_csv(path.string());
    REQUIRE(back.size() == 2);
    CHECK(back.alpha[0] == track.alpha[0]);
    CHECK(std::isnan(back.alpha[1]));
    CHECK(back.gamma[1] == track.gamma[1]);
    CHECK(back.times[1] == track.times[1]);
}

TEST_CASE("emit_plot_data names the missing stage") {
    StageData data;
    try {
        emit_plot_data(".", data);
        FAIL("expected EstimationError");
    } catch (const EstimationError& e) {
        CHECK(std::string(e.what()).find("ingest") != std::string::npos);
    }
}

TEST_CASE("cli: simulate, ingest, km, rolling, breaks agree with run") {
    const fs::path base = fs::temp_directory_path() / "dd_cli";
    fs::remove_all(base);
    fs::create_directories(base);
    const std::string dir = base.string();

    REQUIRE(run_cli("simulate --drift 0,-0.5,0 --d2 5e-5,0,0 --dt 1 --steps 12000 --seed 4 --out " +
                    dir + "/prices.csv") == 0);
    REQUIRE(run_cli("ingest --input " + dir + "/prices.csv --out " + dir + "/returns.csv") == 0);
    REQUIRE(fs::exists(base / "returns.csv.meta.json"));
    REQUIRE(run_cli("km --returns " + dir + "/returns.csv --bins 40 --out " + dir) == 0);
    REQUIRE(fs::exists(base / "km_fits.json"));
    REQUIRE(run_cli("rolling --returns " + dir + "/returns.csv --window 1000 --step 50 "
                    "--bins 30:50:10 --r2 0.2 --diffusion-constant-term --out " + dir) == 0);
    REQUIRE(fs::exists(base / "track.csv"));
    REQUIRE(run_cli("breaks --track " + dir + "/track.csv --n-bkps 2 --bin-months 24 --out " +
                    dir) == 0);
    REQUIRE(fs::exists(base / "density.csv"));

    SUBCASE("re-running the breaks stage from the cached track is byte-identical") {
        const std::string first = slurp(base / "breaks.json");
        fs::remove(base / "breaks.json");
        REQUIRE(run_cli("breaks --track " + dir + "/track.csv --n-bkps 2 --bin-months 24 --out " +
                        dir) == 0);
        CHECK(slurp(base / "breaks.json") == first);
    }
}

TEST_CASE("cli: run twice produces byte-identical manifests") {
    const fs::path base = fs::temp_directory_path() / "dd_cli_run";
    fs::remove_all(base);
    fs::create_directories(base);
    const std::string dir = base.string();
    write_two_regime_prices(base / "prices.csv", nullptr);

    const std::string config = dir + "/config.json";
    write_text_file(config, R"({
      "input": ")" + dir + R"(/prices.csv",
      "km_bins": 30,
      "rolling": {"window_length": 1000, "step": 20, "bin_counts": [30, 40],
                   "r2_threshold": 0.2, "diffusion_constant_term": true},
      "segmentation": {"n_breakpoints": 2},
      "density_bin_months": 60
    })");
    REQUIRE(run_cli("run --config " + config + " --out-dir " + dir + "/out1") == 0);
    REQUIRE(run_cli("run --config " + config + " --out-dir " + dir + "/out2") == 0);
    CHECK(slurp(base / "out1" / "manifest.json") == slurp(base / "out2" / "manifest.json"));
}

TEST_CASE("cli: a failing stage reports its name and exits nonzero") {
    const fs::path base = fs::temp_directory_path() / "dd_cli_fail";
    fs::remove_all(base);
    fs::create_directories(base);
    write_text_file((base / "bad.csv").string(), "date,price\n2020-01-01,100\n2020-01-02,-5\n");
    const char* bin = std::getenv("DRIFTDIFF_BIN");
    REQUIRE(bin != nullptr);
    const std::string command = std::string(bin) + " run --input " + (base / "bad.csv").string() +
                                " --out-dir " + (base / "out").string() + " 2>" +
                                (base / "err.txt").string() + " >/dev/null";
    CHECK(std::system(command.c_str()) != 0);
    const std::string err = slurp(base / "err.txt");
    CHECK(err.find("ingest") != std::string::npos);
    CHECK(fs::exists(base / "out" / "manifest.json"));  // partial manifest
}

}  // TEST_SUITE
