// Command-line front end: compile | synthesize | estimate | run | report.
//
// Exit codes:
//   0  success (run: every tolerance check passed)
//   1  tolerance failure in a run report
//   2  scenario validation failure
//   3  parse error (scenario / tolerance / report JSON)
//   4  I/O error
//   5  dataset format error
//   6  usage error or dataset/scenario mode mismatch

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "isac/dataset.hpp"
#include "isac/emulation.hpp"
#include "isac/estimation.hpp"
#include "isac/heatmap_io.hpp"
#include "isac/pipeline.hpp"
#include "isac/report.hpp"
#include "isac/scenario.hpp"
#include "isac/synthesis.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitToleranceFail = 1;
constexpr int kExitValidation = 2;
constexpr int kExitParse = 3;
constexpr int kExitIo = 4;
constexpr int kExitFormat = 5;
constexpr int kExitUsage = 6;

struct CommonFlags {
    std::string scenario_path;
    std::string out_dir;
    std::optional<std::size_t> nt;
    std::optional<std::size_t> nf;
    std::optional<int> phase_bits;
    std::optional<double> amp_step_db;
    bool ideal = false;
    std::optional<double> noise_snr_db;
    std::optional<std::uint64_t> seed;
    std::size_t pad = 4;
    std::optional<std::string> window;
    std::string tolerances_path;
};

void add_quant_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--phase-bits", f.phase_bits, "override APM phase quantization bits");
    cmd->add_option("--amp-step-db", f.amp_step_db, "override APM amplitude step (dB, 0 = continuous)");
    cmd->add_flag("--ideal", f.ideal, "disable APM quantization");
}

void add_sweep_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--nt", f.nt, "override the number of CIR time steps");
    cmd->add_option("--nf", f.nf, "override the number of frequency points");
}

void add_noise_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--noise-snr-db", f.noise_snr_db, "add complex white noise at this SNR");
    cmd->add_option("--seed", f.seed, "noise RNG seed");
}

void apply_overrides(isac::SensingScenario& s, const CommonFlags& f) {
    if (f.nt) {
        if (*f.nt < 1) throw std::invalid_argument("--nt must be >= 1");
        s.n_time = *f.nt;
    }
    if (f.nf) {
        if (*f.nf < 2) throw std::invalid_argument("--nf must be >= 2");
        s.n_freq = *f.nf;
    }
    if (f.ideal) s.quantization.ideal = true;
    if (f.phase_bits) {
        s.quantization.ideal = false;
        s.quantization.phase_bits = *f.phase_bits;
    }
    if (f.amp_step_db) {
        s.quantization.ideal = false;
        s.quantization.amp_step_db = *f.amp_step_db;
    }
    if (f.noise_snr_db) s.noise.snr_db = *f.noise_snr_db;
    if (f.seed) s.noise.seed = *f.seed;
}

isac::EstimationOptions estimation_options(const isac::SensingScenario& s, const CommonFlags& f) {
    isac::EstimationOptions opt;
    opt.pad_time = f.pad;
    opt.pad_freq = f.pad;
    if (f.window) {
        const isac::Window w = isac::window_from_name(*f.window);
        if (s.mode == isac::Mode::Adtr)
            opt.adtr_window = w;
        else
            opt.satr_window = w;
    }
    return opt;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int check_validation(const isac::SensingScenario& s) {
    const auto violations = isac::validate_scenario(s);
    if (violations.empty()) return kExitOk;
    std::cerr << "scenario validation failed:\n";
    for (const auto& v : violations) std::cerr << "  " << v.path << ": " << v.message << "\n";
    return kExitValidation;
}

void write_detected_targets(const fs::path& path, const std::string& label, isac::Mode mode,
                            const isac::SnapshotEstimate& est) {
    double peak = 0.0;
    for (const auto& t : est.targets) peak = std::max(peak, t.peak_power_linear);

    nlohmann::ordered_json j;
    j["label"] = label;
    j["mode"] = isac::mode_name(mode);
    j["truncated"] = est.truncated;
    nlohmann::ordered_json targets = nlohmann::ordered_json::array();
    for (const auto& t : est.targets) {
        nlohmann::ordered_json tj;
        tj["range_m"] = t.range_m;
        if (t.velocity_mps)
            tj["velocity_mps"] = *t.velocity_mps;
        else
            tj["velocity_mps"] = nullptr;
        if (mode == isac::Mode::Adtr) {
            tj["elevation_deg"] = t.elevation_deg ? nlohmann::ordered_json(*t.elevation_deg)
                                                  : nlohmann::ordered_json(nullptr);
            tj["azimuth_deg"] = t.azimuth_deg ? nlohmann::ordered_json(*t.azimuth_deg)
                                              : nlohmann::ordered_json(nullptr);
        } else {
            tj["angle_deg"] = t.azimuth_deg ? nlohmann::ordered_json(*t.azimuth_deg)
                                            : nlohmann::ordered_json(nullptr);
        }
        tj["power_db"] = peak > 0.0 && t.peak_power_linear > 0.0
                             ? 10.0 * std::log10(t.peak_power_linear / peak)
                             : -std::numeric_limits<double>::infinity();
        targets.push_back(tj);
    }
    j["targets"] = targets;

    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << j.dump(2) << "\n";
    }
    fs::rename(tmp, path);
}

int cmd_compile(const CommonFlags& f) {
    isac::SensingScenario s = isac::load_scenario(f.scenario_path);
    apply_overrides(s, f);
    if (const int rc = check_validation(s); rc != kExitOk) return rc;

    fs::create_directories(f.out_dir);
    for (const isac::Snapshot& snap : s.snapshots) {
        const isac::CompiledSnapshot cs = isac::compile_snapshot(s, snap);
        const fs::path path = fs::path(f.out_dir) / (snap.label + ".config.json");
        isac::write_config_bundle(cs, path);
        std::cout << "wrote " << path.string() << " (" << cs.units.size() << " RTS units)\n";
    }
    return kExitOk;
}

int cmd_synthesize(const CommonFlags& f) {
    isac::SensingScenario s = isac::load_scenario(f.scenario_path);
    apply_overrides(s, f);
    if (const int rc = check_validation(s); rc != kExitOk) return rc;

    fs::create_directories(f.out_dir);
    std::size_t done = 0;
    for (const isac::Snapshot& snap : s.snapshots) {
        std::cerr << "synthesizing " << snap.label << " (" << ++done << "/" << s.snapshots.size()
                  << ", " << s.n_time << "x" << s.n_freq << ")...\n";
        const isac::CompiledSnapshot cs = isac::compile_snapshot(s, snap);
        const isac::CfrDataset ds = isac::synthesize_snapshot(s, cs);
        const fs::path path = fs::path(f.out_dir) / (snap.label + ".cfr");
        isac::write_dataset(ds, path);
        std::cout << "wrote " << path.string() << " (" << ds.samples.size() << " samples)\n";
    }
    return kExitOk;
}

int cmd_estimate(const std::string& dataset_path, const CommonFlags& f) {
    const isac::CfrDataset ds = isac::read_dataset(dataset_path);
    isac::SensingScenario s = isac::load_scenario(f.scenario_path);
    apply_overrides(s, f);
    if (ds.mode != s.mode) {
        std::cerr << "mode mismatch: dataset is " << isac::mode_name(ds.mode) << ", scenario is "
                  << isac::mode_name(s.mode) << "\n";
        return kExitUsage;
    }

    const isac::ArrayGeometry geom = s.make_geometry();
    const isac::EstimationOptions opt = estimation_options(s, f);
    const std::size_t n_targets = s.snapshots.empty() ? 1 : s.snapshots.front().targets.size();
    fs::create_directories(f.out_dir);

    if (s.mode == isac::Mode::Adtr) {
        std::vector<isac::FarFieldDirection> priors;
        if (!s.snapshots.empty())
            for (const isac::TargetState& t : s.snapshots.front().targets)
                priors.push_back(t.far_field());
        const isac::SnapshotEstimate est =
            isac::estimate_adtr_snapshot(ds, geom, n_targets, opt, /*keep_pas=*/true, &priors);
        const std::string label = est.label.empty() ? "snapshot" : est.label;

        const isac::RangeVelocityMap rv =
            isac::range_velocity_map(ds, opt.port, opt.pad_time, opt.pad_freq, opt.adtr_window);
        isac::write_heatmap_csv(fs::path(f.out_dir) / ("rv_" + label + ".csv"), "velocity_mps",
                                rv.velocity_axis, "range_m", rv.range_axis, rv.power_db);
        isac::write_heatmap_pgm(fs::path(f.out_dir) / ("rv_" + label + ".pgm"), rv.rows(),
                                rv.cols(), rv.power_db);

        const auto elev = opt.elevation_grid();
        const auto azim = opt.azimuth_grid();
        for (std::size_t n = 0; n < est.targets.size(); ++n) {
            const auto& t = est.targets[n];
            if (t.pas_db.empty()) continue;
            const std::string stem = "pas_" + label + "_target" + std::to_string(n);
            isac::write_heatmap_csv(fs::path(f.out_dir) / (stem + ".csv"), "elevation_deg", elev,
                                    "azimuth_deg", azim, t.pas_db);
            isac::write_heatmap_pgm(fs::path(f.out_dir) / (stem + ".pgm"), elev.size(),
                                    azim.size(), t.pas_db);
        }
        write_detected_targets(fs::path(f.out_dir) / ("targets_" + label + ".json"), label,
                               s.mode, est);
        std::cout << "estimated " << est.targets.size() << " target(s); outputs in " << f.out_dir
                  << "\n";
    } else {
        const isac::RangeAngleMap map = isac::joint_range_angle_satr(
            ds, geom, opt.satr_range_grid(), opt.satr_angle_grid(), opt.satr_window);
        const isac::SnapshotEstimate est = isac::estimate_satr_snapshot(ds, geom, n_targets, opt);
        std::string label = "snapshot";
        if (!s.snapshots.empty()) label = s.snapshots.front().label;

        isac::write_heatmap_csv(fs::path(f.out_dir) / ("range_angle_" + label + ".csv"),
                                "range_m", map.range_axis_m, "angle_deg", map.angle_axis_deg,
                                map.power_db);
        isac::write_heatmap_pgm(fs::path(f.out_dir) / ("range_angle_" + label + ".pgm"),
                                map.range_axis_m.size(), map.angle_axis_deg.size(), map.power_db);
        write_detected_targets(fs::path(f.out_dir) / ("targets_" + label + ".json"), label,
                               s.mode, est);
        std::cout << "peak at range " << map.peak.range_m << " m, angle " << *map.peak.azimuth_deg
                  << " deg; outputs in " << f.out_dir << "\n";
    }
    return kExitOk;
}

int cmd_run(const CommonFlags& f) {
    const std::string scenario_bytes = read_file(f.scenario_path);
    isac::SensingScenario s = isac::scenario_from_json(scenario_bytes);
    apply_overrides(s, f);
    if (const int rc = check_validation(s); rc != kExitOk) return rc;

    isac::RunOptions opt;
    opt.est = estimation_options(s, f);
    if (!f.tolerances_path.empty()) opt.tolerances = isac::load_tolerances(f.tolerances_path);

    const isac::RunResult result =
        isac::run_scenario(s, opt, isac::fnv1a_digest(scenario_bytes));

    fs::create_directories(f.out_dir);
    isac::save_report(result.report, fs::path(f.out_dir) / "report.json");
    {
        const fs::path txt = fs::path(f.out_dir) / "report.txt";
        const fs::path tmp = txt.string() + ".tmp";
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << isac::render_report_table(result.report);
        out.close();
        fs::rename(tmp, txt);
    }
    std::cout << isac::render_report_table(result.report);
    return result.report.all_pass() ? kExitOk : kExitToleranceFail;
}

int cmd_report(const std::string& report_path) {
    const isac::RunReport r = isac::load_report(report_path);
    std::cout << isac::render_report_table(r);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"conductive multi-target emulation workbench for ISAC base-station sensing"};
    app.set_version_flag("--version", isac::kToolVersion);
    app.require_subcommand(1);

    CommonFlags f;
    std::string dataset_path;
    std::string report_path;

    CLI::App* compile = app.add_subcommand("compile", "compile a scenario into APM + RTS configs");
    compile->add_option("--scenario", f.scenario_path, "scenario file")->required();
    compile->add_option("--out", f.out_dir, "output directory")->required();
    add_quant_flags(compile, f);

    CLI::App* synthesize = app.add_subcommand("synthesize", "synthesize CFR datasets");
    synthesize->add_option("--scenario", f.scenario_path, "scenario file")->required();
    synthesize->add_option("--out", f.out_dir, "output directory")->required();
    add_sweep_flags(synthesize, f);
    add_quant_flags(synthesize, f);
    add_noise_flags(synthesize, f);

    CLI::App* estimate = app.add_subcommand("estimate", "estimate targets from a dataset");
    estimate->add_option("--dataset", dataset_path, "CFR dataset file")->required();
    estimate->add_option("--scenario", f.scenario_path, "scenario file (geometry + defaults)")
        ->required();
    estimate->add_option("--out", f.out_dir, "output directory")->required();
    estimate->add_option("--pad", f.pad, "zero-padding factor for both transform axes");
    estimate->add_option("--window", f.window, "none | hanning");

    CLI::App* run = app.add_subcommand("run", "full compile/synthesize/estimate/compare run");
    run->add_option("--scenario", f.scenario_path, "scenario file")->required();
    run->add_option("--out", f.out_dir, "output directory")->required();
    run->add_option("--tolerances", f.tolerances_path, "tolerance table JSON");
    run->add_option("--pad", f.pad, "zero-padding factor for both transform axes");
    run->add_option("--window", f.window, "none | hanning");
    add_sweep_flags(run, f);
    add_quant_flags(run, f);
    add_noise_flags(run, f);

    CLI::App* report = app.add_subcommand("report", "render a saved run report");
    report->add_option("--report", report_path, "report JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (compile->parsed()) return cmd_compile(f);
        if (synthesize->parsed()) return cmd_synthesize(f);
        if (estimate->parsed()) return cmd_estimate(dataset_path, f);
        if (run->parsed()) return cmd_run(f);
        if (report->parsed()) return cmd_report(report_path);
    } catch (const isac::FormatError& e) {
        std::cerr << "dataset format error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
