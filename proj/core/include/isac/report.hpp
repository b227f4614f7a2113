#ifndef ISAC_REPORT_HPP
#define ISAC_REPORT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "isac/scenario.hpp"

namespace isac {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

// Per-parameter tolerances used by the run pipeline. Defaults are the scaled
// 40 MHz chain: half an unpadded range bin, the angle grid steps, and the
// 1 dB power budget.
struct ToleranceTable {
    double range_m = 1.9;
    double velocity_mps = 0.25;
    double elevation_deg = 1.0;
    double azimuth_deg = 1.0;
    double power_db = 1.0;
    double satr_range_m = 0.02;
    double satr_angle_deg = 0.25;
};

ToleranceTable tolerances_from_json(const std::string& text);
ToleranceTable load_tolerances(const std::filesystem::path& path);

struct ParameterCheck {
    std::string parameter; // "range_m", "velocity_mps", ...
    double target = 0.0;
    double estimated = 0.0;
    double abs_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool estimable = true; // false rows are excluded from the verdict
};

struct TargetReport {
    std::size_t target_index = 0;
    std::vector<ParameterCheck> checks;
};

struct SnapshotReport {
    std::string label;
    std::vector<TargetReport> targets;
};

struct RunReport {
    int schema_version = kReportSchemaVersion;
    std::string tool_version = kToolVersion;
    std::string scenario_digest; // fnv1a64 of the scenario file bytes
    Quantization quantization;
    double runtime_seconds = 0.0;
    std::size_t rts_units_used = 0;
    std::vector<SnapshotReport> snapshots;

    std::size_t check_count() const;
    std::size_t pass_count() const;
    bool all_pass() const;
    double worst_power_error_db() const;
};

std::string report_to_json(const RunReport& r);
RunReport report_from_json(const std::string& text);
void save_report(const RunReport& r, const std::filesystem::path& path);
RunReport load_report(const std::filesystem::path& path);

// Aligned text table, one parameter row per target with target/estimated
// columns per snapshot; the worst-error row is flagged.
std::string render_report_table(const RunReport& r);

// FNV-1a 64-bit content digest, hex encoded.
std::string fnv1a_digest(const std::string& bytes);

} // namespace isac

#endif
