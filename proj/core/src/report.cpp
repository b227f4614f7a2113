#include "isac/report.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace isac {

using ordered_json = nlohmann::ordered_json;

std::string fnv1a_digest(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream out;
    out << "fnv1a:" << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

ToleranceTable tolerances_from_json(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    ToleranceTable t;
    t.range_m = j.value("range_m", t.range_m);
    t.velocity_mps = j.value("velocity_mps", t.velocity_mps);
    t.elevation_deg = j.value("elevation_deg", t.elevation_deg);
    t.azimuth_deg = j.value("azimuth_deg", t.azimuth_deg);
    t.power_db = j.value("power_db", t.power_db);
    t.satr_range_m = j.value("satr_range_m", t.satr_range_m);
    t.satr_angle_deg = j.value("satr_angle_deg", t.satr_angle_deg);
    return t;
}

ToleranceTable load_tolerances(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open tolerance file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return tolerances_from_json(buf.str());
}

std::size_t RunReport::check_count() const {
    std::size_t n = 0;
    for (const auto& s : snapshots)
        for (const auto& t : s.targets)
            for (const auto& c : t.checks)
                if (c.estimable) ++n;
    return n;
}

std::size_t RunReport::pass_count() const {
    std::size_t n = 0;
    for (const auto& s : snapshots)
        for (const auto& t : s.targets)
            for (const auto& c : t.checks)
                if (c.estimable && c.pass) ++n;
    return n;
}

bool RunReport::all_pass() const { return pass_count() == check_count(); }

double RunReport::worst_power_error_db() const {
    double worst = 0.0;
    for (const auto& s : snapshots)
        for (const auto& t : s.targets)
            for (const auto& c : t.checks)
                if (c.estimable && c.parameter == "power_db")
                    worst = std::max(worst, c.abs_error);
    return worst;
}

std::string report_to_json(const RunReport& r) {
    ordered_json j;
    j["schema_version"] = r.schema_version;
    j["tool_version"] = r.tool_version;
    j["scenario_digest"] = r.scenario_digest;
    if (r.quantization.ideal) {
        j["quantization"] = "ideal";
    } else {
        j["quantization"] = ordered_json{{"phase_bits", r.quantization.phase_bits},
                                         {"amp_step_db", r.quantization.amp_step_db}};
    }
    j["runtime_seconds"] = r.runtime_seconds;
    j["summary"] = ordered_json{{"pass_count", r.pass_count()},
                                {"check_count", r.check_count()},
                                {"all_pass", r.all_pass()},
                                {"worst_power_error_db", r.worst_power_error_db()},
                                {"rts_units_used", r.rts_units_used}};

    ordered_json snaps = ordered_json::array();
    for (const SnapshotReport& s : r.snapshots) {
        ordered_json sj;
        sj["label"] = s.label;
        ordered_json targets = ordered_json::array();
        for (const TargetReport& t : s.targets) {
            ordered_json tj;
            tj["index"] = t.target_index;
            ordered_json checks = ordered_json::array();
            for (const ParameterCheck& c : t.checks) {
                checks.push_back(ordered_json{{"parameter", c.parameter},
                                              {"target", c.target},
                                              {"estimated", c.estimated},
                                              {"abs_error", c.abs_error},
                                              {"tolerance", c.tolerance},
                                              {"pass", c.pass},
                                              {"estimable", c.estimable}});
            }
            tj["checks"] = checks;
            targets.push_back(tj);
        }
        sj["targets"] = targets;
        snaps.push_back(sj);
    }
    j["snapshots"] = snaps;
    return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    RunReport r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion)
        throw std::runtime_error("unsupported report schema version " +
                                 std::to_string(r.schema_version));
    r.tool_version = j.at("tool_version").get<std::string>();
    r.scenario_digest = j.value("scenario_digest", "");
    const ordered_json& q = j.at("quantization");
    if (q.is_string()) {
        r.quantization.ideal = true;
    } else {
        r.quantization.ideal = false;
        r.quantization.phase_bits = q.at("phase_bits").get<int>();
        r.quantization.amp_step_db = q.at("amp_step_db").get<double>();
    }
    r.runtime_seconds = j.value("runtime_seconds", 0.0);
    r.rts_units_used = j.at("summary").value("rts_units_used", std::size_t{0});

    for (const ordered_json& sj : j.at("snapshots")) {
        SnapshotReport s;
        s.label = sj.at("label").get<std::string>();
        for (const ordered_json& tj : sj.at("targets")) {
            TargetReport t;
            t.target_index = tj.at("index").get<std::size_t>();
            for (const ordered_json& cj : tj.at("checks")) {
                ParameterCheck c;
                c.parameter = cj.at("parameter").get<std::string>();
                c.target = cj.at("target").get<double>();
                c.estimated = cj.at("estimated").get<double>();
                c.abs_error = cj.at("abs_error").get<double>();
                c.tolerance = cj.at("tolerance").get<double>();
                c.pass = cj.at("pass").get<bool>();
                c.estimable = cj.at("estimable").get<bool>();
                t.checks.push_back(c);
            }
            s.targets.push_back(std::move(t));
        }
        r.snapshots.push_back(std::move(s));
    }
    return r;
}

void save_report(const RunReport& r, const std::filesystem::path& path) {
    const std::string text = report_to_json(r);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write report: " + path.string());
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

RunReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open report: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return report_from_json(buf.str());
}

namespace {

std::string fmt(double v, int prec = 3) {
    if (!std::isfinite(v)) return "n/a";
    std::ostringstream out;
    out << std::fixed << std::setprecision(prec) << v;
    return out.str();
}

} // namespace

std::string render_report_table(const RunReport& r) {
    std::ostringstream out;
    out << "run report  schema " << r.schema_version << "  tool " << r.tool_version << "\n";
    out << "scenario digest: " << r.scenario_digest << "\n";
    if (r.quantization.ideal)
        out << "quantization: ideal\n";
    else
        out << "quantization: " << r.quantization.phase_bits << "-bit phase, "
            << r.quantization.amp_step_db << " dB amplitude step\n";
    out << "checks: " << r.pass_count() << "/" << r.check_count()
        << " passed, worst power error " << fmt(r.worst_power_error_db()) << " dB, runtime "
        << fmt(r.runtime_seconds, 2) << " s\n\n";

    // Locate the worst power-error row to flag it in the table.
    const double worst = r.worst_power_error_db();

    const int name_w = 22, col_w = 11;
    out << std::left << std::setw(8) << "target" << std::setw(name_w) << "parameter";
    for (const SnapshotReport& s : r.snapshots)
        out << "| " << std::setw(2 * col_w + 8) << (s.label + " (target / est)");
    out << "\n";
    out << std::string(8 + name_w + r.snapshots.size() * (2 * col_w + 10), '-') << "\n";

    if (r.snapshots.empty()) return out.str();

    const std::size_t n_targets = r.snapshots.front().targets.size();
    for (std::size_t t = 0; t < n_targets; ++t) {
        const auto& params = r.snapshots.front().targets[t].checks;
        for (std::size_t p = 0; p < params.size(); ++p) {
            out << std::left << std::setw(8) << (t + 1) << std::setw(name_w)
                << params[p].parameter;
            bool flag_fail = false, flag_worst = false;
            for (const SnapshotReport& s : r.snapshots) {
                const ParameterCheck& c = s.targets.at(t).checks.at(p);
                out << "| " << std::right << std::setw(col_w) << fmt(c.target) << " / "
                    << std::setw(col_w)
                    << (c.estimable ? fmt(c.estimated) : std::string("not estimable")) << "  ";
                if (c.estimable && !c.pass) flag_fail = true;
                if (c.estimable && c.parameter == "power_db" && worst > 0.0 &&
                    c.abs_error == worst)
                    flag_worst = true;
            }
            if (flag_fail) out << " FAIL";
            if (flag_worst) out << " *worst power error";
            out << "\n";
        }
    }
    return out.str();
}

} // namespace isac
