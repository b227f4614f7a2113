#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "isac/scenario.hpp"

namespace isac {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json target_to_json(const SensingScenario& s, const TargetState& t) {
    ordered_json j;
    j["range_m"] = t.range_m;
    j["radial_velocity_mps"] = t.radial_velocity_mps;
    if (s.mode == Mode::Adtr) {
        j["elevation_deg"] = t.far_field().elevation_deg;
        j["azimuth_deg"] = t.far_field().azimuth_deg;
    } else {
        j["angle_deg"] = t.bearing().angle_deg;
    }
    if (t.gain_db) j["gain_db"] = *t.gain_db;
    if (t.rcs_m2) j["rcs_m2"] = *t.rcs_m2;
    return j;
}

TargetState target_from_json(Mode mode, const ordered_json& j) {
    TargetState t;
    t.range_m = j.at("range_m").get<double>();
    t.radial_velocity_mps = j.value("radial_velocity_mps", 0.0);
    if (mode == Mode::Adtr) {
        FarFieldDirection d;
        d.elevation_deg = j.at("elevation_deg").get<double>();
        d.azimuth_deg = j.at("azimuth_deg").get<double>();
        t.direction = d;
    } else {
        t.direction = PlanarBearing{j.at("angle_deg").get<double>()};
    }
    if (j.contains("gain_db")) t.gain_db = j.at("gain_db").get<double>();
    if (j.contains("rcs_m2")) t.rcs_m2 = j.at("rcs_m2").get<double>();
    return t;
}

} // namespace

std::string scenario_to_json(const SensingScenario& s) {
    ordered_json j;
    j["mode"] = mode_name(s.mode);

    ordered_json arr;
    if (s.array.kind == ArrayLayout::Kind::Upa) {
        arr["layout"] = "upa";
        arr["rows"] = s.array.rows;
        arr["cols"] = s.array.cols;
    } else {
        arr["layout"] = "split_ula";
        arr["count"] = s.array.count;
        arr["tx_count"] = s.array.tx_count;
    }
    arr["spacing_wl"] = s.array.spacing_wl;
    j["array"] = arr;

    ordered_json sweep;
    sweep["carrier_hz"] = s.carrier_hz;
    sweep["bandwidth_hz"] = s.bandwidth_hz;
    sweep["n_freq"] = s.n_freq;
    sweep["n_time"] = s.n_time;
    j["sweep"] = sweep;

    if (s.quantization.ideal) {
        j["quantization"] = "ideal";
    } else {
        ordered_json q;
        q["phase_bits"] = s.quantization.phase_bits;
        q["amp_step_db"] = s.quantization.amp_step_db;
        j["quantization"] = q;
    }

    if (s.noise.snr_db) {
        ordered_json n;
        n["snr_db"] = *s.noise.snr_db;
        n["seed"] = s.noise.seed;
        j["noise"] = n;
    }
    if (s.range_migration) j["range_migration"] = true;

    ordered_json snaps = ordered_json::array();
    for (const Snapshot& snap : s.snapshots) {
        ordered_json sj;
        sj["label"] = snap.label;
        ordered_json targets = ordered_json::array();
        for (const TargetState& t : snap.targets) targets.push_back(target_to_json(s, t));
        sj["targets"] = targets;
        snaps.push_back(sj);
    }
    j["snapshots"] = snaps;

    return j.dump(2) + "\n";
}

SensingScenario scenario_from_json(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    SensingScenario s;
    s.mode = mode_from_name(j.at("mode").get<std::string>());

    const ordered_json& arr = j.at("array");
    const std::string layout = arr.at("layout").get<std::string>();
    if (layout == "upa") {
        s.array.kind = ArrayLayout::Kind::Upa;
        s.array.rows = arr.at("rows").get<std::size_t>();
        s.array.cols = arr.at("cols").get<std::size_t>();
    } else if (layout == "split_ula") {
        s.array.kind = ArrayLayout::Kind::Ula;
        s.array.count = arr.at("count").get<std::size_t>();
        s.array.tx_count = arr.at("tx_count").get<std::size_t>();
    } else {
        throw std::invalid_argument("unknown array layout: " + layout);
    }
    s.array.spacing_wl = arr.at("spacing_wl").get<double>();

    const ordered_json& sweep = j.at("sweep");
    s.carrier_hz = sweep.at("carrier_hz").get<double>();
    s.bandwidth_hz = sweep.at("bandwidth_hz").get<double>();
    s.n_freq = sweep.at("n_freq").get<std::size_t>();
    s.n_time = sweep.at("n_time").get<std::size_t>();

    if (j.contains("quantization")) {
        const ordered_json& q = j.at("quantization");
        if (q.is_string() && q.get<std::string>() == "ideal") {
            s.quantization.ideal = true;
        } else if (q.is_object()) {
            s.quantization.ideal = false;
            s.quantization.phase_bits = q.at("phase_bits").get<int>();
            s.quantization.amp_step_db = q.value("amp_step_db", 0.0);
        } else {
            throw std::invalid_argument("quantization must be \"ideal\" or an object");
        }
    }

    if (j.contains("noise") && !j.at("noise").is_null()) {
        const ordered_json& n = j.at("noise");
        s.noise.snr_db = n.at("snr_db").get<double>();
        s.noise.seed = n.value("seed", std::uint64_t{0});
    }
    s.range_migration = j.value("range_migration", false);

    for (const ordered_json& sj : j.at("snapshots")) {
        Snapshot snap;
        snap.label = sj.at("label").get<std::string>();
        for (const ordered_json& tj : sj.at("targets"))
            snap.targets.push_back(target_from_json(s.mode, tj));
        s.snapshots.push_back(std::move(snap));
    }
    return s;
}

SensingScenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_json(buf.str());
}

void save_scenario(const SensingScenario& s, const std::filesystem::path& path) {
    const std::string text = scenario_to_json(s);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write scenario file: " + path.string());
        out << text;
    }
    std::filesystem::rename(tmp, path);
}

} // namespace isac
