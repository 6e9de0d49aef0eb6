#include "cfmimo/config_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cfmimo {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
    if (v == "-inf") return -std::numeric_limits<double>::infinity();
    size_t pos = 0;
    double d;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': bad number '" + v + "'");
    }
    if (pos != v.size())
        throw std::invalid_argument("config key '" + key + "': bad number '" + v + "'");
    return d;
}

long long parse_int(const std::string& key, const std::string& v) {
    size_t pos = 0;
    long long d;
    try {
        d = std::stoll(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': bad integer '" + v + "'");
    }
    if (pos != v.size())
        throw std::invalid_argument("config key '" + key + "': bad integer '" + v + "'");
    return d;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config key '" + key + "': bad boolean '" + v + "'");
}

}  // namespace

const std::map<std::string, std::string>& known_config_keys() {
    static const std::map<std::string, std::string> keys = {
        {"m", "number of APs"},
        {"n", "antennas per AP"},
        {"k", "number of users"},
        {"area_side_km", "side of the square deployment region"},
        {"tau_p", "pilot length in samples"},
        {"carrier_freq_hz", "carrier frequency"},
        {"bandwidth_hz", "bandwidth"},
        {"noise_figure_db", "receiver noise figure"},
        {"ap_height_m", "AP antenna height"},
        {"ue_height_m", "user antenna height"},
        {"shadow_std_db", "shadow-fading standard deviation"},
        {"tx_power_pilot_w", "pilot transmit power"},
        {"tx_power_uplink_w", "uplink transmit power"},
        {"pilot_mode", "orthogonal | random_contaminated"},
        {"collocated", "single-site collocated layout (true/false)"},
        {"pathloss_d0_km", "inner three-slope breakpoint"},
        {"pathloss_d1_km", "outer three-slope breakpoint"},
        {"sweep_axis", "none | k | m | threshold"},
        {"sweep_values", "comma-separated sweep values"},
        {"methods", "comma-separated: mc, lognormal, udr, mmimo_closed, exact_small"},
        {"mc_deployments", "number of random deployments"},
        {"mc_iters", "Monte-Carlo iterations per deployment"},
        {"master_seed", "seed for all RNG streams"},
        {"output_dir", "output directory"},
        {"thresholds_db", "comma-separated SINR thresholds in dB"},
        {"threads", "worker threads"},
        {"debug_dumps", "dump per-deployment geometry/estimation/moment CSVs"},
    };
    return keys;
}

std::map<std::string, std::string> parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!known_config_keys().count(key))
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": unknown config key '" + key + "'");
        kv[key] = value;
    }
    return kv;
}

void apply_env_overrides(std::map<std::string, std::string>& kv) {
    for (const auto& [key, desc] : known_config_keys()) {
        std::string env = "CFMIMO_";
        for (char ch : key) env += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        if (const char* v = std::getenv(env.c_str())) kv[key] = v;
    }
}

ExperimentSpec spec_from_kv(const std::map<std::string, std::string>& kv) {
    ExperimentSpec spec;
    for (const auto& [key, v] : kv) {
        if (!known_config_keys().count(key))
            throw std::invalid_argument("unknown config key '" + key + "'");
        auto& cfg = spec.base;
        if (key == "m") cfg.M = static_cast<int>(parse_int(key, v));
        else if (key == "n") cfg.N = static_cast<int>(parse_int(key, v));
        else if (key == "k") cfg.K = static_cast<int>(parse_int(key, v));
        else if (key == "area_side_km") cfg.area_side_km = parse_double(key, v);
        else if (key == "tau_p") cfg.tau_p = static_cast<int>(parse_int(key, v));
        else if (key == "carrier_freq_hz") cfg.carrier_freq_hz = parse_double(key, v);
        else if (key == "bandwidth_hz") cfg.bandwidth_hz = parse_double(key, v);
        else if (key == "noise_figure_db") cfg.noise_figure_db = parse_double(key, v);
        else if (key == "ap_height_m") cfg.ap_height_m = parse_double(key, v);
        else if (key == "ue_height_m") cfg.ue_height_m = parse_double(key, v);
        else if (key == "shadow_std_db") cfg.shadow_std_db = parse_double(key, v);
        else if (key == "tx_power_pilot_w") cfg.tx_power_pilot_w = parse_double(key, v);
        else if (key == "tx_power_uplink_w") cfg.tx_power_uplink_w = parse_double(key, v);
        else if (key == "pilot_mode") {
            if (v == "orthogonal") cfg.pilot_mode = PilotMode::orthogonal;
            else if (v == "random_contaminated") cfg.pilot_mode = PilotMode::random_contaminated;
            else throw std::invalid_argument("config key 'pilot_mode': unknown value '" + v + "'");
        } else if (key == "collocated") cfg.collocated = parse_bool(key, v);
        else if (key == "pathloss_d0_km") cfg.pathloss_d0_km = parse_double(key, v);
        else if (key == "pathloss_d1_km") cfg.pathloss_d1_km = parse_double(key, v);
        else if (key == "sweep_axis") {
            if (v == "none") spec.sweep_axis = SweepAxis::none;
            else if (v == "k") spec.sweep_axis = SweepAxis::K;
            else if (v == "m") spec.sweep_axis = SweepAxis::M;
            else if (v == "threshold") spec.sweep_axis = SweepAxis::threshold;
            else throw std::invalid_argument("config key 'sweep_axis': unknown value '" + v + "'");
        } else if (key == "sweep_values") {
            for (const auto& item : split_list(v))
                spec.sweep_values.push_back(parse_double(key, item));
        } else if (key == "methods") {
            for (const auto& item : split_list(v)) {
                const auto m = method_from_string(item);
                if (!m) throw std::invalid_argument("config key 'methods': unknown method '" +
                                                    item + "'");
                spec.methods.insert(*m);
            }
        } else if (key == "debug_dumps") spec.debug_dumps = parse_bool(key, v);
        else if (key == "mc_deployments") spec.mc_deployments = static_cast<int>(parse_int(key, v));
        else if (key == "mc_iters") spec.mc_iters = static_cast<int>(parse_int(key, v));
        else if (key == "master_seed") spec.master_seed = static_cast<std::uint64_t>(parse_int(key, v));
        else if (key == "output_dir") spec.output_dir = v;
        else if (key == "thresholds_db") {
            for (const auto& item : split_list(v))
                spec.thresholds_db.push_back(parse_double(key, item));
        } else if (key == "threads") spec.n_threads = static_cast<int>(parse_int(key, v));
    }
    return spec;
}

}  // namespace cfmimo
