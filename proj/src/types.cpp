#include "cfmimo/types.hpp"

#include <cmath>
#include <stdexcept>

namespace cfmimo {

namespace {
constexpr double kBoltzmann = 1.380649e-23;
constexpr double kNoiseTempK = 290.0;

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("SystemConfig: ") + what);
}
}  // namespace

void validate(const SystemConfig& cfg) {
    require(cfg.M >= 1, "M must be >= 1");
    require(cfg.N >= 1, "N must be >= 1");
    require(cfg.K >= 1, "K must be >= 1");
    require(cfg.area_side_km > 0, "area_side_km must be > 0");
    require(cfg.tau_p >= 1, "tau_p must be >= 1");
    require(cfg.carrier_freq_hz > 0, "carrier_freq_hz must be > 0");
    require(cfg.bandwidth_hz > 0, "bandwidth_hz must be > 0");
    require(cfg.ap_height_m > 0, "ap_height_m must be > 0");
    require(cfg.ue_height_m > 0, "ue_height_m must be > 0");
    require(cfg.shadow_std_db >= 0, "shadow_std_db must be >= 0");
    require(cfg.tx_power_pilot_w > 0, "tx_power_pilot_w must be > 0");
    require(cfg.tx_power_uplink_w > 0, "tx_power_uplink_w must be > 0");
    require(cfg.pathloss_d0_km > 0, "pathloss_d0_km must be > 0");
    require(cfg.pathloss_d1_km > cfg.pathloss_d0_km, "pathloss_d1_km must exceed pathloss_d0_km");
    if (cfg.pilot_mode == PilotMode::orthogonal)
        require(cfg.tau_p >= cfg.K, "orthogonal pilots need tau_p >= K");
}

double noise_power_w(const SystemConfig& cfg) {
    return kBoltzmann * kNoiseTempK * cfg.bandwidth_hz *
           std::pow(10.0, cfg.noise_figure_db / 10.0);
}

double normalized_snr_pilot(const SystemConfig& cfg) {
    return cfg.tx_power_pilot_w / noise_power_w(cfg);
}

double normalized_snr_uplink(const SystemConfig& cfg) {
    return cfg.tx_power_uplink_w / noise_power_w(cfg);
}

std::string to_string(PilotMode mode) {
    return mode == PilotMode::orthogonal ? "orthogonal" : "random_contaminated";
}

}  // namespace cfmimo
