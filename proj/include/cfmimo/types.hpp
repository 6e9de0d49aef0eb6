#pragma once

#include <string>

namespace cfmimo {

enum class PilotMode { orthogonal, random_contaminated };

/// Scalar system parameters. Distances in km, powers in W, frequencies in Hz.
struct SystemConfig {
    int M = 0;  ///< number of access points
    int N = 1;  ///< antennas per AP
    int K = 0;  ///< number of single-antenna users

    double area_side_km = 1.0;
    int tau_p = 0;  ///< pilot length in samples

    double carrier_freq_hz = 1.9e9;
    double bandwidth_hz = 20e6;
    double noise_figure_db = 9.0;
    double ap_height_m = 15.0;
    double ue_height_m = 1.65;
    double shadow_std_db = 8.0;
    double tx_power_pilot_w = 0.1;   ///< rho_bar_p
    double tx_power_uplink_w = 0.1;  ///< rho_bar_u

    PilotMode pilot_mode = PilotMode::orthogonal;

    /// All APs placed at the square centre and large-scale fading shared
    /// across APs (single-site collocated massive MIMO).
    bool collocated = false;

    // Three-slope breakpoints; overridable so the path-loss lineage is testable.
    double pathloss_d0_km = 0.010;
    double pathloss_d1_km = 0.050;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const SystemConfig& cfg);

/// k_B * 290 K * bandwidth * noise figure (linear).
double noise_power_w(const SystemConfig& cfg);

double normalized_snr_pilot(const SystemConfig& cfg);   ///< rho_p
double normalized_snr_uplink(const SystemConfig& cfg);  ///< rho_u

std::string to_string(PilotMode mode);

}  // namespace cfmimo
