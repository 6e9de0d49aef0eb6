#include "cfmimo/pathloss.hpp"

#include <cmath>

namespace cfmimo {

double cost231_constant_db(const SystemConfig& cfg) {
    const double lf = std::log10(cfg.carrier_freq_hz / 1e6);
    return 46.3 + 33.9 * lf - 13.82 * std::log10(cfg.ap_height_m) -
           (1.1 * lf - 0.7) * cfg.ue_height_m + (1.56 * lf - 0.8);
}

double three_slope_path_loss_db(double d_km, const SystemConfig& cfg) {
    const double L = cost231_constant_db(cfg);
    const double d0 = cfg.pathloss_d0_km;
    const double d1 = cfg.pathloss_d1_km;
    if (d_km > d1) return -L - 35.0 * std::log10(d_km);
    if (d_km > d0) return -L - 15.0 * std::log10(d1) - 20.0 * std::log10(d_km);
    return -L - 15.0 * std::log10(d1) - 20.0 * std::log10(d0);
}

}  // namespace cfmimo
