#include "cfmimo/deployment.hpp"

#include <cmath>

#include "cfmimo/pathloss.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

Deployment generate_deployment(const SystemConfig& cfg, std::uint64_t seed) {
    validate(cfg);
    Rng rng(seed);
    const double D = cfg.area_side_km;

    Deployment dep;
    dep.ap_xy.resize(cfg.M, 2);
    if (cfg.collocated) {
        dep.ap_xy.col(0).setConstant(D / 2.0);
        dep.ap_xy.col(1).setConstant(D / 2.0);
    } else {
        for (int m = 0; m < cfg.M; ++m) {
            dep.ap_xy(m, 0) = rng.uniform01() * D;
            dep.ap_xy(m, 1) = rng.uniform01() * D;
        }
    }
    dep.ue_xy.resize(cfg.K, 2);
    for (int k = 0; k < cfg.K; ++k) {
        dep.ue_xy(k, 0) = rng.uniform01() * D;
        dep.ue_xy(k, 1) = rng.uniform01() * D;
    }

    dep.beta.resize(cfg.M, cfg.K);
    if (cfg.collocated) {
        // One shadowing draw per user keeps beta rows identical.
        for (int k = 0; k < cfg.K; ++k) {
            const double d = (dep.ap_xy.row(0) - dep.ue_xy.row(k)).norm();
            const double pl_db = three_slope_path_loss_db(d, cfg);
            const double sh_db = cfg.shadow_std_db * rng.normal();
            dep.beta.col(k).setConstant(std::pow(10.0, (pl_db + sh_db) / 10.0));
        }
    } else {
        for (int m = 0; m < cfg.M; ++m) {
            for (int k = 0; k < cfg.K; ++k) {
                const double d = (dep.ap_xy.row(m) - dep.ue_xy.row(k)).norm();
                const double pl_db = three_slope_path_loss_db(d, cfg);
                const double sh_db = cfg.shadow_std_db * rng.normal();
                dep.beta(m, k) = std::pow(10.0, (pl_db + sh_db) / 10.0);
            }
        }
    }

    dep.rho_p = normalized_snr_pilot(cfg);
    dep.rho_u = normalized_snr_uplink(cfg);
    return dep;
}

}  // namespace cfmimo
