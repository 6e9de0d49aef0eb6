#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "cfmimo/types.hpp"

namespace cfmimo {

/// One random network realization: geometry plus large-scale statistics.
struct Deployment {
    Eigen::MatrixX2d ap_xy;  ///< M x 2, km
    Eigen::MatrixX2d ue_xy;  ///< K x 2, km
    Eigen::MatrixXd beta;    ///< M x K large-scale coefficients (linear)
    double rho_p = 0.0;      ///< normalized pilot SNR
    double rho_u = 0.0;      ///< normalized uplink SNR
};

/// AP and UE positions i.i.d. uniform on the square; beta = pathloss *
/// 10^(sigma_sh z / 10) with z standard normal. Pure function of (cfg, seed).
/// In collocated mode all APs sit at the centre and shadowing is drawn per
/// user, so beta rows coincide.
Deployment generate_deployment(const SystemConfig& cfg, std::uint64_t seed);

}  // namespace cfmimo
