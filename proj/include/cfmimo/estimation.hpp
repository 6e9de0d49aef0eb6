#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cfmimo/deployment.hpp"
#include "cfmimo/pilots.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

/// Per-link MMSE estimation statistics.
///
/// nu[m](k, i) is the cross-statistic nu_mk^i = c_mk c_mi phi_i^H C_y phi_k,
/// i.e. the per-antenna covariance E[ghat_mk ghat_mi^H] = nu_mk^i I_N. Each
/// nu[m] is Hermitian with real diagonal nu_mk^k = gamma_mk.
struct EstimationStats {
    Eigen::MatrixXd c;      ///< M x K MMSE scaling c_mk
    Eigen::MatrixXd gamma;  ///< M x K estimate variances gamma_mk
    std::vector<Eigen::MatrixXcd> nu;  ///< M entries of K x K
};

EstimationStats estimation_stats(const Deployment& dep, const PilotBook& pb,
                                 const SystemConfig& cfg);

/// One small-scale channel draw. Vectors are stacked AP-major: row m*N + n is
/// antenna n of AP m; column k is user k.
struct ChannelRealization {
    Eigen::MatrixXcd g;       ///< (M N) x K true channels
    Eigen::MatrixXcd g_hat;   ///< (M N) x K MMSE estimates
    Eigen::MatrixXd lambda_err;  ///< M x K error variances beta - gamma
};

/// Draws g per the Rayleigh model, then runs the full pilot phase (received
/// pilot matrix, projection onto phi_k, scaling by c_mk). Estimates are NOT
/// sampled from their marginal, so cross-user correlation under contamination
/// is physically present.
void draw_channels_into(ChannelRealization& out, const Deployment& dep,
                        const EstimationStats& es, const PilotBook& pb,
                        const SystemConfig& cfg, Rng& rng);

ChannelRealization draw_channels(const Deployment& dep, const EstimationStats& es,
                                 const PilotBook& pb, const SystemConfig& cfg,
                                 std::uint64_t seed);

}  // namespace cfmimo
