#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cfmimo/estimation.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

/// Effective-SINR sample for user k from one channel realization:
///   lambda = rho_u ||ghat_k||^4 /
///            (rho_u sum_{i!=k} |ghat_k^H ghat_i|^2 + ghat_k^H (rho_u sum_i Lambda_i + I) ghat_k)
double sinr_sample(const ChannelRealization& real, const EstimationStats& es,
                   const Deployment& dep, int k);

struct EmpiricalCurve {
    std::vector<double> thresholds_db;
    std::vector<double> op;        ///< outage probability per threshold
    double rate_bits = 0.0;        ///< per-user ergodic rate estimate
    long long samples = 0;
};

/// First/second-moment accumulators of X and Y for one user in one
/// deployment; the standing oracle against the closed-form moments.
struct XyStats {
    double x_mean = 0, x_se = 0, y_mean = 0, y_se = 0;
};

struct DeploymentResult {
    std::vector<EmpiricalCurve> per_user;
    std::vector<XyStats> xy;
};

struct MonteCarloResult {
    EmpiricalCurve system;                   ///< averaged over users and deployments
    std::vector<EmpiricalCurve> per_user;    ///< averaged over deployments
    std::vector<DeploymentResult> per_deployment;
};

/// The simulation protocol: n_deployments random geometries, n_iters channel
/// draws each; per-deployment OP/rate first, then averaged. Deterministic for
/// a fixed master_seed under any thread count (per-deployment derived seeds,
/// reduction in deployment order).
MonteCarloResult run_monte_carlo(const SystemConfig& cfg, int n_deployments, int n_iters,
                                 const std::vector<double>& thresholds_db,
                                 std::uint64_t master_seed, int n_threads = 1);

/// dB thresholds to linear, honoring -inf/+inf sentinels.
std::vector<double> thresholds_db_to_linear(const std::vector<double>& thresholds_db);

}  // namespace cfmimo
