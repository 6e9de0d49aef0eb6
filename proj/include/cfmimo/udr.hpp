#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "cfmimo/estimation.hpp"
#include "cfmimo/hypoexp.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

/// Constants of the univariate reduction, one set per threshold/user.
/// Interferer index i runs over users != target, ascending; m over APs.
struct UdrConstants {
    Eigen::MatrixXd c1, c2;               ///< (K-1) x M
    std::vector<Eigen::MatrixXd> c3, c4;  ///< per AP m: (K-1) x (K-1) pairwise differences
    Eigen::VectorXd c5, c6, c7, c8, c9, c10;  ///< per AP
    Eigen::VectorXd ci;                       ///< per interferer
    double ckt = 0.0;
};

UdrConstants make_udr_constants(const Eigen::MatrixXd& gamma, const Eigen::MatrixXd& beta,
                                double rho_u, double T, int N, int target);

enum class QuadBackend { adaptive_gk, gauss_laguerre };

struct UdrResult {
    double op = 0.0;            ///< clamped into [0, 1]
    double clamp_amount = 0.0;  ///< distance of the raw value outside [0, 1]
    bool out_of_range() const { return clamp_amount > 1e-6; }
};

/// Theorem-3 approximation of the outage probability for `target` (defaults
/// to the last user; the derivation relabels users so any index works).
/// Orthogonal pilots and K >= 2 required. The unit step inside the integrand
/// is handled by splitting each integral at the analytic roots of the
/// quadratic x^2 C5 + x C9 + C10.
UdrResult outage_udr(const EstimationStats& es, const Deployment& dep, const SystemConfig& cfg,
                     double T, int target = -1, QuadBackend backend = QuadBackend::adaptive_gk);

/// Exact multi-fold-integral outage (Lemma 1), tractable for MN <= 4 only.
/// Reference oracle for outage_udr.
double outage_exact_smallcase(const EstimationStats& es, const Deployment& dep,
                              const SystemConfig& cfg, double T, int target = -1);

struct MmimoConstants {
    Eigen::VectorXd d1, d2, d3;  ///< per interferer
    double d4 = 0, d5 = 0, d6 = 0;
    double kappa = 0;             ///< positive root, meaningful when T > threshold_split
    double threshold_split = 0;   ///< T* = rho_u (MN-1) gamma_K / (rho_u sum(beta-gamma) + 1)
};

MmimoConstants make_mmimo_constants(const Eigen::VectorXd& beta_all,
                                    const Eigen::VectorXd& gamma_all, const SystemConfig& cfg,
                                    double T, int target = -1);

/// Corollary-5 closed form for the collocated MN-antenna system; case split
/// at T*, continuous across it.
double outage_mmimo_closed_form(const Eigen::VectorXd& beta_all,
                                const Eigen::VectorXd& gamma_all, const SystemConfig& cfg,
                                double T, int target = -1);

/// Generic univariate dimension reduction over i.i.d. Exp(1) coordinates:
///   E[g(X)] ~= sum_j E[g(mu,..,x_j,..,mu)] - (dim-1) g(mu), mu = 1.
/// Exact for additive integrands; exposed for structural tests and as an
/// independent route to the Theorem-3 value.
double udr_expectation_exp(const std::function<double(const Eigen::VectorXd&)>& g, int dim,
                           double abs_tol = 1e-10);

}  // namespace cfmimo
