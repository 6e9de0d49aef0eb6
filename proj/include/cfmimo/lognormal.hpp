#pragma once

#include <cmath>
#include <stdexcept>

#include "cfmimo/moments.hpp"
#include "cfmimo/pilots.hpp"
#include "cfmimo/quadrature.hpp"

namespace cfmimo {

/// Raised when the matched log-domain variance sigma^2 = sigma_X^2 +
/// sigma_Y^2 - 2 log(E[XY]/(E[X]E[Y])) is not positive; the moment-matching
/// approximation has no valid parameterization for such inputs.
struct DegenerateLognormalError : std::runtime_error {
    double sigma_sq;
    explicit DegenerateLognormalError(double s2)
        : std::runtime_error("log-normal moment matching degenerate: sigma^2 = " +
                             std::to_string(s2)),
          sigma_sq(s2) {}
};

template <class Scalar>
struct LogNormalParamsT {
    Scalar mu{}, sigma{};      // parameters of ln(lambda)
    Scalar mu_x{}, sigma_x{};  // numerator component
    Scalar mu_y{}, sigma_y{};  // denominator component
};
using LogNormalParams = LogNormalParamsT<double>;

/// ln(1 + e^x) without overflow.
template <class Scalar>
Scalar softplus(Scalar x) {
    if (x > Scalar(36)) return x + std::exp(-x);
    if (x < Scalar(-36)) return std::exp(x);
    return std::log1p(std::exp(x));
}

template <class Scalar>
Scalar logistic(Scalar x) {
    if (x >= 0) return Scalar(1) / (Scalar(1) + std::exp(-x));
    const Scalar e = std::exp(x);
    return e / (Scalar(1) + e);
}

/// Two-step moment matching: X and Y are matched to Log-normals separately,
/// then combined through the log-domain covariance identity.
template <class Scalar>
LogNormalParamsT<Scalar> fit_lognormal(const MomentSetT<Scalar>& ms) {
    if (!(ms.ex > 0) || !(ms.ex2 > 0) || !(ms.ey > 0) || !(ms.ey2 > 0) || !(ms.exy > 0))
        throw std::invalid_argument("fit_lognormal: moments must be positive");
    const Scalar sx2 = std::log(ms.ex2 / (ms.ex * ms.ex));
    const Scalar sy2 = std::log(ms.ey2 / (ms.ey * ms.ey));
    if (!(sx2 >= 0) || !(sy2 >= 0))
        throw DegenerateLognormalError(static_cast<double>(std::min(sx2, sy2)));
    LogNormalParamsT<Scalar> p;
    p.mu_x = std::log(ms.ex * ms.ex / std::sqrt(ms.ex2));
    p.mu_y = std::log(ms.ey * ms.ey / std::sqrt(ms.ey2));
    p.sigma_x = std::sqrt(sx2);
    p.sigma_y = std::sqrt(sy2);
    const Scalar s2 = sx2 + sy2 - 2 * std::log(ms.exy / (ms.ex * ms.ey));
    if (!(s2 > 0)) throw DegenerateLognormalError(static_cast<double>(s2));
    p.mu = p.mu_x - p.mu_y;
    p.sigma = std::sqrt(s2);
    return p;
}

/// P(lambda < T) = 1/2 erfc(-(ln T - mu)/(sigma sqrt(2))).
/// std::erfc is the vetted evaluation here; its accuracy on |x| <= 6 and its
/// underflow behaviour are pinned by the unit tests.
inline double outage_lognormal(const LogNormalParams& p, double T) {
    if (!(T > 0)) throw std::invalid_argument("outage_lognormal: threshold must be > 0");
    return 0.5 * std::erfc(-(std::log(T) - p.mu) / (p.sigma * std::numbers::sqrt2));
}

/// Ergodic rate 1/2 int_0^inf erfc((ln(2^t - 1) - mu)/(sigma sqrt2)) dt,
/// evaluated after the substitution x = ln(2^t - 1):
///   R = [2 ln(1 + e^mu) - I_minus + I_plus] / (2 ln 2)
/// where both remaining integrals have Gaussian-type decay away from mu and
/// are clipped at mu -/+ 12 sigma.
double rate_lognormal(const LogNormalParams& p, double abs_tol = 1e-9);

/// Independent route for cross-checks: E[log2(1 + e^{mu + sigma Z})] by
/// Gauss-Hermite quadrature.
double rate_lognormal_hermite(const LogNormalParams& p, int n_nodes = 180);

/// Closed-form bracket around rate_lognormal:
///   log2(e^mu + 1) < R < log2(e^mu + 1) + (e^{sigma^2/2} - 1) / (2 ln 2 cosh(mu)).
std::pair<double, double> rate_bounds(const LogNormalParams& p);

/// Use-and-then-forget achievable-rate baseline for MRC, contaminated or not.
/// Plotted for comparison only; known to sit well below the simulated rate.
double rate_uatf(const EstimationStats& es, const Deployment& dep, const PilotBook& pb,
                 const SystemConfig& cfg, int k);

}  // namespace cfmimo
